#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "fastforest/forest.hpp"

namespace fastforest {

/// Model file format tag and version. Loaders reject anything else, so a
/// stale or foreign file fails loudly instead of mis-predicting quietly.
inline constexpr const char* kModelFormat = "fastforest-model";
inline constexpr int kModelVersion = 1;

namespace detail {

using Json = nlohmann::ordered_json;

inline Json config_to_json(const BuildConfig& c) {
    Json j;
    j["trees"] = c.num_trees;
    j["sampler"] = sampler_name(c.sampler.kind);
    j["subbag_a"] = c.sampler.a;
    j["split"] = split_name(c.split_mode.kind);
    j["fixed_cap"] = c.split_mode.cap;
    j["subspace"] = subspace_name(c.subspace.kind);
    j["drs_divisor"] = c.subspace.divisor;
    j["min_leaf"] = c.min_leaf;
    j["max_depth"] = c.max_depth;
    j["seed"] = c.seed;
    // threads is a machine detail, not a model property: the same seed builds
    // the same forest at any thread count, so persisting it would only make
    // equal models compare unequal.
    return j;
}

inline BuildConfig config_from_json(const Json& j) {
    BuildConfig c;
    c.num_trees = j.at("trees").get<std::size_t>();
    c.sampler.kind = parse_sampler_name(j.at("sampler").get<std::string>());
    c.sampler.a = j.at("subbag_a").get<double>();
    c.split_mode.kind = parse_split_name(j.at("split").get<std::string>());
    c.split_mode.cap = j.at("fixed_cap").get<std::size_t>();
    c.subspace.kind = parse_subspace_name(j.at("subspace").get<std::string>());
    c.subspace.divisor = j.at("drs_divisor").get<std::size_t>();
    c.min_leaf = j.at("min_leaf").get<std::size_t>();
    c.max_depth = j.at("max_depth").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = 0;
    return c;
}

inline Json tree_to_json(const Tree& tree) {
    Json nodes = Json::array();
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const TreeNode& n = tree.node(id);
        Json jn;
        if (n.leaf) {
            jn["dist"] = n.dist.counts;
        } else {
            jn["attr"] = n.split.attribute;
            if (n.split.numeric) jn["thr"] = n.split.threshold;
            jn["miss"] = n.split.missing_child;
            jn["gain"] = n.split.gain;
            jn["children"] = n.children;
        }
        nodes.push_back(std::move(jn));
    }
    return nodes;
}

inline Tree tree_from_json(const Json& nodes, std::size_t classes) {
    Tree tree;
    for (const auto& jn : nodes) {
        TreeNode n;
        if (jn.contains("dist")) {
            n.leaf = true;
            n.dist.counts = jn.at("dist").get<std::vector<std::size_t>>();
            if (n.dist.counts.size() != classes)
                throw std::runtime_error("model file: leaf distribution arity mismatch");
            n.majority = static_cast<std::uint32_t>(n.dist.majority());
        } else {
            n.leaf = false;
            n.split.attribute = jn.at("attr").get<std::size_t>();
            n.split.numeric = jn.contains("thr");
            if (n.split.numeric) n.split.threshold = jn.at("thr").get<double>();
            n.split.missing_child = jn.at("miss").get<std::size_t>();
            n.split.gain = jn.at("gain").get<double>();
            n.children = jn.at("children").get<std::vector<std::uint32_t>>();
            n.split.child_count = n.children.size();
        }
        const auto id = tree.add_node(std::move(n));
        (void)id;
    }
    if (tree.size() == 0) throw std::runtime_error("model file: empty tree");
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const TreeNode& n = tree.node(id);
        if (n.leaf) continue;
        if (n.children.empty()) throw std::runtime_error("model file: childless inner node");
        for (const auto c : n.children)
            if (c <= id || c >= tree.size())
                throw std::runtime_error("model file: bad child reference");
    }
    return tree;
}

}  // namespace detail

/// Model as a JSON string. Everything that defines predictions serializes;
/// timing fields are included only when `include_timings` is set, so two
/// builds of the same model compare equal as strings with timings off.
inline std::string serialize_model(const ForestModel& model, bool include_timings = true) {
    using detail::Json;
    Json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["class_index"] = model.class_index;
    Json attrs = Json::array();
    for (const auto& a : model.schema) {
        Json ja;
        ja["name"] = a.name;
        if (a.is_numeric()) {
            ja["kind"] = "numeric";
        } else {
            ja["kind"] = "categorical";
            ja["values"] = a.values;
        }
        attrs.push_back(std::move(ja));
    }
    j["attributes"] = std::move(attrs);
    j["config"] = detail::config_to_json(model.config);
    Json trees = Json::array();
    for (const auto& t : model.trees) trees.push_back(detail::tree_to_json(t));
    j["trees"] = std::move(trees);
    Json evals = Json::array();
    for (const auto& m : model.tree_meta) evals.push_back(m.split_evaluations);
    j["split_evaluations"] = std::move(evals);
    if (include_timings) {
        j["wall_seconds"] = model.wall_seconds;
        Json secs = Json::array();
        for (const auto& m : model.tree_meta) secs.push_back(m.build_seconds);
        j["tree_seconds"] = std::move(secs);
    }
    return j.dump(1);
}

inline ForestModel deserialize_model(const std::string& text) {
    using detail::Json;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("model file: not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("format") || j.at("format").get<std::string>() != kModelFormat)
            throw std::runtime_error("model file: not a forest model");
        if (j.at("version").get<int>() != kModelVersion)
            throw std::runtime_error("model file: unsupported version");

        ForestModel model;
        model.class_index = j.at("class_index").get<std::size_t>();
        for (const auto& ja : j.at("attributes")) {
            AttributeSchema a;
            a.name = ja.at("name").get<std::string>();
            const auto kind = ja.at("kind").get<std::string>();
            if (kind == "numeric") {
                a.kind = AttrKind::numeric;
            } else if (kind == "categorical") {
                a.kind = AttrKind::categorical;
                a.values = ja.at("values").get<std::vector<std::string>>();
            } else {
                throw std::runtime_error("model file: unknown attribute kind '" + kind + "'");
            }
            model.schema.push_back(std::move(a));
        }
        if (model.class_index >= model.schema.size() ||
            model.schema[model.class_index].is_numeric())
            throw std::runtime_error("model file: bad class attribute");
        model.config = detail::config_from_json(j.at("config"));
        const std::size_t classes = model.class_attr().value_count();
        for (const auto& jt : j.at("trees"))
            model.trees.push_back(detail::tree_from_json(jt, classes));
        model.tree_meta.resize(model.trees.size());
        if (j.contains("split_evaluations")) {
            const auto& evals = j.at("split_evaluations");
            for (std::size_t i = 0; i < model.trees.size() && i < evals.size(); ++i)
                model.tree_meta[i].split_evaluations = evals[i].get<std::uint64_t>();
        }
        if (j.contains("tree_seconds")) {
            const auto& secs = j.at("tree_seconds");
            for (std::size_t i = 0; i < model.trees.size() && i < secs.size(); ++i)
                model.tree_meta[i].build_seconds = secs[i].get<double>();
        }
        if (j.contains("wall_seconds")) model.wall_seconds = j.at("wall_seconds").get<double>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("model file: malformed field: ") + e.what());
    }
}

inline void save_model(const ForestModel& model, const std::filesystem::path& file,
                       bool include_timings = true) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << serialize_model(model, include_timings) << '\n';
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

inline ForestModel load_model(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(text);
}

}  // namespace fastforest
