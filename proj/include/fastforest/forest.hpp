#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fastforest/dataset.hpp"
#include "fastforest/tree.hpp"

namespace fastforest {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// How each tree's training subset is drawn from the n dataset records.
struct SamplerMode {
    enum class Kind {
        bag,         // n draws with replacement, repeats kept
        bag_unique,  // the distinct records of such a bag (about 63.2% of n)
        subbag       // max(1, floor(a*n)) distinct records, no replacement
    };
    Kind kind = Kind::subbag;
    double a = 0.5;  // subbag only, in (0, 1]

    bool operator==(const SamplerMode& other) const {
        return kind == other.kind && (kind != Kind::subbag || a == other.a);
    }
};

/// n index draws with replacement; when `unique`, the distinct drawn indices
/// in ascending order instead.
inline std::vector<std::uint32_t> bag_indices(std::size_t n, bool unique, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("bag_indices: empty dataset");
    std::vector<std::uint32_t> out(n);
    for (auto& idx : out) idx = static_cast<std::uint32_t>(rng.below(n));
    if (unique) {
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

/// max(1, floor(a*n)) distinct indices by partial Fisher-Yates, in draw order.
/// The floor is taken with a one-part-per-billion allowance so that decimal
/// fractions like 0.6, inexact as doubles, floor to their intended product.
inline std::vector<std::uint32_t> subbag_indices(std::size_t n, double a, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("subbag_indices: empty dataset");
    if (!(a > 0.0) || a > 1.0) throw std::invalid_argument("subbag_indices: a must be in (0, 1]");
    const auto want = static_cast<std::size_t>(std::floor(a * static_cast<double>(n) + 1e-9));
    const std::size_t k = std::max<std::size_t>(1, want);
    std::vector<std::uint32_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

inline IndexSubset make_bag(const Dataset& ds, bool unique, RngStream& rng) {
    return {&ds, bag_indices(ds.n(), unique, rng)};
}

inline IndexSubset make_subbag(const Dataset& ds, double a, RngStream& rng) {
    return {&ds, subbag_indices(ds.n(), a, rng)};
}

inline IndexSubset draw_training_subset(const Dataset& ds, const SamplerMode& sampler,
                                        RngStream& rng) {
    switch (sampler.kind) {
        case SamplerMode::Kind::bag:
            return make_bag(ds, false, rng);
        case SamplerMode::Kind::bag_unique:
            return make_bag(ds, true, rng);
        case SamplerMode::Kind::subbag:
            return make_subbag(ds, sampler.a, rng);
    }
    throw std::logic_error("draw_training_subset: bad sampler kind");
}

struct BuildConfig {
    std::size_t num_trees = 100;
    SamplerMode sampler{};                                   // subbag, a = 0.5
    CandidateMode split_mode{CandidateMode::Kind::lsps, 20};
    SubspaceMode subspace{SubspaceMode::Kind::drs, 8};
    std::size_t min_leaf = 1;
    std::size_t max_depth = 0;  // 0 = unbounded
    std::uint64_t seed = kDefaultSeed;
    std::size_t threads = 0;    // 0 = all hardware threads

    bool operator==(const BuildConfig&) const = default;
};

/// Classic random forest: bootstrap bag reduced to its distinct records,
/// every midpoint tried, fixed attribute-sample size at every node.
inline BuildConfig rf_preset() {
    BuildConfig c;
    c.sampler = {SamplerMode::Kind::bag_unique, 0.5};
    c.split_mode = {CandidateMode::Kind::exhaustive, 20};
    c.subspace = {SubspaceMode::Kind::static_k, 8};
    return c;
}

/// Half subbagging, logarithmic split-point sampling, and the restricted
/// subspace schedule. These are the BuildConfig defaults.
inline BuildConfig fastforest_preset() { return BuildConfig{}; }

struct TreeMeta {
    double build_seconds = 0.0;
    std::uint64_t split_evaluations = 0;
};

struct ForestModel {
    std::vector<AttributeSchema> schema;
    std::size_t class_index = 0;
    BuildConfig config{};
    std::vector<Tree> trees;
    std::vector<TreeMeta> tree_meta;
    double wall_seconds = 0.0;  // whole build, all threads

    const AttributeSchema& class_attr() const { return schema[class_index]; }

    std::uint64_t fingerprint() const { return schema_fingerprint(schema, class_index); }

    std::uint64_t total_split_evaluations() const {
        std::uint64_t t = 0;
        for (const auto& m : tree_meta) t += m.split_evaluations;
        return t;
    }

    /// Sum of per-tree build times; unlike wall_seconds it does not shrink
    /// with more threads.
    double total_tree_seconds() const {
        double t = 0.0;
        for (const auto& m : tree_meta) t += m.build_seconds;
        return t;
    }
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Train config.num_trees trees. Tree j draws everything from a private
/// stream seeded by (config.seed, j), and trees are assigned to threads by an
/// atomic ticket, so the model is bit-identical for any thread count; only
/// the timing fields vary between runs.
inline ForestModel build_forest(const Dataset& ds, const BuildConfig& config,
                                const ProgressFn& progress = {}) {
    if (config.num_trees == 0) throw std::invalid_argument("build_forest: zero trees");
    if (config.sampler.kind == SamplerMode::Kind::subbag &&
        (!(config.sampler.a > 0.0) || config.sampler.a > 1.0))
        throw std::invalid_argument("build_forest: subbag fraction must be in (0, 1]");
    if (config.split_mode.kind == CandidateMode::Kind::fixed_count && config.split_mode.cap == 0)
        throw std::invalid_argument("build_forest: fixed candidate cap must be at least 1");
    for (std::size_t r = 0; r < ds.n(); ++r)
        if (ds.class_missing(r))
            throw std::invalid_argument("build_forest: missing class value at row " +
                                        std::to_string(r));

    ForestModel model;
    model.schema = ds.schema();
    model.class_index = ds.class_index();
    model.config = config;
    model.trees.resize(config.num_trees);
    model.tree_meta.resize(config.num_trees);

    std::size_t threads = config.threads;
    if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = std::min(threads, config.num_trees);

    std::atomic<std::size_t> ticket{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mu;
    const auto t0 = std::chrono::steady_clock::now();
    auto worker = [&] {
        for (;;) {
            const std::size_t j = ticket.fetch_add(1);
            if (j >= config.num_trees) return;
            RngStream rng(tree_stream_seed(config.seed, j));
            const auto tree_t0 = std::chrono::steady_clock::now();
            IndexSubset train = draw_training_subset(ds, config.sampler, rng);
            TreeBuildContext ctx;
            ctx.train_size = train.size();
            ctx.total_attrs = ds.nonclass_attr_count();
            ctx.subspace = config.subspace;
            ctx.min_leaf = config.min_leaf;
            ctx.max_depth = config.max_depth;
            ctx.rng = rng;
            SplitCounters counters;
            model.trees[j] = build_tree(train, ctx, config.split_mode, counters);
            const auto tree_t1 = std::chrono::steady_clock::now();
            model.tree_meta[j] = {std::chrono::duration<double>(tree_t1 - tree_t0).count(),
                                  counters.split_evaluations};
            const std::size_t finished = done.fetch_add(1) + 1;
            if (progress) {
                const std::lock_guard<std::mutex> lock(progress_mu);
                progress(finished, config.num_trees);
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    model.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return model;
}

/// Canonical spellings of the mode enums, shared by the CLI flags and the
/// model file format.
inline const char* sampler_name(SamplerMode::Kind k) {
    switch (k) {
        case SamplerMode::Kind::bag: return "bag";
        case SamplerMode::Kind::bag_unique: return "bag-unique";
        case SamplerMode::Kind::subbag: return "subbag";
    }
    return "?";
}

inline const char* split_name(CandidateMode::Kind k) {
    switch (k) {
        case CandidateMode::Kind::exhaustive: return "exhaustive";
        case CandidateMode::Kind::fixed_count: return "fixed";
        case CandidateMode::Kind::lsps: return "lsps";
    }
    return "?";
}

inline const char* subspace_name(SubspaceMode::Kind k) {
    switch (k) {
        case SubspaceMode::Kind::static_k: return "static";
        case SubspaceMode::Kind::dynamic_k: return "dynamic";
        case SubspaceMode::Kind::drs: return "drs";
    }
    return "?";
}

inline SamplerMode::Kind parse_sampler_name(const std::string& s) {
    if (s == "bag") return SamplerMode::Kind::bag;
    if (s == "bag-unique") return SamplerMode::Kind::bag_unique;
    if (s == "subbag") return SamplerMode::Kind::subbag;
    throw std::invalid_argument("unknown sampler '" + s + "' (bag, bag-unique, subbag)");
}

inline CandidateMode::Kind parse_split_name(const std::string& s) {
    if (s == "exhaustive") return CandidateMode::Kind::exhaustive;
    if (s == "fixed") return CandidateMode::Kind::fixed_count;
    if (s == "lsps") return CandidateMode::Kind::lsps;
    throw std::invalid_argument("unknown split mode '" + s + "' (exhaustive, fixed, lsps)");
}

inline SubspaceMode::Kind parse_subspace_name(const std::string& s) {
    if (s == "static") return SubspaceMode::Kind::static_k;
    if (s == "dynamic") return SubspaceMode::Kind::dynamic_k;
    if (s == "drs") return SubspaceMode::Kind::drs;
    throw std::invalid_argument("unknown subspace mode '" + s + "' (static, dynamic, drs)");
}

/// Majority vote over the trees; the lowest class code wins ties. The row must
/// have one cell per schema attribute (the class cell is ignored and may be
/// missing).
inline std::size_t predict(const ForestModel& model, std::span<const double> row) {
    if (row.size() != model.schema.size())
        throw std::invalid_argument("predict: row width does not match the model schema");
    std::vector<std::size_t> votes(model.class_attr().value_count(), 0);
    for (const auto& tree : model.trees) ++votes[predict_record(tree, row).class_id];
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

/// Votes every row of a dataset, which must carry the exact schema the model
/// was trained on.
inline std::vector<std::size_t> predict_dataset(const ForestModel& model, const Dataset& ds) {
    if (ds.schema_fingerprint() != model.fingerprint())
        throw std::invalid_argument("predict_dataset: dataset schema does not match the model");
    std::vector<std::size_t> out(ds.n());
    for (std::size_t r = 0; r < ds.n(); ++r)
        out[r] = predict(model, std::span<const double>(ds.row(r), ds.attr_count()));
    return out;
}

}  // namespace fastforest
