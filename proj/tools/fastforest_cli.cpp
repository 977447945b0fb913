// fastforest: train, score, and benchmark decision forests from the shell.
//
// Exit codes: 0 success, 2 usage error (bad flags, conflicting options),
// 1 runtime failure (unreadable files, parse errors, invalid data).

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastforest/fastforest.hpp"

namespace ff = fastforest;
namespace fs = std::filesystem;

namespace {

/// Flag and environment mistakes that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& text) {
    if (text == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--seed wants an unsigned integer or 'random', got '" + text + "'");
    }
}

/// "auto" or empty means every hardware thread (0 internally).
std::size_t parse_threads(const std::string& text, const char* origin) {
    if (text.empty() || text == "auto") return 0;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size() || v == 0) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string(origin) + " wants a positive integer or 'auto', got '" +
                         text + "'");
    }
}

std::vector<double> parse_a_list(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            if (!(v > 0.0) || v > 1.0) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("--a-list wants comma-separated fractions in (0, 1], got '" + token +
                             "'");
        }
    }
    if (out.empty()) throw UsageError("--a-list is empty");
    return out;
}

/// The config-shaping flags shared by every command, with CLI11 option
/// handles so explicitly-passed flags can be told apart from defaults.
struct ConfigFlags {
    std::size_t trees = 100;
    std::string sampler = "subbag";
    double subbag_a = 0.5;
    std::string split = "lsps";
    std::size_t fixed_cap = 20;
    std::string subspace = "drs";
    std::size_t drs_divisor = 8;
    std::size_t min_leaf = 1;
    std::size_t max_depth = 0;
    std::string seed_text = "42";
    std::string threads_text;
    std::vector<std::string> presets;
    bool allow_override = false;

    CLI::Option* o_sampler = nullptr;
    CLI::Option* o_subbag_a = nullptr;
    CLI::Option* o_split = nullptr;
    CLI::Option* o_fixed_cap = nullptr;
    CLI::Option* o_subspace = nullptr;
    CLI::Option* o_drs_divisor = nullptr;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--trees", trees, "Trees in the forest")->capture_default_str();
        o_sampler = cmd.add_option("--sampler", sampler,
                                   "Per-tree record sampler: bag, bag-unique, subbag")
                        ->capture_default_str();
        o_subbag_a = cmd.add_option("--subbag-a", subbag_a,
                                    "Subbag fraction of records, in (0, 1]")
                         ->capture_default_str();
        o_split = cmd.add_option("--split", split,
                                 "Numeric split-point candidates: exhaustive, fixed, lsps")
                      ->capture_default_str();
        o_fixed_cap = cmd.add_option("--fixed-cap", fixed_cap,
                                     "Candidate cap for --split fixed")
                          ->capture_default_str();
        o_subspace = cmd.add_option("--subspace", subspace,
                                    "Attribute sample per node: static, dynamic, drs")
                         ->capture_default_str();
        o_drs_divisor = cmd.add_option("--drs-divisor", drs_divisor,
                                       "drs switches to dynamic when a node holds at most "
                                       "1/divisor of the tree's records")
                            ->capture_default_str();
        cmd.add_option("--min-leaf", min_leaf, "Stop splitting nodes at or below this size")
            ->capture_default_str();
        cmd.add_option("--max-depth", max_depth, "Depth cap, 0 = unbounded")
            ->capture_default_str();
        cmd.add_option("--seed", seed_text, "Forest seed: unsigned integer or 'random'")
            ->capture_default_str();
        cmd.add_option("--threads", threads_text,
                       "Build threads: positive integer or 'auto' (default: FASTFOREST_THREADS "
                       "env, then auto)");
        // One name per occurrence; without the arity cap a repeated vector
        // option would swallow positional dataset paths that follow it.
        cmd.add_option("--preset", presets,
                       "Start from a named config: rf or fastforest (repeatable where multiple "
                       "configs compete)")
            ->allow_extra_args(false);
        cmd.add_flag("--allow-override", allow_override,
                     "Let explicit mode flags override a --preset instead of erroring");
    }

    bool any_mode_flag() const {
        return o_sampler->count() || o_subbag_a->count() || o_split->count() ||
               o_fixed_cap->count() || o_subspace->count() || o_drs_divisor->count();
    }

    /// Single-config commands: at most one preset; mode flags shape the
    /// config directly when no preset is named.
    ff::BuildConfig resolve() const {
        if (presets.size() > 1) throw UsageError("this command takes at most one --preset");
        check_conflicts();
        if (!presets.empty()) return preset_config(presets.front());
        ff::BuildConfig c;  // the fastforest preset
        apply_shared(c);
        apply_modes(c, /*include_defaults=*/true);
        return c;
    }

    /// Competing configs for compare: defaults to rf vs fastforest.
    std::vector<ff::NamedConfig> resolve_many() const {
        if (any_mode_flag() && !allow_override) throw UsageError(kConflictMessage);
        std::vector<std::string> names = presets;
        if (names.empty()) names = {"rf", "fastforest"};
        if (names.size() < 2)
            throw UsageError("compare needs at least two --preset configs to race");
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j)
                if (names[i] == names[j])
                    throw UsageError("duplicate --preset '" + names[i] + "'");
        std::vector<ff::NamedConfig> out;
        for (const auto& name : names) out.push_back({name, preset_config(name)});
        return out;
    }

    std::string config_label() const {
        return presets.empty() ? "custom" : presets.front();
    }

private:
    static constexpr const char* kConflictMessage =
        "--preset conflicts with explicit mode flags (--sampler/--subbag-a/--split/--fixed-cap/"
        "--subspace/--drs-divisor); pass --allow-override to combine them";

    void check_conflicts() const {
        if (!presets.empty() && any_mode_flag() && !allow_override)
            throw UsageError(kConflictMessage);
    }

    ff::BuildConfig preset_config(const std::string& name) const {
        ff::BuildConfig c;
        if (name == "rf")
            c = ff::rf_preset();
        else if (name == "fastforest")
            c = ff::fastforest_preset();
        else
            throw UsageError("unknown preset '" + name + "' (rf, fastforest)");
        apply_shared(c);
        // Only flags the user actually passed may override a preset.
        if (allow_override) apply_modes(c, /*include_defaults=*/false);
        return c;
    }

    void apply_shared(ff::BuildConfig& c) const {
        c.num_trees = trees;
        c.min_leaf = min_leaf;
        c.max_depth = max_depth;
        c.seed = parse_seed(seed_text);
        std::string threads_src = threads_text;
        const char* origin = "--threads";
        if (threads_src.empty()) {
            if (const char* env = std::getenv("FASTFOREST_THREADS")) {
                threads_src = env;
                origin = "FASTFOREST_THREADS";
            }
        }
        c.threads = parse_threads(threads_src, origin);
        if (trees == 0) throw UsageError("--trees must be at least 1");
        if (split == "fixed" && fixed_cap == 0) throw UsageError("--fixed-cap must be at least 1");
    }

    void apply_modes(ff::BuildConfig& c, bool include_defaults) const {
        try {
            if (o_sampler->count() || include_defaults)
                c.sampler.kind = ff::parse_sampler_name(sampler);
            if (o_subbag_a->count() || include_defaults) c.sampler.a = subbag_a;
            if (o_split->count() || include_defaults)
                c.split_mode.kind = ff::parse_split_name(split);
            if (o_fixed_cap->count() || include_defaults) c.split_mode.cap = fixed_cap;
            if (o_subspace->count() || include_defaults)
                c.subspace.kind = ff::parse_subspace_name(subspace);
            if (o_drs_divisor->count() || include_defaults) c.subspace.divisor = drs_divisor;
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (c.sampler.kind == ff::SamplerMode::Kind::subbag &&
            (!(c.sampler.a > 0.0) || c.sampler.a > 1.0))
            throw UsageError("--subbag-a must be in (0, 1]");
        if (c.subspace.kind == ff::SubspaceMode::Kind::drs && c.subspace.divisor == 0)
            throw UsageError("--drs-divisor must be at least 1");
    }
};

ff::ProgressFn tty_progress(const std::string& label) {
    if (!isatty(fileno(stderr))) return {};
    return [label](std::size_t done, std::size_t total) {
        std::fprintf(stderr, "\r%s: tree %zu/%zu", label.c_str(), done, total);
        if (done == total) std::fprintf(stderr, "\n");
    };
}

std::vector<ff::DatasetRef> dataset_refs(const std::vector<std::string>& paths,
                                         const std::string& class_col) {
    std::vector<ff::DatasetRef> out;
    for (const auto& p : paths) out.push_back({"", p, class_col});
    return out;
}

void write_text_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

fs::path swap_ext_for_json(fs::path p) { return p.replace_extension(".json"); }

// ------------------------------------------------------------- commands ----

struct TrainArgs {
    ConfigFlags cfg;
    std::string data;
    std::string class_col = "last";
    std::string out;
    bool no_timings = false;
};

int run_train(const TrainArgs& a) {
    const ff::BuildConfig config = a.cfg.resolve();
    const ff::Dataset ds = ff::load_dataset(a.data, a.class_col);
    const ff::ForestModel model = ff::build_forest(ds, config, tty_progress("train"));
    const fs::path out =
        a.out.empty() ? fs::path(a.data).stem().concat("_model.json") : fs::path(a.out);
    ff::save_model(model, out, !a.no_timings);
    std::printf("trained %zu trees on %zu records (%zu attributes) in %.3fs\n",
                model.trees.size(), ds.n(), ds.nonclass_attr_count(), model.wall_seconds);
    std::printf("split evaluations: %llu\n",
                static_cast<unsigned long long>(model.total_split_evaluations()));
    std::printf("model: %s\n", out.string().c_str());
    return 0;
}

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
    std::string format = "csv";
};

int run_predict(const PredictArgs& a) {
    const ff::ForestModel model = ff::load_model(a.model);
    const ff::Dataset ds = ff::load_for_scoring(a.data, ff::detect_format(a.data), model.schema,
                                                model.class_index);
    const auto predictions = ff::predict_dataset(model, ds);

    const auto& classes = model.class_attr().values;
    std::size_t labeled = 0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ds.n(); ++r) {
        if (ds.class_missing(r)) continue;
        ++labeled;
        if (predictions[r] == ds.class_id(r)) ++hits;
    }

    fs::path out =
        a.out.empty() ? fs::path(a.data).stem().concat("_predictions.csv") : fs::path(a.out);
    if (a.format == "json") {
        if (a.out.empty()) out = swap_ext_for_json(out);
        write_text_file(out, [&](std::ostream& os) {
            nlohmann::ordered_json j;
            auto rows = nlohmann::ordered_json::array();
            for (std::size_t r = 0; r < ds.n(); ++r) {
                nlohmann::ordered_json jr;
                jr["row"] = r + 1;
                jr["predicted"] = classes[predictions[r]];
                if (!ds.class_missing(r)) jr["actual"] = classes[ds.class_id(r)];
                rows.push_back(std::move(jr));
            }
            j["predictions"] = std::move(rows);
            if (labeled > 0)
                j["accuracy"] = static_cast<double>(hits) / static_cast<double>(labeled);
            os << j.dump(1) << '\n';
        });
    } else {
        write_text_file(out, [&](std::ostream& os) {
            os << "row,predicted,actual\n";
            for (std::size_t r = 0; r < ds.n(); ++r) {
                os << r + 1 << ',' << classes[predictions[r]] << ',';
                if (!ds.class_missing(r)) os << classes[ds.class_id(r)];
                os << '\n';
            }
        });
    }
    if (labeled > 0)
        std::printf("accuracy: %.2f%% (%zu/%zu labeled rows)\n",
                    100.0 * static_cast<double>(hits) / static_cast<double>(labeled), hits,
                    labeled);
    std::printf("predictions: %s\n", out.string().c_str());
    return 0;
}

struct CvArgs {
    ConfigFlags cfg;
    std::string data;
    std::string class_col = "last";
    std::string out;
    std::string format = "csv";
    std::size_t folds = 10;
    std::size_t reps = 1;
    std::string fold_seed_text;
};

int run_cv(const CvArgs& a) {
    if (a.folds < 2) throw UsageError("--folds must be at least 2");
    if (a.reps < 1) throw UsageError("--reps must be at least 1");
    const ff::BuildConfig config = a.cfg.resolve();
    const std::uint64_t fold_seed =
        a.fold_seed_text.empty() ? config.seed : parse_seed(a.fold_seed_text);
    const ff::Dataset ds = ff::load_dataset(a.data, a.class_col);
    const std::string name = fs::path(a.data).stem().string();
    const ff::EvalReport report =
        ff::cross_validate(ds, config, a.folds, fold_seed, a.reps, name, a.cfg.config_label());

    fs::path out = a.out.empty() ? fs::path(ff::report_filename(name, a.cfg.config_label(),
                                                                a.folds))
                                 : fs::path(a.out);
    if (a.format == "json") {
        if (a.out.empty()) out = swap_ext_for_json(out);
        write_text_file(out, [&](std::ostream& os) { ff::write_cv_json(report, os); });
    } else {
        write_text_file(out, [&](std::ostream& os) { ff::write_cv_csv(report, os); });
    }
    std::printf("%s %s: %zu-fold accuracy %.2f%%, build %.3fs", report.dataset.c_str(),
                report.config_name.c_str(), a.folds, 100.0 * report.mean_accuracy,
                report.build_seconds);
    if (a.reps > 1) std::printf(" (mean of %zu reps, median %.3fs)", a.reps,
                                report.build_seconds_median);
    std::printf(", %llu split evaluations\n",
                static_cast<unsigned long long>(report.split_evaluations));
    std::printf("report: %s\n", out.string().c_str());
    return 0;
}

struct CompareArgs {
    ConfigFlags cfg;
    std::vector<std::string> data;
    std::string class_col = "last";
    std::string out;
    std::string format = "csv";
    std::size_t folds = 10;
    std::size_t reps = 3;
    std::string fold_seed_text;
};

int run_compare(const CompareArgs& a) {
    if (a.folds < 2) throw UsageError("--folds must be at least 2");
    if (a.reps < 1) throw UsageError("--reps must be at least 1");
    const auto configs = a.cfg.resolve_many();
    const std::uint64_t fold_seed = a.fold_seed_text.empty() ? parse_seed(a.cfg.seed_text)
                                                             : parse_seed(a.fold_seed_text);
    const auto table = ff::run_comparison(dataset_refs(a.data, a.class_col), configs, a.folds,
                                          fold_seed, a.reps);

    fs::path out = a.out.empty() ? fs::path("compare_" + std::to_string(a.folds) + "fold.csv")
                                 : fs::path(a.out);
    if (a.format == "json") {
        if (a.out.empty()) out = swap_ext_for_json(out);
        write_text_file(out, [&](std::ostream& os) { ff::write_comparison_json(table, os); });
    } else {
        write_text_file(out, [&](std::ostream& os) { ff::write_comparison_csv(table, os); });
    }
    for (std::size_t c = 0; c < table.config_names.size(); ++c)
        std::printf("%-12s mean accuracy %.2f%%, total build %.3fs, accuracy wins %zu, time "
                    "wins %zu\n",
                    table.config_names[c].c_str(), 100.0 * table.mean_accuracy[c],
                    table.total_seconds[c], table.accuracy_wins[c], table.time_wins[c]);
    for (const auto& row : table.rows)
        if (row.skipped)
            std::fprintf(stderr, "skipped %s: %s\n", row.dataset.c_str(), row.note.c_str());
    std::printf("report: %s\n", out.string().c_str());
    return 0;
}

struct SweepArgs {
    ConfigFlags cfg;
    std::vector<std::string> data;
    std::string class_col = "last";
    std::string out;
    std::string format = "csv";
    std::size_t folds = 10;
    std::string fold_seed_text;
    std::string a_list = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65";
};

int run_sweep(const SweepArgs& a) {
    if (a.folds < 2) throw UsageError("--folds must be at least 2");
    const ff::BuildConfig base = a.cfg.resolve();
    const auto a_values = parse_a_list(a.a_list);
    const std::uint64_t fold_seed =
        a.fold_seed_text.empty() ? base.seed : parse_seed(a.fold_seed_text);
    const auto result = ff::sweep_subbag(dataset_refs(a.data, a.class_col), a_values, base,
                                         a.folds, fold_seed);

    fs::path out = a.out.empty() ? fs::path("sweep_" + std::to_string(a.folds) + "fold.csv")
                                 : fs::path(a.out);
    if (a.format == "json") {
        if (a.out.empty()) out = swap_ext_for_json(out);
        write_text_file(out, [&](std::ostream& os) { ff::write_sweep_json(result, os); });
    } else {
        write_text_file(out, [&](std::ostream& os) { ff::write_sweep_csv(result, os); });
    }
    for (const auto& row : result.rows)
        std::printf("a=%-5g accuracy %.2f%%, total build %.3fs\n", row.a,
                    100.0 * row.mean_accuracy, row.total_seconds);
    for (const auto& [name, reason] : result.skipped)
        std::fprintf(stderr, "skipped %s: %s\n", name.c_str(), reason.c_str());
    std::printf("report: %s\n", out.string().c_str());
    return 0;
}

struct AblateArgs {
    ConfigFlags cfg;
    std::vector<std::string> data;
    std::string class_col = "last";
    std::string out;
    std::string format = "csv";
    std::size_t folds = 10;
    std::string fold_seed_text;
    std::string a_list = "0.5";
};

int run_ablate(const AblateArgs& a) {
    if (a.folds < 2) throw UsageError("--folds must be at least 2");
    const ff::BuildConfig base = a.cfg.resolve();
    const auto a_values = parse_a_list(a.a_list);
    const std::uint64_t fold_seed =
        a.fold_seed_text.empty() ? base.seed : parse_seed(a.fold_seed_text);
    const auto result = ff::ablate(dataset_refs(a.data, a.class_col), a_values, base, a.folds,
                                   fold_seed);

    fs::path out = a.out.empty() ? fs::path("ablate_" + std::to_string(a.folds) + "fold.csv")
                                 : fs::path(a.out);
    if (a.format == "json") {
        if (a.out.empty()) out = swap_ext_for_json(out);
        write_text_file(out, [&](std::ostream& os) { ff::write_ablation_json(result, os); });
    } else {
        write_text_file(out, [&](std::ostream& os) { ff::write_ablation_csv(result, os); });
    }
    for (const auto& row : result.rows)
        std::printf("%s a=%-5g %c(%s): accuracy %.2f%%, build %.3fs, %llu split evaluations\n",
                    row.dataset.c_str(), row.a, row.variant, row.config_name.c_str(),
                    100.0 * row.accuracy, row.seconds,
                    static_cast<unsigned long long>(row.split_evaluations));
    for (const auto& [name, reason] : result.skipped)
        std::fprintf(stderr, "skipped %s: %s\n", name.c_str(), reason.c_str());
    std::printf("report: %s\n", out.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision-forest trainer and benchmark harness"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "Train a forest and save the model as JSON");
    cmd_train->add_option("data", train.data, "Training data (.arff or .csv)")->required();
    cmd_train->add_option("--class-col", train.class_col,
                          "Class attribute name, or 'last'")->capture_default_str();
    train.cfg.add_to(*cmd_train);
    cmd_train->add_option("--out", train.out, "Model path (default: <dataset>_model.json)");
    cmd_train->add_flag("--no-timings", train.no_timings,
                        "Omit timing fields so identical models serialize identically");

    PredictArgs predict;
    auto* cmd_predict = app.add_subcommand("predict", "Score a dataset with a saved model");
    cmd_predict->add_option("data", predict.data, "Data to score (.arff or .csv)")->required();
    cmd_predict->add_option("--model", predict.model, "Model JSON from train")->required();
    cmd_predict->add_option("--out", predict.out,
                            "Predictions path (default: <dataset>_predictions.csv)");
    cmd_predict->add_option("--format", predict.format, "csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    CvArgs cv;
    auto* cmd_cv = app.add_subcommand("cv", "Stratified k-fold cross-validation of one config");
    cmd_cv->add_option("data", cv.data, "Dataset (.arff or .csv)")->required();
    cmd_cv->add_option("--class-col", cv.class_col, "Class attribute name, or 'last'")
        ->capture_default_str();
    cv.cfg.add_to(*cmd_cv);
    cmd_cv->add_option("--folds", cv.folds, "Folds")->capture_default_str();
    cmd_cv->add_option("--reps", cv.reps, "Timing repetitions (accuracy is unaffected)")
        ->capture_default_str();
    cmd_cv->add_option("--fold-seed", cv.fold_seed_text,
                       "Fold-assignment seed (default: the forest seed)");
    cmd_cv->add_option("--out", cv.out,
                       "Report path (default: <dataset>_<config>_<k>fold.csv)");
    cmd_cv->add_option("--format", cv.format, "csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    CompareArgs compare;
    auto* cmd_compare =
        app.add_subcommand("compare", "Race two or more preset configs across datasets");
    cmd_compare->add_option("data", compare.data, "Datasets (.arff or .csv)")->required();
    cmd_compare->add_option("--class-col", compare.class_col,
                            "Class attribute name, or 'last'")->capture_default_str();
    compare.cfg.add_to(*cmd_compare);
    cmd_compare->add_option("--folds", compare.folds, "Folds")->capture_default_str();
    cmd_compare->add_option("--reps", compare.reps, "Timing repetitions per build")
        ->capture_default_str();
    cmd_compare->add_option("--fold-seed", compare.fold_seed_text,
                            "Fold-assignment seed (default: --seed)");
    cmd_compare->add_option("--out", compare.out, "Report path (default: compare_<k>fold.csv)");
    cmd_compare->add_option("--format", compare.format, "csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    SweepArgs sweep;
    auto* cmd_sweep =
        app.add_subcommand("sweep", "Sweep the subbag fraction over datasets");
    cmd_sweep->add_option("data", sweep.data, "Datasets (.arff or .csv)")->required();
    cmd_sweep->add_option("--class-col", sweep.class_col, "Class attribute name, or 'last'")
        ->capture_default_str();
    sweep.cfg.add_to(*cmd_sweep);
    cmd_sweep->add_option("--folds", sweep.folds, "Folds")->capture_default_str();
    cmd_sweep->add_option("--fold-seed", sweep.fold_seed_text,
                          "Fold-assignment seed (default: --seed)");
    cmd_sweep->add_option("--a-list", sweep.a_list, "Comma-separated subbag fractions")
        ->capture_default_str();
    cmd_sweep->add_option("--out", sweep.out, "Report path (default: sweep_<k>fold.csv)");
    cmd_sweep->add_option("--format", sweep.format, "csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    AblateArgs ablate;
    auto* cmd_ablate = app.add_subcommand(
        "ablate", "Toggle split sampling and the subspace schedule independently");
    cmd_ablate->add_option("data", ablate.data, "Datasets (.arff or .csv)")->required();
    cmd_ablate->add_option("--class-col", ablate.class_col, "Class attribute name, or 'last'")
        ->capture_default_str();
    ablate.cfg.add_to(*cmd_ablate);
    cmd_ablate->add_option("--folds", ablate.folds, "Folds")->capture_default_str();
    cmd_ablate->add_option("--fold-seed", ablate.fold_seed_text,
                           "Fold-assignment seed (default: --seed)");
    cmd_ablate->add_option("--a-list", ablate.a_list, "Comma-separated subbag fractions")
        ->capture_default_str();
    cmd_ablate->add_option("--out", ablate.out, "Report path (default: ablate_<k>fold.csv)");
    cmd_ablate->add_option("--format", ablate.format, "csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
        if (cmd_train->parsed()) return run_train(train);
        if (cmd_predict->parsed()) return run_predict(predict);
        if (cmd_cv->parsed()) return run_cv(cv);
        if (cmd_compare->parsed()) return run_compare(compare);
        if (cmd_sweep->parsed()) return run_sweep(sweep);
        if (cmd_ablate->parsed()) return run_ablate(ablate);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
