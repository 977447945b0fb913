#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastforest/forest.hpp"
#include "fastforest/io.hpp"

namespace fastforest {

/// Everything measured by one k-fold cross-validation of one config.
struct EvalReport {
    std::string dataset;
    std::string config_name;
    BuildConfig config{};
    std::size_t folds = 0;
    std::uint64_t fold_seed = 0;
    std::size_t timing_reps = 1;
    std::vector<std::string> class_values;

    std::vector<double> fold_accuracy;                // fraction, per fold
    std::vector<double> fold_build_seconds;           // first rep, per fold
    std::vector<std::uint64_t> fold_split_evaluations;
    std::vector<std::vector<std::vector<std::size_t>>> fold_confusion;  // [fold][actual][predicted]

    double mean_accuracy = 0.0;
    std::vector<double> rep_seconds;     // total build seconds, per timing rep
    double build_seconds = 0.0;          // mean of rep_seconds
    double build_seconds_median = 0.0;
    std::uint64_t split_evaluations = 0; // total over folds
};

/// Stratified k-fold cross-validation. Models are deterministic in
/// (fold_seed, config.seed), so repetitions rebuild identical forests and
/// only the clock readings differ; accuracy is scored once. The headline
/// build_seconds is the mean over repetitions of the per-run total.
inline EvalReport cross_validate(const Dataset& ds, const BuildConfig& config, std::size_t k,
                                 std::uint64_t fold_seed, std::size_t timing_reps = 1,
                                 std::string dataset_name = "", std::string config_name = "") {
    if (timing_reps == 0) throw std::invalid_argument("cross_validate: zero timing reps");
    const FoldPlan plan = stratified_folds(ds, k, fold_seed);

    EvalReport report;
    report.dataset = std::move(dataset_name);
    report.config_name = std::move(config_name);
    report.config = config;
    report.folds = k;
    report.fold_seed = fold_seed;
    report.timing_reps = timing_reps;
    report.class_values = ds.class_attr().values;

    const std::size_t classes = ds.class_count();
    for (std::size_t rep = 0; rep < timing_reps; ++rep) {
        double rep_total = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            const Dataset train = materialize_subset(plan.folds[f].train);
            const ForestModel model = build_forest(train, config);
            rep_total += model.wall_seconds;
            if (rep != 0) continue;

            report.fold_build_seconds.push_back(model.wall_seconds);
            report.fold_split_evaluations.push_back(model.total_split_evaluations());
            report.split_evaluations += model.total_split_evaluations();

            std::vector<std::vector<std::size_t>> confusion(
                classes, std::vector<std::size_t>(classes, 0));
            std::size_t hits = 0;
            for (const auto r : plan.folds[f].test.indices) {
                const auto predicted =
                    predict(model, std::span<const double>(ds.row(r), ds.attr_count()));
                const auto actual = ds.class_id(r);
                ++confusion[actual][predicted];
                if (predicted == actual) ++hits;
            }
            report.fold_accuracy.push_back(static_cast<double>(hits) /
                                           static_cast<double>(plan.folds[f].test.size()));
            report.fold_confusion.push_back(std::move(confusion));
        }
        report.rep_seconds.push_back(rep_total);
    }

    for (const auto acc : report.fold_accuracy) report.mean_accuracy += acc;
    report.mean_accuracy /= static_cast<double>(k);
    for (const auto s : report.rep_seconds) report.build_seconds += s;
    report.build_seconds /= static_cast<double>(timing_reps);
    auto sorted = report.rep_seconds;
    std::sort(sorted.begin(), sorted.end());
    report.build_seconds_median = timing_reps % 2 == 1
                                      ? sorted[timing_reps / 2]
                                      : (sorted[timing_reps / 2 - 1] + sorted[timing_reps / 2]) / 2.0;
    return report;
}

struct DatasetRef {
    std::string name;  // report label; defaults to the file stem when empty
    std::filesystem::path path;
    std::string class_spec = "last";

    std::string label() const { return name.empty() ? path.stem().string() : name; }
};

struct NamedConfig {
    std::string name;
    BuildConfig config{};
};

struct ComparisonCell {
    double accuracy = 0.0;  // fraction
    double seconds = 0.0;
    std::uint64_t split_evaluations = 0;
};

struct ComparisonRow {
    std::string dataset;
    bool skipped = false;
    std::string note;  // reason when skipped
    std::vector<ComparisonCell> cells;
    std::size_t accuracy_winner = 0;
    bool accuracy_tie = false;
    std::size_t time_winner = 0;
    bool time_tie = false;
};

struct ComparisonTable {
    std::vector<std::string> config_names;
    std::size_t folds = 0;
    std::size_t timing_reps = 1;
    std::vector<ComparisonRow> rows;
    std::size_t scored_rows = 0;
    std::vector<double> mean_accuracy;      // per config, over scored rows
    std::vector<double> total_seconds;      // per config
    std::vector<std::size_t> accuracy_wins; // outright wins, ties count for nobody
    std::vector<std::size_t> time_wins;
};

/// Cross-validate every config on every dataset and tabulate accuracy and
/// build time side by side. A dataset that fails to load becomes a skipped
/// row carrying the reason; it scores for nobody. Ties (exact equality) give
/// the win to nobody.
inline ComparisonTable run_comparison(const std::vector<DatasetRef>& datasets,
                                      const std::vector<NamedConfig>& configs, std::size_t k,
                                      std::uint64_t fold_seed, std::size_t timing_reps = 3) {
    if (datasets.empty()) throw std::invalid_argument("run_comparison: no datasets");
    if (configs.empty()) throw std::invalid_argument("run_comparison: no configs");
    for (std::size_t i = 0; i < configs.size(); ++i)
        for (std::size_t j = i + 1; j < configs.size(); ++j)
            if (configs[i].name == configs[j].name)
                throw std::invalid_argument("run_comparison: duplicate config name '" +
                                            configs[i].name + "'");

    ComparisonTable table;
    table.folds = k;
    table.timing_reps = timing_reps;
    for (const auto& c : configs) table.config_names.push_back(c.name);
    table.mean_accuracy.assign(configs.size(), 0.0);
    table.total_seconds.assign(configs.size(), 0.0);
    table.accuracy_wins.assign(configs.size(), 0);
    table.time_wins.assign(configs.size(), 0);

    for (const auto& ref : datasets) {
        ComparisonRow row;
        row.dataset = ref.label();
        Dataset ds;
        try {
            ds = load_dataset(ref.path, ref.class_spec);
        } catch (const std::exception& e) {
            row.skipped = true;
            row.note = e.what();
            table.rows.push_back(std::move(row));
            continue;
        }
        for (const auto& named : configs) {
            const EvalReport r = cross_validate(ds, named.config, k, fold_seed, timing_reps,
                                                row.dataset, named.name);
            row.cells.push_back({r.mean_accuracy, r.build_seconds, r.split_evaluations});
        }
        for (std::size_t c = 1; c < row.cells.size(); ++c) {
            if (row.cells[c].accuracy > row.cells[row.accuracy_winner].accuracy)
                row.accuracy_winner = c;
            if (row.cells[c].seconds < row.cells[row.time_winner].seconds) row.time_winner = c;
        }
        std::size_t acc_at_best = 0;
        std::size_t time_at_best = 0;
        for (const auto& cell : row.cells) {
            if (cell.accuracy == row.cells[row.accuracy_winner].accuracy) ++acc_at_best;
            if (cell.seconds == row.cells[row.time_winner].seconds) ++time_at_best;
        }
        row.accuracy_tie = acc_at_best > 1;
        row.time_tie = time_at_best > 1;
        if (!row.accuracy_tie) ++table.accuracy_wins[row.accuracy_winner];
        if (!row.time_tie) ++table.time_wins[row.time_winner];
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            table.mean_accuracy[c] += row.cells[c].accuracy;
            table.total_seconds[c] += row.cells[c].seconds;
        }
        ++table.scored_rows;
        table.rows.push_back(std::move(row));
    }
    if (table.scored_rows > 0)
        for (auto& acc : table.mean_accuracy) acc /= static_cast<double>(table.scored_rows);
    return table;
}

struct SweepRow {
    double a = 0.0;
    double mean_accuracy = 0.0;  // fraction, over datasets of per-dataset CV means
    double total_seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::pair<std::string, std::string>> skipped;  // (dataset, reason)
};

/// Re-run cross-validation with the subbag fraction swept over a_values,
/// everything else taken from `base`. Every a must be in (0, 1].
inline SweepResult sweep_subbag(const std::vector<DatasetRef>& datasets,
                                std::span<const double> a_values, const BuildConfig& base,
                                std::size_t k, std::uint64_t fold_seed) {
    if (datasets.empty()) throw std::invalid_argument("sweep_subbag: no datasets");
    for (const auto a : a_values)
        if (!(a > 0.0) || a > 1.0)
            throw std::invalid_argument("sweep_subbag: subbag fraction must be in (0, 1]");

    SweepResult result;
    std::vector<std::pair<std::string, Dataset>> loaded;
    for (const auto& ref : datasets) {
        try {
            loaded.emplace_back(ref.label(), load_dataset(ref.path, ref.class_spec));
        } catch (const std::exception& e) {
            result.skipped.emplace_back(ref.label(), e.what());
        }
    }
    if (loaded.empty()) throw std::runtime_error("sweep_subbag: no loadable datasets");

    for (const auto a : a_values) {
        BuildConfig config = base;
        config.sampler = {SamplerMode::Kind::subbag, a};
        SweepRow row;
        row.a = a;
        for (const auto& [name, ds] : loaded) {
            const EvalReport r = cross_validate(ds, config, k, fold_seed, 1, name, "sweep");
            row.mean_accuracy += r.mean_accuracy;
            row.total_seconds += r.build_seconds;
        }
        row.mean_accuracy /= static_cast<double>(loaded.size());
        result.rows.push_back(row);
    }
    return result;
}

struct AblationRow {
    std::string dataset;
    double a = 0.0;
    char variant = 'A';
    std::string config_name;
    double accuracy = 0.0;  // fraction
    double seconds = 0.0;
    std::uint64_t split_evaluations = 0;
};

struct AblationResult {
    std::vector<AblationRow> rows;
    std::vector<std::pair<std::string, std::string>> skipped;
};

/// Four-way ablation at each subbag fraction. A is the full stack (log
/// split-point sampling plus the restricted-subspace schedule), B drops the
/// subspace schedule, C drops the split-point sampling, D drops both. Tree
/// count, seed, and growth limits come from `base`.
inline AblationResult ablate(const std::vector<DatasetRef>& datasets,
                             std::span<const double> a_values, const BuildConfig& base,
                             std::size_t k, std::uint64_t fold_seed) {
    if (datasets.empty()) throw std::invalid_argument("ablate: no datasets");
    for (const auto a : a_values)
        if (!(a > 0.0) || a > 1.0)
            throw std::invalid_argument("ablate: subbag fraction must be in (0, 1]");

    AblationResult result;
    std::vector<std::pair<std::string, Dataset>> loaded;
    for (const auto& ref : datasets) {
        try {
            loaded.emplace_back(ref.label(), load_dataset(ref.path, ref.class_spec));
        } catch (const std::exception& e) {
            result.skipped.emplace_back(ref.label(), e.what());
        }
    }
    if (loaded.empty()) throw std::runtime_error("ablate: no loadable datasets");

    for (const auto& [name, ds] : loaded) {
        for (const auto a : a_values) {
            BuildConfig full = base;
            full.sampler = {SamplerMode::Kind::subbag, a};
            full.split_mode = {CandidateMode::Kind::lsps, base.split_mode.cap};
            full.subspace = {SubspaceMode::Kind::drs, base.subspace.divisor};

            struct Variant {
                char tag;
                const char* name;
                CandidateMode::Kind split;
                SubspaceMode::Kind subspace;
            };
            static constexpr Variant kVariants[] = {
                {'A', "full", CandidateMode::Kind::lsps, SubspaceMode::Kind::drs},
                {'B', "no-subspace-schedule", CandidateMode::Kind::lsps,
                 SubspaceMode::Kind::static_k},
                {'C', "no-split-sampling", CandidateMode::Kind::exhaustive,
                 SubspaceMode::Kind::drs},
                {'D', "neither", CandidateMode::Kind::exhaustive, SubspaceMode::Kind::static_k},
            };
            for (const auto& v : kVariants) {
                BuildConfig config = full;
                config.split_mode.kind = v.split;
                config.subspace.kind = v.subspace;
                // The ablation is only meaningful if variants differ from the
                // full stack in nothing but these two switches.
                BuildConfig check = config;
                check.split_mode = full.split_mode;
                check.subspace = full.subspace;
                if (!(check == full))
                    throw std::logic_error("ablate: variant drifted from the full config");

                const EvalReport r = cross_validate(ds, config, k, fold_seed, 1, name, v.name);
                AblationRow row;
                row.dataset = name;
                row.a = a;
                row.variant = v.tag;
                row.config_name = v.name;
                row.accuracy = r.mean_accuracy;
                row.seconds = r.build_seconds;
                row.split_evaluations = r.split_evaluations;
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string pct(double fraction) { return fmt("%.2f", fraction * 100.0); }
inline std::string secs(double s) { return fmt("%.3f", s); }

}  // namespace detail

/// Report file naming rule shared by the CLI commands.
inline std::string report_filename(const std::string& dataset, const std::string& config_name,
                                   std::size_t k) {
    return dataset + "_" + config_name + "_" + std::to_string(k) + "fold.csv";
}

/// Per-fold rows, then a summary row whose seconds column holds the headline
/// (mean over timing repetitions) total build time.
inline void write_cv_csv(const EvalReport& r, std::ostream& out) {
    out << "dataset,config,fold,accuracy_pct,build_seconds,split_evaluations\n";
    for (std::size_t f = 0; f < r.folds; ++f)
        out << r.dataset << ',' << r.config_name << ',' << f + 1 << ','
            << detail::pct(r.fold_accuracy[f]) << ',' << detail::secs(r.fold_build_seconds[f])
            << ',' << r.fold_split_evaluations[f] << '\n';
    out << r.dataset << ',' << r.config_name << ",mean," << detail::pct(r.mean_accuracy) << ','
        << detail::secs(r.build_seconds) << ',' << r.split_evaluations << '\n';
}

inline void write_cv_json(const EvalReport& r, std::ostream& out) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["config"] = r.config_name;
    j["folds"] = r.folds;
    j["fold_seed"] = r.fold_seed;
    j["timing_reps"] = r.timing_reps;
    j["classes"] = r.class_values;
    j["fold_accuracy"] = r.fold_accuracy;
    j["fold_build_seconds"] = r.fold_build_seconds;
    j["fold_split_evaluations"] = r.fold_split_evaluations;
    j["fold_confusion"] = r.fold_confusion;
    j["mean_accuracy"] = r.mean_accuracy;
    j["rep_seconds"] = r.rep_seconds;
    j["build_seconds"] = r.build_seconds;
    j["build_seconds_median"] = r.build_seconds_median;
    j["split_evaluations"] = r.split_evaluations;
    out << j.dump(1) << '\n';
}

inline void write_comparison_json(const ComparisonTable& t, std::ostream& out) {
    nlohmann::ordered_json j;
    j["configs"] = t.config_names;
    j["folds"] = t.folds;
    j["timing_reps"] = t.timing_reps;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json jr;
        jr["dataset"] = row.dataset;
        if (row.skipped) {
            jr["skipped"] = row.note;
        } else {
            auto cells = nlohmann::ordered_json::array();
            for (const auto& cell : row.cells)
                cells.push_back({{"accuracy", cell.accuracy},
                                 {"build_seconds", cell.seconds},
                                 {"split_evaluations", cell.split_evaluations}});
            jr["cells"] = std::move(cells);
            jr["accuracy_winner"] =
                row.accuracy_tie ? "tie" : t.config_names[row.accuracy_winner];
            jr["time_winner"] = row.time_tie ? "tie" : t.config_names[row.time_winner];
        }
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    j["mean_accuracy"] = t.mean_accuracy;
    j["total_seconds"] = t.total_seconds;
    j["accuracy_wins"] = t.accuracy_wins;
    j["time_wins"] = t.time_wins;
    out << j.dump(1) << '\n';
}

inline void write_sweep_json(const SweepResult& s, std::ostream& out) {
    nlohmann::ordered_json j;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : s.rows)
        rows.push_back({{"a", row.a},
                        {"mean_accuracy", row.mean_accuracy},
                        {"total_seconds", row.total_seconds}});
    j["rows"] = std::move(rows);
    auto skipped = nlohmann::ordered_json::array();
    for (const auto& [name, reason] : s.skipped)
        skipped.push_back({{"dataset", name}, {"reason", reason}});
    j["skipped"] = std::move(skipped);
    out << j.dump(1) << '\n';
}

inline void write_ablation_json(const AblationResult& a, std::ostream& out) {
    nlohmann::ordered_json j;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : a.rows)
        rows.push_back({{"dataset", row.dataset},
                        {"a", row.a},
                        {"variant", std::string(1, row.variant)},
                        {"config", row.config_name},
                        {"accuracy", row.accuracy},
                        {"build_seconds", row.seconds},
                        {"split_evaluations", row.split_evaluations}});
    j["rows"] = std::move(rows);
    auto skipped = nlohmann::ordered_json::array();
    for (const auto& [name, reason] : a.skipped)
        skipped.push_back({{"dataset", name}, {"reason", reason}});
    j["skipped"] = std::move(skipped);
    out << j.dump(1) << '\n';
}

/// Long-format comparison: one row per (dataset, config), "win"/"tie" flags
/// per metric, then per-config summary rows labelled ALL.
inline void write_comparison_csv(const ComparisonTable& t, std::ostream& out) {
    out << "dataset,config,accuracy_pct,build_seconds,split_evaluations,accuracy_result,"
           "time_result,note\n";
    for (const auto& row : t.rows) {
        if (row.skipped) {
            out << row.dataset << ",,,,,,," << detail::csv_escape("skipped: " + row.note) << '\n';
            continue;
        }
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            const char* acc = row.accuracy_tie ? "tie" : (c == row.accuracy_winner ? "win" : "");
            const char* tim = row.time_tie ? "tie" : (c == row.time_winner ? "win" : "");
            out << row.dataset << ',' << t.config_names[c] << ','
                << detail::pct(row.cells[c].accuracy) << ',' << detail::secs(row.cells[c].seconds)
                << ',' << row.cells[c].split_evaluations << ',' << acc << ',' << tim << ",\n";
        }
    }
    for (std::size_t c = 0; c < t.config_names.size(); ++c)
        out << "ALL," << t.config_names[c] << ',' << detail::pct(t.mean_accuracy[c]) << ','
            << detail::secs(t.total_seconds[c]) << ",,wins=" << t.accuracy_wins[c]
            << ",wins=" << t.time_wins[c] << ",scored=" << t.scored_rows << '\n';
}

inline void write_sweep_csv(const SweepResult& s, std::ostream& out) {
    out << "a,mean_accuracy_pct,total_build_seconds\n";
    for (const auto& row : s.rows)
        out << detail::fmt("%g", row.a) << ',' << detail::pct(row.mean_accuracy) << ','
            << detail::secs(row.total_seconds) << '\n';
    for (const auto& [name, reason] : s.skipped)
        out << detail::csv_escape(name) << ",," << detail::csv_escape("skipped: " + reason)
            << '\n';
}

inline void write_ablation_csv(const AblationResult& a, std::ostream& out) {
    out << "dataset,a,variant,config,accuracy_pct,build_seconds,split_evaluations\n";
    for (const auto& row : a.rows)
        out << row.dataset << ',' << detail::fmt("%g", row.a) << ',' << row.variant << ','
            << row.config_name << ',' << detail::pct(row.accuracy) << ','
            << detail::secs(row.seconds) << ',' << row.split_evaluations << '\n';
    for (const auto& [name, reason] : a.skipped)
        out << detail::csv_escape(name) << ",,,,,," << detail::csv_escape("skipped: " + reason)
            << '\n';
}

}  // namespace fastforest
