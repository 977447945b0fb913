#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "fastforest/split.hpp"

using namespace fastforest;

namespace {

ClassCounts cc(std::initializer_list<std::size_t> counts) {
    ClassCounts c;
    c.counts = counts;
    return c;
}

/// Dataset with one class column and any number of numeric columns. Missing
/// cells are encoded as NaN in the inputs.
Dataset numeric_node(const std::vector<std::vector<double>>& columns,
                     const std::vector<std::size_t>& classes, std::size_t class_arity = 2) {
    std::vector<AttributeSchema> schema;
    for (std::size_t a = 0; a < columns.size(); ++a)
        schema.push_back({"f" + std::to_string(a), AttrKind::numeric, {}});
    std::vector<std::string> values;
    for (std::size_t c = 0; c < class_arity; ++c) values.push_back("c" + std::to_string(c));
    schema.push_back({"cls", AttrKind::categorical, values});
    std::vector<double> cells;
    for (std::size_t r = 0; r < classes.size(); ++r) {
        for (const auto& col : columns) cells.push_back(col[r]);
        cells.push_back(static_cast<double>(classes[r]));
    }
    return Dataset(std::move(schema), columns.size(), std::move(cells));
}

IndexSubset all_rows(const Dataset& ds) {
    IndexSubset s{&ds, {}};
    for (std::size_t r = 0; r < ds.n(); ++r) s.indices.push_back(static_cast<std::uint32_t>(r));
    return s;
}

/// Independent exhaustive search: every adjacent-distinct midpoint of every
/// attribute, scored through the public gain() contract (which re-validates
/// the partition) and the present-fraction penalty. No shared code with
/// best_split's incremental sweep.
double brute_force_best_gain(const IndexSubset& node, const std::vector<std::size_t>& attrs) {
    const Dataset& ds = *node.parent;
    const std::size_t classes = ds.class_count();
    double best = 0.0;
    for (const auto attr : attrs) {
        std::vector<std::pair<double, std::size_t>> present;
        for (const auto r : node.indices) {
            const double v = ds.cell(r, attr);
            if (!is_missing(v)) present.emplace_back(v, ds.class_id(r));
        }
        std::sort(present.begin(), present.end());
        const double penalty =
            static_cast<double>(present.size()) / static_cast<double>(node.size());
        ClassCounts parent(classes);
        for (const auto& [v, c] : present) ++parent.counts[c];
        for (std::size_t i = 1; i < present.size(); ++i) {
            if (present[i].first == present[i - 1].first) continue;
            const double thr = (present[i].first + present[i - 1].first) / 2.0;
            ClassCounts left(classes);
            ClassCounts right(classes);
            for (const auto& [v, c] : present) ++(v <= thr ? left : right).counts[c];
            const std::vector<ClassCounts> parts{left, right};
            best = std::max(best, gain(parent, parts) * penalty);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("entropy golden values", "[split]") {
    CHECK(entropy(cc({3, 3})) == Catch::Approx(1.0).margin(1e-12));
    CHECK(entropy(cc({6, 0})) == 0.0);
    CHECK(entropy(cc({0, 0})) == 0.0);
    CHECK(entropy(ClassCounts{}) == 0.0);
    CHECK(entropy(cc({9, 5})) == Catch::Approx(0.9402859586706309).margin(1e-12));
    CHECK(entropy(cc({1, 1, 1, 1})) == Catch::Approx(2.0).margin(1e-12));
    CHECK(entropy(cc({2, 3, 4})) ==
          Catch::Approx(1.5304930567574824).margin(1e-12));  // -sum(p*log2 p) by hand
}

TEST_CASE("entropy matches a direct evaluation on random counts", "[split]") {
    RngStream rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        ClassCounts c(1 + rng.below(6));
        for (auto& x : c.counts) x = rng.below(40);
        double expected = 0.0;
        const double total = static_cast<double>(c.total());
        if (total > 0)
            for (const auto x : c.counts)
                if (x > 0) expected -= (x / total) * std::log2(x / total);
        REQUIRE(entropy(c) == Catch::Approx(expected).margin(1e-12));
        REQUIRE(entropy(c) >= 0.0);
        REQUIRE(entropy(c) <= std::log2(std::max<double>(2.0, c.counts.size())) + 1e-12);
    }
}

TEST_CASE("weighted_info golden values", "[split]") {
    // Six records, classes {3, 3}, split into one record of class 0 versus
    // the remaining five: (1/6)*0 + (5/6)*entropy({2,3}).
    const std::vector<ClassCounts> parts{cc({1, 0}), cc({2, 3})};
    CHECK(weighted_info(parts) == Catch::Approx(0.8091255048476305).margin(1e-9));

    const std::vector<ClassCounts> empties{cc({0, 0}), cc({0, 0})};
    CHECK(weighted_info(empties) == 0.0);

    const std::vector<ClassCounts> one{cc({3, 3})};
    CHECK(weighted_info(one) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("gain golden values and contract", "[split]") {
    const ClassCounts parent = cc({3, 3});
    const std::vector<ClassCounts> parts{cc({1, 0}), cc({2, 3})};
    CHECK(gain(parent, parts) == Catch::Approx(0.1908744951523694).margin(1e-9));

    // A split that changes nothing gains nothing.
    const std::vector<ClassCounts> even{cc({1, 1}), cc({2, 2})};
    CHECK(gain(cc({3, 3}), even) == 0.0);
    const std::vector<ClassCounts> trivial{cc({3, 3})};
    CHECK(gain(parent, trivial) == 0.0);

    // Partitions must sum to the parent, class by class.
    const std::vector<ClassCounts> short_sum{cc({1, 0}), cc({1, 3})};
    CHECK_THROWS_AS(gain(parent, short_sum), std::invalid_argument);
    const std::vector<ClassCounts> crossed{cc({3, 0}), cc({0, 3})};
    CHECK_NOTHROW(gain(parent, crossed));
    const std::vector<ClassCounts> wrong_arity{cc({3, 3, 0})};
    CHECK_THROWS_AS(gain(parent, wrong_arity), std::invalid_argument);
}

TEST_CASE("gain is nonnegative and bounded by parent entropy", "[split]") {
    RngStream rng(77);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t arity = 2 + rng.below(3);
        ClassCounts parent(arity);
        const std::size_t nparts = 1 + rng.below(4);
        std::vector<ClassCounts> parts(nparts, ClassCounts(arity));
        for (std::size_t c = 0; c < arity; ++c) {
            const std::size_t total = rng.below(30);
            parent.counts[c] = total;
            // Deal this class's records to random parts.
            for (std::size_t i = 0; i < total; ++i) ++parts[rng.below(nparts)].counts[c];
        }
        if (parent.total() == 0) continue;
        const double g = gain(parent, parts);
        REQUIRE(g >= 0.0);
        REQUIRE(g <= entropy(parent) + 1e-12);
    }
}

TEST_CASE("candidate ranks: worked example", "[split]") {
    // Six distinct values at a six-record node: budget floor(log2 6)+1 = 3,
    // five midpoints, picks floor(t*5/4) for t = 1..3.
    const CandidateMode lsps{CandidateMode::Kind::lsps, 20};
    CHECK(candidate_midpoint_indices(6, 6, lsps) == std::vector<std::size_t>{1, 2, 3});

    const std::vector<double> values{10, 20, 30, 40, 50, 60};
    CHECK(numeric_candidates(values, 6, lsps) == std::vector<double>{25, 35, 45});

    const CandidateMode ex{CandidateMode::Kind::exhaustive, 20};
    CHECK(numeric_candidates(values, 6, ex) == std::vector<double>{15, 25, 35, 45, 55});
}

TEST_CASE("candidate ranks: budgets and subset property", "[split]") {
    const CandidateMode ex{CandidateMode::Kind::exhaustive, 20};
    const CandidateMode lsps{CandidateMode::Kind::lsps, 20};
    const CandidateMode fixed{CandidateMode::Kind::fixed_count, 20};

    CHECK(candidate_midpoint_indices(1, 100, ex).empty());
    CHECK(candidate_midpoint_indices(0, 100, lsps).empty());
    CHECK(candidate_midpoint_indices(5, 100, ex) == std::vector<std::size_t>{0, 1, 2, 3});

    RngStream rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t distinct = 2 + rng.below(200);
        const std::size_t records = distinct + rng.below(200);
        for (const auto& mode : {lsps, fixed}) {
            const auto idx = candidate_midpoint_indices(distinct, records, mode);
            const std::size_t budget = mode.kind == CandidateMode::Kind::lsps
                                           ? std::bit_width(records)
                                           : mode.cap;
            REQUIRE(idx.size() == std::min(budget, distinct - 1));
            for (std::size_t i = 0; i < idx.size(); ++i) {
                REQUIRE(idx[i] < distinct - 1);
                if (i > 0) REQUIRE(idx[i] > idx[i - 1]);  // distinct, ascending
            }
        }
    }

    // A budget at or above the midpoint count selects every midpoint.
    for (std::size_t distinct = 2; distinct <= 64; ++distinct) {
        const auto all = candidate_midpoint_indices(distinct, 100, ex);
        const auto capped = candidate_midpoint_indices(
            distinct, 1, CandidateMode{CandidateMode::Kind::fixed_count, 1000});
        REQUIRE(capped == all);
    }
}

TEST_CASE("lsps budget grows with the node, not the value count", "[split]") {
    const CandidateMode lsps{CandidateMode::Kind::lsps, 20};
    // floor(log2 records) + 1
    CHECK(candidate_midpoint_indices(1000, 1, lsps).size() == 1);
    CHECK(candidate_midpoint_indices(1000, 2, lsps).size() == 2);
    CHECK(candidate_midpoint_indices(1000, 3, lsps).size() == 2);
    CHECK(candidate_midpoint_indices(1000, 4, lsps).size() == 3);
    CHECK(candidate_midpoint_indices(1000, 1023, lsps).size() == 10);
    CHECK(candidate_midpoint_indices(1000, 1024, lsps).size() == 11);
}

TEST_CASE("best_split finds the obvious boundary", "[split]") {
    const Dataset ds = numeric_node({{25, 27, 30, 35, 40, 45}}, {0, 1, 1, 1, 0, 0});
    const IndexSubset node = all_rows(ds);
    SplitCounters counters;
    RngStream rng(1);
    const auto spec =
        best_split(node, std::vector<std::size_t>{0}, {CandidateMode::Kind::exhaustive, 20},
                   counters, rng);
    REQUIRE(spec.has_value());
    CHECK(spec->attribute == 0);
    CHECK(spec->numeric);
    CHECK(spec->threshold == 37.5);  // separates {25..35} from {40,45}
    CHECK(spec->gain == Catch::Approx(0.4591479170272448).margin(1e-9));
    CHECK(counters.split_evaluations == 5);  // six distinct values
}

TEST_CASE("best_split returns nothing when no split helps", "[split]") {
    SECTION("pure node") {
        const Dataset ds = numeric_node({{1, 2, 3, 4}}, {1, 1, 1, 1});
        SplitCounters counters;
        RngStream rng(1);
        CHECK_FALSE(best_split(all_rows(ds), std::vector<std::size_t>{0},
                               {CandidateMode::Kind::exhaustive, 20}, counters, rng)
                        .has_value());
    }
    SECTION("constant attribute") {
        const Dataset ds = numeric_node({{5, 5, 5, 5}}, {0, 1, 0, 1});
        SplitCounters counters;
        RngStream rng(1);
        CHECK_FALSE(best_split(all_rows(ds), std::vector<std::size_t>{0},
                               {CandidateMode::Kind::exhaustive, 20}, counters, rng)
                        .has_value());
        CHECK(counters.split_evaluations == 0);  // one value, no midpoints
    }
    SECTION("perfectly interleaved values gain nothing") {
        const Dataset ds = numeric_node({{1, 1, 2, 2}}, {0, 1, 0, 1});
        SplitCounters counters;
        RngStream rng(1);
        CHECK_FALSE(best_split(all_rows(ds), std::vector<std::size_t>{0},
                               {CandidateMode::Kind::exhaustive, 20}, counters, rng)
                        .has_value());
        CHECK(counters.split_evaluations == 1);
    }
}

TEST_CASE("best_split validates its inputs", "[split]") {
    const Dataset ds = numeric_node({{1, 2}}, {0, 1});
    SplitCounters counters;
    RngStream rng(1);
    CHECK_THROWS_AS(best_split(all_rows(ds), std::vector<std::size_t>{}, CandidateMode{},
                               counters, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(best_split(all_rows(ds), std::vector<std::size_t>{1}, CandidateMode{},
                               counters, rng),
                    std::invalid_argument);  // class attribute
    CHECK_THROWS_AS(best_split(IndexSubset{}, std::vector<std::size_t>{0}, CandidateMode{},
                               counters, rng),
                    std::invalid_argument);
}

TEST_CASE("missing cells shrink the gain by the present fraction", "[split]") {
    const double na = missing_cell();
    // Eight records; four have values that split the classes perfectly, four
    // are missing. Unpenalized gain would be 1 bit; the present fraction is
    // one half.
    const Dataset ds =
        numeric_node({{1, 2, 9, 10, na, na, na, na}}, {0, 0, 1, 1, 0, 1, 0, 1});
    SplitCounters counters;
    RngStream rng(1);
    const auto spec = best_split(all_rows(ds), std::vector<std::size_t>{0},
                                 {CandidateMode::Kind::exhaustive, 20}, counters, rng);
    REQUIRE(spec.has_value());
    CHECK(spec->gain == Catch::Approx(0.5).margin(1e-12));
    CHECK(spec->threshold == 5.5);
}

TEST_CASE("missing records follow the larger child", "[split]") {
    const double na = missing_cell();
    // Left of the best threshold: 4 records; right: 2. Missing goes left.
    const Dataset left_heavy =
        numeric_node({{1, 2, 3, 4, 9, 10, na}}, {0, 0, 0, 0, 1, 1, 0});
    SplitCounters counters;
    RngStream rng(1);
    auto spec = best_split(all_rows(left_heavy), std::vector<std::size_t>{0},
                           {CandidateMode::Kind::exhaustive, 20}, counters, rng);
    REQUIRE(spec.has_value());
    CHECK(spec->missing_child == 0);

    const Dataset right_heavy =
        numeric_node({{1, 2, 7, 8, 9, 10, na}}, {0, 0, 1, 1, 1, 1, 0});
    spec = best_split(all_rows(right_heavy), std::vector<std::size_t>{0},
                      {CandidateMode::Kind::exhaustive, 20}, counters, rng);
    REQUIRE(spec.has_value());
    CHECK(spec->missing_child == 1);
}

TEST_CASE("categorical splits count one evaluation and route by value", "[split]") {
    std::vector<AttributeSchema> schema{
        {"color", AttrKind::categorical, {"red", "green", "blue"}},
        {"cls", AttrKind::categorical, {"x", "y"}}};
    // red -> x, green -> y, blue -> x
    std::vector<double> cells{0, 0, 0, 0, 1, 1, 1, 1, 2, 0, 2, 0};
    const Dataset ds(std::move(schema), 1, std::move(cells));
    SplitCounters counters;
    RngStream rng(1);
    const auto spec = best_split(all_rows(ds), std::vector<std::size_t>{0},
                                 {CandidateMode::Kind::exhaustive, 20}, counters, rng);
    REQUIRE(spec.has_value());
    CHECK_FALSE(spec->numeric);
    CHECK(spec->child_count == 3);
    CHECK(spec->gain == Catch::Approx(entropy(cc({4, 2}))).margin(1e-9));  // pure children
    CHECK(counters.split_evaluations == 1);
    CHECK(spec->route(0.0) == 0);
    CHECK(spec->route(2.0) == 2);
    CHECK(spec->route(missing_cell()) == spec->missing_child);
    CHECK(spec->missing_child == 0);  // all children tie at 2 records; lowest index wins
}

TEST_CASE("exact gain ties break uniformly at random but reproducibly", "[split]") {
    // Two identical attributes: every candidate on one has an exact twin on
    // the other, so attribute choice is decided purely by the tie-break.
    const std::vector<double> col{1, 2, 3, 4, 5, 6};
    const Dataset ds = numeric_node({col, col}, {0, 0, 0, 1, 1, 1});
    const std::vector<std::size_t> attrs{0, 1};

    std::map<std::size_t, int> chosen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitCounters counters;
        RngStream rng(seed);
        const auto spec =
            best_split(all_rows(ds), attrs, {CandidateMode::Kind::exhaustive, 20}, counters, rng);
        REQUIRE(spec.has_value());
        CHECK(spec->threshold == 3.5);
        ++chosen[spec->attribute];
    }
    CHECK(chosen[0] > 60);
    CHECK(chosen[1] > 60);

    // Same seed, same answer.
    SplitCounters c1, c2;
    RngStream r1(17), r2(17);
    const auto s1 =
        best_split(all_rows(ds), attrs, {CandidateMode::Kind::exhaustive, 20}, c1, r1);
    const auto s2 =
        best_split(all_rows(ds), attrs, {CandidateMode::Kind::exhaustive, 20}, c2, r2);
    REQUIRE(s1.has_value());
    REQUIRE(s2.has_value());
    CHECK(s1->attribute == s2->attribute);
    CHECK(s1->threshold == s2->threshold);
}

TEST_CASE("exhaustive best_split matches the brute-force oracle", "[split][oracle]") {
    RngStream gen(2024);
    int split_found = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 2 + gen.below(63);
        const std::size_t nattrs = 1 + gen.below(6);
        const std::size_t arity = 2 + gen.below(2);
        std::vector<std::vector<double>> cols(nattrs, std::vector<double>(n));
        std::vector<std::size_t> classes(n);
        for (std::size_t r = 0; r < n; ++r) {
            classes[r] = gen.below(arity);
            for (auto& col : cols)
                // Small value pool forces duplicates and ties; ~10% missing.
                col[r] = gen.below(10) == 0 ? missing_cell()
                                            : static_cast<double>(gen.below(8)) * 0.5;
        }
        const Dataset ds = numeric_node(cols, classes, arity);
        std::vector<std::size_t> attrs(nattrs);
        for (std::size_t a = 0; a < nattrs; ++a) attrs[a] = a;

        const double oracle = brute_force_best_gain(all_rows(ds), attrs);
        SplitCounters counters;
        RngStream rng(trial);
        const auto spec = best_split(all_rows(ds), attrs,
                                     {CandidateMode::Kind::exhaustive, 20}, counters, rng);
        if (oracle > 1e-9) {
            REQUIRE(spec.has_value());
            REQUIRE(spec->gain == Catch::Approx(oracle).margin(1e-12));
            ++split_found;
        } else {
            REQUIRE_FALSE(spec.has_value());
        }

        // The sampled search can never beat the exhaustive one.
        SplitCounters lsps_counters;
        RngStream lsps_rng(trial);
        const auto lsps = best_split(all_rows(ds), attrs, {CandidateMode::Kind::lsps, 20},
                                     lsps_counters, lsps_rng);
        if (lsps) REQUIRE(lsps->gain <= oracle + 1e-12);
        REQUIRE(lsps_counters.split_evaluations <= counters.split_evaluations);
    }
    CHECK(split_found > 20);  // the generator must exercise the real path
}

TEST_CASE("lsps thresholds are a subset of the exhaustive thresholds", "[split]") {
    RngStream gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t distinct = 2 + gen.below(60);
        std::set<double> pool;
        while (pool.size() < distinct) pool.insert(static_cast<double>(gen.below(1000)));
        const std::vector<double> values(pool.begin(), pool.end());
        const std::size_t records = distinct + gen.below(100);

        const auto ex = numeric_candidates(values, records, {CandidateMode::Kind::exhaustive, 20});
        const std::set<double> ex_set(ex.begin(), ex.end());
        for (const auto& mode :
             {CandidateMode{CandidateMode::Kind::lsps, 20},
              CandidateMode{CandidateMode::Kind::fixed_count, 5}}) {
            for (const auto t : numeric_candidates(values, records, mode))
                REQUIRE(ex_set.count(t) == 1);
        }
    }
}
