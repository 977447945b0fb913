#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "fastforest/tree.hpp"

using namespace fastforest;

namespace {

Dataset mortgage() {
    std::vector<AttributeSchema> schema{{"age", AttrKind::numeric, {}},
                                        {"approved", AttrKind::categorical, {"yes", "no"}}};
    // yes at 25, 40, 45; no in between.
    std::vector<double> cells{25, 0, 27, 1, 30, 1, 35, 1, 40, 0, 45, 0};
    return Dataset(std::move(schema), 1, std::move(cells));
}

IndexSubset all_rows(const Dataset& ds) {
    IndexSubset s{&ds, {}};
    for (std::size_t r = 0; r < ds.n(); ++r) s.indices.push_back(static_cast<std::uint32_t>(r));
    return s;
}

TreeBuildContext ctx_for(const Dataset& ds, std::uint64_t seed, std::size_t min_leaf = 1,
                         std::size_t max_depth = 0, std::size_t force_k = 0) {
    TreeBuildContext ctx;
    ctx.train_size = ds.n();
    ctx.total_attrs = ds.nonclass_attr_count();
    ctx.min_leaf = min_leaf;
    ctx.max_depth = max_depth;
    ctx.force_k = force_k;
    ctx.rng = RngStream(seed);
    return ctx;
}

std::span<const double> row_of(const Dataset& ds, std::size_t r) {
    return {ds.row(r), ds.attr_count()};
}

bool trees_equal(const Tree& a, const Tree& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const TreeNode& x = a.node(i);
        const TreeNode& y = b.node(i);
        if (x.leaf != y.leaf) return false;
        if (x.leaf) {
            if (x.majority != y.majority || !(x.dist == y.dist)) return false;
        } else {
            if (x.split.attribute != y.split.attribute || x.split.numeric != y.split.numeric ||
                x.split.threshold != y.split.threshold ||
                x.split.missing_child != y.split.missing_child || x.children != y.children)
                return false;
        }
    }
    return true;
}

/// Mixed-type dataset with duplicate-heavy values and ~10% missing cells.
Dataset random_dataset(RngStream& gen, std::size_t n, std::size_t numeric_attrs,
                       std::size_t arity) {
    std::vector<AttributeSchema> schema;
    for (std::size_t a = 0; a < numeric_attrs; ++a)
        schema.push_back({"f" + std::to_string(a), AttrKind::numeric, {}});
    schema.push_back({"cat", AttrKind::categorical, {"u", "v", "w"}});
    std::vector<std::string> values;
    for (std::size_t c = 0; c < arity; ++c) values.push_back("c" + std::to_string(c));
    schema.push_back({"cls", AttrKind::categorical, values});
    std::vector<double> cells;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t a = 0; a < numeric_attrs; ++a)
            cells.push_back(gen.below(10) == 0 ? missing_cell()
                                               : static_cast<double>(gen.below(6)));
        cells.push_back(gen.below(12) == 0 ? missing_cell()
                                           : static_cast<double>(gen.below(3)));
        cells.push_back(static_cast<double>(gen.below(arity)));
    }
    return Dataset(std::move(schema), numeric_attrs + 1, std::move(cells));
}

}  // namespace

TEST_CASE("subspace_size exact values", "[tree]") {
    const SubspaceMode st{SubspaceMode::Kind::static_k, 8};
    const SubspaceMode dy{SubspaceMode::Kind::dynamic_k, 8};
    const SubspaceMode drs{SubspaceMode::Kind::drs, 8};

    // Static: floor(log2 m) + 1, any node size.
    CHECK(subspace_size(16, 1000, 1000, st) == 5);
    CHECK(subspace_size(16, 1000, 3, st) == 5);
    CHECK(subspace_size(1, 10, 5, st) == 1);
    CHECK(subspace_size(100, 10, 5, st) == 7);

    // Root node keeps the static width under the scheduled modes.
    CHECK(subspace_size(100, 10000, 10000, drs) == 7);

    // Deep node: floor(log2(m * d / d_i)) + 1.
    CHECK(subspace_size(100, 10000, 100, drs) == 14);
    CHECK(subspace_size(100, 10000, 100, dy) == 14);

    // Above d/8 the schedule has not kicked in yet.
    CHECK(subspace_size(16, 1000, 250, drs) == 5);
    CHECK(subspace_size(16, 1000, 126, drs) == 5);  // 126 * 8 = 1008 > 1000
    CHECK(subspace_size(16, 1000, 125, drs) == 8);  // 125 * 8 = 1000: dynamic, 16000/125 = 128
    CHECK(subspace_size(16, 1000, 500, dy) == 6);    // dynamic widens immediately

    // The widened size is capped at the attribute count.
    CHECK(subspace_size(4, 1024, 1, drs) == 4);
    CHECK(subspace_size(4, 1024, 1, dy) == 4);
    CHECK(subspace_size(4, 1024, 1, st) == 3);

    // A divisor change moves the switch point.
    const SubspaceMode drs4{SubspaceMode::Kind::drs, 4};
    CHECK(subspace_size(16, 1000, 250, drs4) == 7);  // 250 * 4 = 1000, dynamic
    CHECK(subspace_size(16, 1000, 251, drs4) == 5);
}

TEST_CASE("subspace_size rejects bad arguments", "[tree]") {
    const SubspaceMode drs{SubspaceMode::Kind::drs, 8};
    CHECK_THROWS_AS(subspace_size(0, 10, 5, drs), std::invalid_argument);
    CHECK_THROWS_AS(subspace_size(4, 10, 0, drs), std::invalid_argument);
    CHECK_THROWS_AS(subspace_size(4, 10, 11, drs), std::invalid_argument);
    CHECK_THROWS_AS(subspace_size(4, 10, 5, SubspaceMode{SubspaceMode::Kind::drs, 0}),
                    std::invalid_argument);
    CHECK_NOTHROW(subspace_size(4, 10, 5, SubspaceMode{SubspaceMode::Kind::static_k, 0}));
}

TEST_CASE("subspace_size properties", "[tree]") {
    RngStream gen(3);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = 1 + gen.below(200);
        const std::size_t d = 1 + gen.below(5000);
        const std::size_t d_i = 1 + gen.below(d);
        const std::size_t divisor = 1 + gen.below(16);
        const std::size_t st = subspace_size(m, d, d_i, {SubspaceMode::Kind::static_k, divisor});
        const std::size_t dy = subspace_size(m, d, d_i, {SubspaceMode::Kind::dynamic_k, divisor});
        const std::size_t dr = subspace_size(m, d, d_i, {SubspaceMode::Kind::drs, divisor});

        for (const auto k : {st, dy, dr}) {
            REQUIRE(k >= 1);
            REQUIRE(k <= m);
        }
        // Nodes never search fewer attributes than the static width, and the
        // switched mode always agrees with one of its two halves.
        REQUIRE(dy >= st);
        REQUIRE(dr == (d_i * divisor > d ? st : dy));

        // Shrinking the node never narrows the dynamic sample.
        if (d_i > 1)
            REQUIRE(subspace_size(m, d, d_i - 1, {SubspaceMode::Kind::dynamic_k, divisor}) >= dy);
    }
}

TEST_CASE("a fully grown tree fits its training data", "[tree]") {
    const Dataset ds = mortgage();
    auto ctx = ctx_for(ds, 42);
    SplitCounters counters;
    const Tree tree = build_tree(all_rows(ds), ctx, {CandidateMode::Kind::exhaustive, 20},
                                 counters);

    for (std::size_t r = 0; r < ds.n(); ++r) {
        const auto pred = predict_record(tree, row_of(ds, r));
        REQUIRE(pred.class_id == ds.class_id(r));
        REQUIRE(pred.dist != nullptr);
        REQUIRE(pred.dist->pure());
    }

    // Root picks the widest class boundary; children always follow parents in
    // node order so the vector layout itself proves there are no cycles.
    REQUIRE_FALSE(tree.root().leaf);
    CHECK(tree.root().split.attribute == 0);
    CHECK(tree.root().split.threshold == 37.5);
    CHECK(counters.split_evaluations > 0);
    for (std::size_t id = 0; id < tree.size(); ++id)
        if (!tree.node(id).leaf)
            for (const auto c : tree.node(id).children) REQUIRE(c > id);
}

TEST_CASE("every training record lands on a leaf holding its count", "[tree]") {
    RngStream gen(99);
    for (int trial = 0; trial < 25; ++trial) {
        const Dataset ds = random_dataset(gen, 10 + gen.below(120), 1 + gen.below(4),
                                          2 + gen.below(2));
        auto ctx = ctx_for(ds, 1000 + trial);
        SplitCounters counters;
        const Tree tree = build_tree(all_rows(ds), ctx, {CandidateMode::Kind::lsps, 20},
                                     counters);

        // Route the training set back through the tree.
        std::map<const TreeNode*, ClassCounts> reached;
        for (std::size_t r = 0; r < ds.n(); ++r) {
            const TreeNode& leaf = tree.route(row_of(ds, r));
            REQUIRE(leaf.leaf);
            auto [it, fresh] = reached.try_emplace(&leaf, ClassCounts(ds.class_count()));
            ++it->second.counts[ds.class_id(r)];
        }

        // Each reached leaf stores exactly the counts that routed to it, and
        // votes for their majority class.
        std::size_t total = 0;
        for (const auto& [leaf, counts] : reached) {
            REQUIRE(leaf->dist == counts);
            REQUIRE(leaf->majority == counts.majority());
            total += counts.total();
        }
        REQUIRE(total == ds.n());
    }
}

TEST_CASE("an empty child answers with its parent's distribution", "[tree]") {
    // Only two of the three colors appear in training, and color separates
    // the classes perfectly, so the blue child is grown from nothing.
    std::vector<AttributeSchema> schema{
        {"color", AttrKind::categorical, {"red", "green", "blue"}},
        {"cls", AttrKind::categorical, {"a", "b"}}};
    std::vector<double> cells{0, 0, 0, 0, 1, 1, 1, 1};
    const Dataset ds(std::move(schema), 1, std::move(cells));

    auto ctx = ctx_for(ds, 7);
    SplitCounters counters;
    const Tree tree = build_tree(all_rows(ds), ctx, {CandidateMode::Kind::exhaustive, 20},
                                 counters);
    REQUIRE_FALSE(tree.root().leaf);
    REQUIRE(tree.root().split.child_count == 3);

    const std::vector<double> blue_row{2.0, missing_cell()};
    const TreeNode& blue = tree.route(blue_row);
    REQUIRE(blue.leaf);
    CHECK(blue.dist.counts == std::vector<std::size_t>{2, 2});
    CHECK(blue.majority == 0);  // tied parent counts; lowest class code wins

    const std::vector<double> red_row{0.0, missing_cell()};
    CHECK(tree.route(red_row).majority == 0);
    const std::vector<double> green_row{1.0, missing_cell()};
    CHECK(tree.route(green_row).majority == 1);
}

TEST_CASE("stopping rules", "[tree]") {
    const Dataset ds = mortgage();

    SECTION("min_leaf at the node size keeps the root a leaf") {
        auto ctx = ctx_for(ds, 42, 6);
        SplitCounters counters;
        const Tree tree = build_tree(all_rows(ds), ctx, {}, counters);
        REQUIRE(tree.size() == 1);
        REQUIRE(tree.root().leaf);
        CHECK(tree.root().dist.counts == std::vector<std::size_t>{3, 3});
        CHECK(tree.root().majority == 0);  // tie; lowest class code
        CHECK(counters.split_evaluations == 0);
    }

    SECTION("min_leaf stops partway down") {
        auto ctx = ctx_for(ds, 42, 4);
        SplitCounters counters;
        const Tree tree = build_tree(all_rows(ds), ctx, {}, counters);
        // Root splits at 37.5; the 4-record left child is at the floor.
        REQUIRE(tree.size() == 3);
        REQUIRE_FALSE(tree.root().leaf);
        const TreeNode& left = tree.node(tree.root().children[0]);
        REQUIRE(left.leaf);
        CHECK(left.dist.counts == std::vector<std::size_t>{1, 3});
        CHECK(left.majority == 1);
    }

    SECTION("max_depth 1 allows exactly one split") {
        auto ctx = ctx_for(ds, 42, 1, 1);
        SplitCounters counters;
        const Tree tree = build_tree(all_rows(ds), ctx, {}, counters);
        REQUIRE(tree.size() == 3);
        for (const auto c : tree.root().children) REQUIRE(tree.node(c).leaf);
    }

    SECTION("a pure node never splits") {
        std::vector<AttributeSchema> schema{{"x", AttrKind::numeric, {}},
                                            {"cls", AttrKind::categorical, {"a", "b"}}};
        std::vector<double> cells{1, 0, 2, 0, 3, 0, 4, 0};
        const Dataset pure(std::move(schema), 1, std::move(cells));
        auto ctx = ctx_for(pure, 42);
        SplitCounters counters;
        const Tree tree = build_tree(all_rows(pure), ctx, {}, counters);
        REQUIRE(tree.size() == 1);
        CHECK(tree.root().majority == 0);
        CHECK(counters.split_evaluations == 0);
    }

    SECTION("no usable split makes a majority leaf") {
        std::vector<AttributeSchema> schema{{"x", AttrKind::numeric, {}},
                                            {"cls", AttrKind::categorical, {"a", "b"}}};
        std::vector<double> cells{5, 0, 5, 0, 5, 1};
        const Dataset flat(std::move(schema), 1, std::move(cells));
        auto ctx = ctx_for(flat, 42);
        SplitCounters counters;
        const Tree tree = build_tree(all_rows(flat), ctx, {}, counters);
        REQUIRE(tree.size() == 1);
        CHECK(tree.root().majority == 0);
        CHECK(tree.root().dist.counts == std::vector<std::size_t>{2, 1});
    }
}

TEST_CASE("tree growth is a function of the seed", "[tree]") {
    RngStream gen(55);
    const Dataset ds = random_dataset(gen, 80, 5, 3);

    auto build = [&](std::uint64_t seed) {
        auto ctx = ctx_for(ds, seed);
        SplitCounters counters;
        return build_tree(all_rows(ds), ctx, {CandidateMode::Kind::lsps, 20}, counters);
    };

    const Tree a = build(4242);
    const Tree b = build(4242);
    REQUIRE(trees_equal(a, b));

    // With six attributes and narrow subspaces, some nearby seed must sample
    // differently somewhere.
    bool any_differ = false;
    for (std::uint64_t seed = 0; seed < 5 && !any_differ; ++seed)
        any_differ = !trees_equal(a, build(seed));
    CHECK(any_differ);
}

TEST_CASE("missing cells at scoring time follow the marked child", "[tree]") {
    const Dataset ds = mortgage();
    auto ctx = ctx_for(ds, 42);
    SplitCounters counters;
    const Tree tree = build_tree(all_rows(ds), ctx, {}, counters);

    // Root: 4 records left of 37.5, 2 right, so missing goes left. The left
    // inner node sends 1 record left and 3 right, so missing goes right into
    // the "no" leaf.
    REQUIRE(tree.root().split.missing_child == 0);
    const std::vector<double> na_row{missing_cell(), missing_cell()};
    const TreeNode& leaf = tree.route(na_row);
    CHECK(leaf.majority == 1);
    CHECK(leaf.dist.counts == std::vector<std::size_t>{0, 3});
}

TEST_CASE("build_tree validates its inputs", "[tree]") {
    const Dataset ds = mortgage();
    SplitCounters counters;

    auto ctx = ctx_for(ds, 1);
    CHECK_THROWS_AS(build_tree(IndexSubset{&ds, {}}, ctx, {}, counters),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_tree(IndexSubset{}, ctx, {}, counters), std::invalid_argument);

    auto bad_size = ctx_for(ds, 1);
    bad_size.train_size = 5;
    CHECK_THROWS_AS(build_tree(all_rows(ds), bad_size, {}, counters), std::invalid_argument);

    auto bad_attrs = ctx_for(ds, 1);
    bad_attrs.total_attrs = 3;
    CHECK_THROWS_AS(build_tree(all_rows(ds), bad_attrs, {}, counters), std::invalid_argument);
}

TEST_CASE("force_k clamps to the attribute count", "[tree]") {
    const Dataset ds = mortgage();
    auto forced = ctx_for(ds, 42, 1, 0, 99);
    auto normal = ctx_for(ds, 42);
    SplitCounters c1, c2;
    const Tree a = build_tree(all_rows(ds), forced, {}, c1);
    const Tree b = build_tree(all_rows(ds), normal, {}, c2);
    // One attribute either way, so the trees agree node for node.
    REQUIRE(trees_equal(a, b));
    REQUIRE(c1.split_evaluations == c2.split_evaluations);
}
