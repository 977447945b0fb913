#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fastforest/dataset.hpp"
#include "fastforest/rng.hpp"
#include "fastforest/split.hpp"

namespace fastforest {

/// How many attributes each node may search.
struct SubspaceMode {
    enum class Kind {
        static_k,   // floor(log2 m) + 1, same at every node
        dynamic_k,  // floor(log2(m * d / d_i)) + 1, widens as nodes shrink
        drs         // static until d_i <= d / divisor, dynamic below
    };
    Kind kind = Kind::drs;
    std::size_t divisor = 8;  // drs only

    bool operator==(const SubspaceMode& other) const {
        return kind == other.kind && (kind != Kind::drs || divisor == other.divisor);
    }
};

/// Attribute-sample size for a node holding d_i of the tree's d records, out
/// of m candidate attributes. Computed in integers: floor(log2 x) + 1 is
/// bit_width(x), and floor(log2(m*d/d_i)) is unchanged by flooring the
/// quotient first, so no float rounding can leak into the result. Clamped to
/// [1, m]. m*d must fit in 64 bits.
inline std::size_t subspace_size(std::size_t m, std::size_t d, std::size_t d_i,
                                 const SubspaceMode& mode) {
    if (m == 0) throw std::invalid_argument("subspace_size: zero attributes");
    if (d_i == 0 || d_i > d) throw std::invalid_argument("subspace_size: need 0 < d_i <= d");

    const auto static_k = static_cast<std::size_t>(std::bit_width(m));
    std::size_t k = 0;
    switch (mode.kind) {
        case SubspaceMode::Kind::static_k:
            k = static_k;
            break;
        case SubspaceMode::Kind::dynamic_k:
            k = static_cast<std::size_t>(std::bit_width(m * d / d_i));
            break;
        case SubspaceMode::Kind::drs:
            if (mode.divisor == 0) throw std::invalid_argument("subspace_size: zero divisor");
            // d_i > d / divisor, compared without flooring the quotient.
            k = (d_i * mode.divisor > d)
                    ? static_k
                    : static_cast<std::size_t>(std::bit_width(m * d / d_i));
            break;
    }
    return std::min(std::max<std::size_t>(k, 1), m);
}

/// Everything a single tree build needs besides the records: the sampled
/// training size d (denominator of the subspace schedule), the candidate
/// attribute count, growth limits, and the tree's private random stream.
struct TreeBuildContext {
    std::size_t train_size = 0;   // d: records the tree is grown from
    std::size_t total_attrs = 0;  // m: non-class attributes
    SubspaceMode subspace{};
    std::size_t min_leaf = 1;     // nodes at or below this size become leaves
    std::size_t max_depth = 0;    // 0 = unbounded
    std::size_t force_k = 0;      // testing hook: fixed subspace size, 0 = off
    RngStream rng{};
};

struct TreeNode {
    bool leaf = true;
    SplitSpec split{};                    // internal nodes
    std::vector<std::uint32_t> children;  // internal nodes; ids into the tree
    ClassCounts dist{};                   // leaves: training counts that reached here
    std::uint32_t majority = 0;           // leaves
};

class Tree {
public:
    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(std::size_t id) const { return nodes_[id]; }
    const TreeNode& root() const { return nodes_.front(); }

    std::uint32_t add_node(TreeNode n) {
        nodes_.push_back(std::move(n));
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }

    TreeNode& mutable_node(std::size_t id) { return nodes_[id]; }

    /// Leaf a full row (class cell ignored) lands on.
    const TreeNode& route(std::span<const double> row) const {
        const TreeNode* n = &nodes_.front();
        while (!n->leaf) n = &nodes_[n->children[n->split.route(row[n->split.attribute])]];
        return *n;
    }

private:
    std::vector<TreeNode> nodes_;
};

struct PredictResult {
    std::size_t class_id = 0;
    const ClassCounts* dist = nullptr;
};

inline PredictResult predict_record(const Tree& tree, std::span<const double> row) {
    const TreeNode& leaf = tree.route(row);
    return {leaf.majority, &leaf.dist};
}

namespace detail {

inline ClassCounts count_classes(const Dataset& ds, std::span<const std::uint32_t> rows) {
    ClassCounts c(ds.class_count());
    for (const auto r : rows) ++c.counts[ds.class_id(r)];
    return c;
}

}  // namespace detail

/// Grow one unpruned tree from `train`. Nodes stop splitting when pure, when
/// at or below min_leaf records, at the depth cap, or when no candidate split
/// clears the zero-gain floor. Each node draws its attribute sample and any
/// tie-breaks from ctx.rng in depth-first order, so a tree is a pure function
/// of (dataset, train indices, ctx fields, rng seed, split mode).
inline Tree build_tree(const IndexSubset& train, TreeBuildContext& ctx,
                       const CandidateMode& split_mode, SplitCounters& counters) {
    if (train.parent == nullptr) throw std::invalid_argument("build_tree: subset has no dataset");
    if (train.empty()) throw std::invalid_argument("build_tree: empty training subset");
    const Dataset& ds = *train.parent;
    if (ctx.total_attrs == 0 || ctx.total_attrs != ds.nonclass_attr_count())
        throw std::invalid_argument("build_tree: attribute count does not match the dataset");
    if (ctx.train_size != train.size())
        throw std::invalid_argument("build_tree: train_size does not match the subset");

    const auto attr_ids = ds.nonclass_attrs();
    Tree tree;

    auto make_leaf = [&](ClassCounts dist) {
        TreeNode n;
        n.leaf = true;
        n.majority = static_cast<std::uint32_t>(dist.majority());
        n.dist = std::move(dist);
        return tree.add_node(std::move(n));
    };

    // Returns the id of the subtree grown from `rows`. `rows` is consumed.
    auto grow = [&](auto&& self, std::vector<std::uint32_t> rows,
                    std::size_t depth) -> std::uint32_t {
        ClassCounts dist = detail::count_classes(ds, rows);
        if (dist.pure() || rows.size() <= ctx.min_leaf ||
            (ctx.max_depth != 0 && depth >= ctx.max_depth))
            return make_leaf(std::move(dist));

        std::size_t k = ctx.force_k != 0
                            ? std::min(ctx.force_k, ctx.total_attrs)
                            : subspace_size(ctx.total_attrs, ctx.train_size, rows.size(),
                                            ctx.subspace);
        const auto picks = sample_without_replacement(ctx.total_attrs, k, ctx.rng);
        std::vector<std::size_t> attrs(picks.size());
        for (std::size_t i = 0; i < picks.size(); ++i) attrs[i] = attr_ids[picks[i]];

        IndexSubset node{&ds, std::move(rows)};
        const auto spec = best_split(node, attrs, split_mode, counters, ctx.rng);
        if (!spec) return make_leaf(std::move(dist));

        std::vector<std::vector<std::uint32_t>> parts(spec->child_count);
        for (const auto r : node.indices)
            parts[spec->route(ds.cell(r, spec->attribute))].push_back(r);

        TreeNode inner;
        inner.leaf = false;
        inner.split = *spec;
        const std::uint32_t id = tree.add_node(std::move(inner));
        std::vector<std::uint32_t> children(parts.size());
        for (std::size_t c = 0; c < parts.size(); ++c) {
            // An empty child keeps the parent's distribution as its answer.
            children[c] = parts[c].empty() ? make_leaf(dist)
                                           : self(self, std::move(parts[c]), depth + 1);
        }
        tree.mutable_node(id).children = std::move(children);
        return id;
    };

    std::vector<std::uint32_t> rows(train.indices.begin(), train.indices.end());
    grow(grow, std::move(rows), 0);
    return tree;
}

}  // namespace fastforest
