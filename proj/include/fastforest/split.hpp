#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fastforest/dataset.hpp"
#include "fastforest/rng.hpp"

namespace fastforest {

/// Per-class record counts at a node (index == class code).
struct ClassCounts {
    std::vector<std::size_t> counts;

    explicit ClassCounts(std::size_t classes = 0) : counts(classes, 0) {}

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto c : counts) t += c;
        return t;
    }

    /// Class with the highest count; the lowest code wins ties.
    std::size_t majority() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < counts.size(); ++i)
            if (counts[i] > counts[best]) best = i;
        return best;
    }

    bool pure() const {
        bool seen = false;
        for (const auto c : counts) {
            if (c == 0) continue;
            if (seen) return false;
            seen = true;
        }
        return true;
    }

    bool operator==(const ClassCounts& other) const { return counts == other.counts; }
};

namespace detail {

/// Shannon entropy in bits of a count vector; 0 for an empty vector or all
/// zeros. Zero counts contribute nothing (lim p->0 of -p log p).
inline double entropy_of(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (const auto c : counts) total += c;
    if (total == 0) return 0.0;
    double h = 0.0;
    const double dt = static_cast<double>(total);
    for (const auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / dt;
        h -= p * std::log2(p);
    }
    return h;
}

/// Tiny negative gains are floating-point noise (gain is >= 0 exactly);
/// anything below the noise floor indicates a contract violation upstream.
inline double clamp_gain(double g) { return (g < 0.0 && g > -1e-12) ? 0.0 : g; }

}  // namespace detail

inline double entropy(const ClassCounts& c) { return detail::entropy_of(c.counts); }

/// Mean child entropy weighted by child share of the records. Empty parts
/// contribute zero. Returns 0 when the parts are all empty.
inline double weighted_info(std::span<const ClassCounts> parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.total();
    if (total == 0) return 0.0;
    double info = 0.0;
    for (const auto& p : parts) {
        const std::size_t pt = p.total();
        if (pt == 0) continue;
        info += (static_cast<double>(pt) / static_cast<double>(total)) * entropy(p);
    }
    return info;
}

/// Information gain of splitting `parent` into `parts`. The parts must
/// partition the parent exactly, class by class.
inline double gain(const ClassCounts& parent, std::span<const ClassCounts> parts) {
    std::vector<std::size_t> sum(parent.counts.size(), 0);
    for (const auto& p : parts) {
        if (p.counts.size() != parent.counts.size())
            throw std::invalid_argument("gain: partition has a different class arity");
        for (std::size_t i = 0; i < p.counts.size(); ++i) sum[i] += p.counts[i];
    }
    if (sum != parent.counts)
        throw std::invalid_argument("gain: partitions do not sum to the parent counts");
    return detail::clamp_gain(entropy(parent) - weighted_info(parts));
}

/// How split-point candidates are chosen for numeric attributes.
struct CandidateMode {
    enum class Kind {
        exhaustive,   // every midpoint between adjacent distinct values
        fixed_count,  // at most `cap` evenly ranked midpoints
        lsps          // floor(log2(records at node)) + 1 evenly ranked midpoints
    };
    Kind kind = Kind::exhaustive;
    std::size_t cap = 20;  // fixed_count only

    bool operator==(const CandidateMode& other) const {
        return kind == other.kind && (kind != Kind::fixed_count || cap == other.cap);
    }
};

/// Indices into the exhaustive midpoint list [0, distinct_values-1) selected
/// by `mode`. With s' = min(s, midpoints), candidate t in 1..s' picks index
/// floor(t * (midpoints) / (s'+1)) of the midpoint list, where midpoints =
/// distinct_values - 1; duplicates are dropped keeping first occurrence.
/// `node_records` is the count of records (not distinct values) with a
/// present value at the node, which is what the lsps budget grows with.
inline std::vector<std::size_t> candidate_midpoint_indices(std::size_t distinct_values,
                                                           std::size_t node_records,
                                                           const CandidateMode& mode) {
    if (distinct_values < 2) return {};
    const std::size_t midpoints = distinct_values - 1;
    std::vector<std::size_t> out;
    if (mode.kind == CandidateMode::Kind::exhaustive) {
        out.resize(midpoints);
        for (std::size_t i = 0; i < midpoints; ++i) out[i] = i;
        return out;
    }
    std::size_t budget = 0;
    if (mode.kind == CandidateMode::Kind::fixed_count) {
        budget = mode.cap;
    } else {
        // floor(log2(records)) + 1 == bit_width(records)
        budget = node_records == 0 ? 1 : static_cast<std::size_t>(std::bit_width(node_records));
    }
    const std::size_t s = std::min(budget, midpoints);
    if (s == 0) return {};
    out.reserve(s);
    for (std::size_t t = 1; t <= s; ++t) {
        const std::size_t idx = t * midpoints / (s + 1);
        if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
}

/// Candidate thresholds for a numeric attribute given its sorted distinct
/// present values at the node. Each threshold is the midpoint of an adjacent
/// pair; exhaustive mode returns all of them, the sampled modes a ranked
/// subset. Always a subset of the exhaustive list, in ascending order.
inline std::vector<double> numeric_candidates(std::span<const double> sorted_distinct,
                                              std::size_t node_records,
                                              const CandidateMode& mode) {
    const auto idxs = candidate_midpoint_indices(sorted_distinct.size(), node_records, mode);
    std::vector<double> out;
    out.reserve(idxs.size());
    for (const auto i : idxs)
        out.push_back((sorted_distinct[i] + sorted_distinct[i + 1]) / 2.0);
    return out;
}

/// One split decision. Numeric: two children, cell <= threshold goes left
/// (child 0). Categorical: one child per schema value. Records whose cell is
/// missing follow missing_child.
struct SplitSpec {
    std::size_t attribute = 0;
    bool numeric = true;
    double threshold = 0.0;     // numeric only
    std::size_t child_count = 2;
    std::size_t missing_child = 0;
    double gain = 0.0;          // present-fraction-penalized bits

    std::size_t route(double cell) const {
        if (is_missing(cell)) return missing_child;
        if (numeric) return cell <= threshold ? 0 : 1;
        return static_cast<std::size_t>(cell);
    }
};

/// Work accounting for the split search. split_evaluations counts every
/// candidate whose gain was actually computed: one per numeric threshold
/// tried, one per categorical attribute considered.
struct SplitCounters {
    std::uint64_t split_evaluations = 0;
};

namespace detail {

struct SplitScratch {
    std::vector<std::pair<double, std::uint32_t>> pairs;  // (value, class) per present record
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    std::vector<std::size_t> part_totals;
    std::vector<std::size_t> part_counts;  // child-major [child * classes + class]
};

}  // namespace detail

/// Best split of `node` over `attrs` by penalized information gain: the gain
/// over present-valued records scaled by their fraction of the node. Gains
/// that tie exactly are broken by a uniform draw over the tied candidates
/// (reservoir over the stream), so the choice is seed-deterministic. Returns
/// nothing when no candidate clears the zero-gain floor of 1e-9 bits.
inline std::optional<SplitSpec> best_split(const IndexSubset& node,
                                           std::span<const std::size_t> attrs,
                                           const CandidateMode& mode, SplitCounters& counters,
                                           RngStream& rng) {
    if (node.parent == nullptr) throw std::invalid_argument("best_split: subset has no dataset");
    const Dataset& ds = *node.parent;
    if (attrs.empty()) throw std::invalid_argument("best_split: no attributes to search");
    for (const auto a : attrs)
        if (a == ds.class_index())
            throw std::invalid_argument("best_split: class attribute in the search set");

    constexpr double kZeroGainFloor = 1e-9;
    const std::size_t classes = ds.class_count();
    const double node_total = static_cast<double>(node.size());

    SplitSpec best;
    double best_gain = -1.0;
    std::uint64_t ties = 0;
    auto consider = [&](const SplitSpec& cand) {
        if (cand.gain > best_gain) {
            best = cand;
            best_gain = cand.gain;
            ties = 1;
        } else if (cand.gain == best_gain) {
            ++ties;
            if (rng.below(ties) == 0) best = cand;
        }
    };

    detail::SplitScratch ws;
    for (const auto attr : attrs) {
        if (ds.schema()[attr].is_numeric()) {
            ws.pairs.clear();
            for (const auto r : node.indices) {
                const double v = ds.cell(r, attr);
                if (!is_missing(v))
                    ws.pairs.emplace_back(v, static_cast<std::uint32_t>(ds.class_id(r)));
            }
            const std::size_t present = ws.pairs.size();
            if (present < 2) continue;
            std::sort(ws.pairs.begin(), ws.pairs.end());

            ws.right.assign(classes, 0);
            for (const auto& [v, cls] : ws.pairs) ++ws.right[cls];
            const double parent_h = detail::entropy_of(ws.right);
            const double penalty = static_cast<double>(present) / node_total;

            // Distinct-value group boundaries; midpoint i sits after group i.
            std::size_t distinct = 1;
            for (std::size_t i = 1; i < present; ++i)
                if (ws.pairs[i].first != ws.pairs[i - 1].first) ++distinct;
            const auto cand_idx = candidate_midpoint_indices(distinct, present, mode);
            if (cand_idx.empty()) continue;

            ws.left.assign(classes, 0);
            std::size_t group = 0;   // index of the group just absorbed into left
            std::size_t row = 0;     // next pair to absorb
            std::size_t next_cand = 0;
            double group_hi = ws.pairs[0].first;
            while (next_cand < cand_idx.size()) {
                // Absorb groups up to and including cand_idx[next_cand].
                while (group <= cand_idx[next_cand]) {
                    group_hi = ws.pairs[row].first;
                    while (row < present && ws.pairs[row].first == group_hi) {
                        ++ws.left[ws.pairs[row].second];
                        --ws.right[ws.pairs[row].second];
                        ++row;
                    }
                    ++group;
                }
                const double threshold = (group_hi + ws.pairs[row].first) / 2.0;
                std::size_t left_n = 0;
                for (const auto c : ws.left) left_n += c;
                const std::size_t right_n = present - left_n;
                const double info =
                    (static_cast<double>(left_n) * detail::entropy_of(ws.left) +
                     static_cast<double>(right_n) * detail::entropy_of(ws.right)) /
                    static_cast<double>(present);
                const double g = detail::clamp_gain(parent_h - info) * penalty;
                ++counters.split_evaluations;
                ++next_cand;
                if (g <= kZeroGainFloor) continue;
                SplitSpec cand;
                cand.attribute = attr;
                cand.numeric = true;
                cand.threshold = threshold;
                cand.child_count = 2;
                cand.missing_child = left_n >= right_n ? 0 : 1;
                cand.gain = g;
                consider(cand);
            }
        } else {
            const std::size_t arity = ds.schema()[attr].value_count();
            ws.part_counts.assign(arity * classes, 0);
            ws.part_totals.assign(arity, 0);
            std::size_t present = 0;
            for (const auto r : node.indices) {
                const double v = ds.cell(r, attr);
                if (is_missing(v)) continue;
                const auto child = static_cast<std::size_t>(v);
                ++ws.part_counts[child * classes + ds.class_id(r)];
                ++ws.part_totals[child];
                ++present;
            }
            if (present < 2) continue;

            ws.right.assign(classes, 0);
            for (std::size_t child = 0; child < arity; ++child)
                for (std::size_t cls = 0; cls < classes; ++cls)
                    ws.right[cls] += ws.part_counts[child * classes + cls];
            const double parent_h = detail::entropy_of(ws.right);
            double info = 0.0;
            for (std::size_t child = 0; child < arity; ++child) {
                if (ws.part_totals[child] == 0) continue;
                info += (static_cast<double>(ws.part_totals[child]) /
                         static_cast<double>(present)) *
                        detail::entropy_of(std::span<const std::size_t>(
                            ws.part_counts.data() + child * classes, classes));
            }
            const double penalty = static_cast<double>(present) / node_total;
            const double g = detail::clamp_gain(parent_h - info) * penalty;
            ++counters.split_evaluations;
            if (g <= kZeroGainFloor) continue;

            SplitSpec cand;
            cand.attribute = attr;
            cand.numeric = false;
            cand.child_count = arity;
            cand.missing_child = static_cast<std::size_t>(
                std::max_element(ws.part_totals.begin(), ws.part_totals.end()) -
                ws.part_totals.begin());
            cand.gain = g;
            consider(cand);
        }
    }
    if (best_gain <= kZeroGainFloor) return std::nullopt;
    return best;
}

}  // namespace fastforest
