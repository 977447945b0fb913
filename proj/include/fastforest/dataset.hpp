#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastforest/rng.hpp"

namespace fastforest {

enum class AttrKind { numeric, categorical };

/// Cell encoding: every cell is a double. Numeric attributes hold their value
/// directly; categorical attributes hold the index into the schema's value
/// list. Missing is NaN for either kind.
inline bool is_missing(double cell) { return std::isnan(cell); }

inline double missing_cell() { return std::numeric_limits<double>::quiet_NaN(); }

struct AttributeSchema {
    std::string name;
    AttrKind kind = AttrKind::numeric;
    std::vector<std::string> values;  // categorical only; index == encoded cell value

    bool is_numeric() const { return kind == AttrKind::numeric; }

    std::size_t value_count() const { return values.size(); }

    bool operator==(const AttributeSchema& other) const {
        return name == other.name && kind == other.kind && values == other.values;
    }
};

/// Immutable table of records. One designated class attribute, which must be
/// categorical. Rows are stored row-major in a flat vector.
class Dataset {
public:
    Dataset() = default;

    /// Takes ownership of the cell block. cells.size() must be a multiple of
    /// schema.size(); throws std::invalid_argument on any malformed input
    /// (bad class index, non-categorical class, out-of-range categorical
    /// codes, duplicate or empty categorical value names).
    Dataset(std::vector<AttributeSchema> schema, std::size_t class_index,
            std::vector<double> cells)
        : schema_(std::move(schema)), class_index_(class_index), cells_(std::move(cells)) {
        if (schema_.empty()) throw std::invalid_argument("dataset: empty schema");
        if (class_index_ >= schema_.size())
            throw std::invalid_argument("dataset: class index out of range");
        if (schema_[class_index_].is_numeric())
            throw std::invalid_argument("dataset: class attribute must be categorical");
        if (cells_.size() % schema_.size() != 0)
            throw std::invalid_argument("dataset: cell block is not a whole number of rows");
        n_ = cells_.size() / schema_.size();
        for (const auto& attr : schema_) {
            if (attr.kind == AttrKind::categorical) {
                if (attr.values.empty())
                    throw std::invalid_argument("dataset: categorical attribute '" + attr.name +
                                                "' has no values");
                for (std::size_t i = 0; i < attr.values.size(); ++i) {
                    if (attr.values[i].empty())
                        throw std::invalid_argument("dataset: empty value name in attribute '" +
                                                    attr.name + "'");
                    for (std::size_t j = i + 1; j < attr.values.size(); ++j)
                        if (attr.values[i] == attr.values[j])
                            throw std::invalid_argument("dataset: duplicate value '" +
                                                        attr.values[i] + "' in attribute '" +
                                                        attr.name + "'");
                }
            }
        }
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t c = 0; c < schema_.size(); ++c) {
                const double v = cell(r, c);
                if (is_missing(v)) continue;
                if (!schema_[c].is_numeric()) {
                    if (v != std::floor(v) || v < 0.0 ||
                        v >= static_cast<double>(schema_[c].value_count()))
                        throw std::invalid_argument("dataset: invalid categorical code in '" +
                                                    schema_[c].name + "'");
                }
            }
        }
    }

    const std::vector<AttributeSchema>& schema() const { return schema_; }
    std::size_t class_index() const { return class_index_; }
    std::size_t n() const { return n_; }
    std::size_t attr_count() const { return schema_.size(); }
    std::size_t nonclass_attr_count() const { return schema_.size() - 1; }

    double cell(std::size_t row, std::size_t col) const {
        return cells_[row * schema_.size() + col];
    }

    /// Full row, including the class cell.
    const double* row(std::size_t r) const { return cells_.data() + r * schema_.size(); }

    const AttributeSchema& class_attr() const { return schema_[class_index_]; }
    std::size_t class_count() const { return class_attr().value_count(); }

    /// Class code of a row. The caller must know the cell is present; missing
    /// class cells only occur in prediction inputs.
    std::size_t class_id(std::size_t row_index) const {
        return static_cast<std::size_t>(cell(row_index, class_index_));
    }

    bool class_missing(std::size_t row_index) const {
        return is_missing(cell(row_index, class_index_));
    }

    /// Indices of all attributes except the class, in schema order.
    std::vector<std::size_t> nonclass_attrs() const {
        std::vector<std::size_t> out;
        out.reserve(nonclass_attr_count());
        for (std::size_t i = 0; i < schema_.size(); ++i)
            if (i != class_index_) out.push_back(i);
        return out;
    }

    std::uint64_t schema_fingerprint() const;

private:
    std::vector<AttributeSchema> schema_;
    std::size_t class_index_ = 0;
    std::size_t n_ = 0;
    std::vector<double> cells_;
};

/// Content hash of a schema plus its class designation. Two datasets agree on
/// it iff a model trained on one can score the other without re-mapping.
inline std::uint64_t schema_fingerprint(const std::vector<AttributeSchema>& schema,
                                        std::size_t class_index) {
    std::uint64_t h = mix64(0x5c6e3a00ULL + class_index);
    auto feed = [&h](const std::string& s) {
        h = mix64(h ^ s.size());
        for (unsigned char ch : s) h = mix64(h ^ ch);
    };
    for (const auto& attr : schema) {
        feed(attr.name);
        h = mix64(h ^ (attr.is_numeric() ? 1u : 2u));
        for (const auto& v : attr.values) feed(v);
    }
    return h;
}

inline std::uint64_t Dataset::schema_fingerprint() const {
    return fastforest::schema_fingerprint(schema_, class_index_);
}

/// View of a dataset as a list of row indices. Repeats allowed (bagging);
/// samplers that promise distinct indices document it.
struct IndexSubset {
    const Dataset* parent = nullptr;
    std::vector<std::uint32_t> indices;

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

/// Copy the subset's rows (in subset order) into a standalone dataset with
/// the same schema.
inline Dataset materialize_subset(const IndexSubset& subset) {
    if (subset.parent == nullptr)
        throw std::invalid_argument("materialize_subset: subset has no dataset");
    const Dataset& ds = *subset.parent;
    std::vector<double> cells;
    cells.reserve(subset.size() * ds.attr_count());
    for (const auto r : subset.indices)
        cells.insert(cells.end(), ds.row(r), ds.row(r) + ds.attr_count());
    return Dataset(ds.schema(), ds.class_index(), std::move(cells));
}

struct Fold {
    IndexSubset train;
    IndexSubset test;
};

struct FoldPlan {
    std::vector<Fold> folds;
    std::uint64_t seed = 0;
};

/// Stratified k-fold split. Rows are grouped by class, each group is shuffled
/// with the seeded stream, then dealt round-robin, so per-class counts across
/// folds differ by at most one. Test sets partition [0, n); each train set is
/// the complement of its test set. Fold index order and the shuffle depend
/// only on (dataset order, seed).
inline FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
    if (k > ds.n()) throw std::invalid_argument("stratified_folds: more folds than records");

    std::vector<std::vector<std::uint32_t>> groups(ds.class_count());
    for (std::size_t r = 0; r < ds.n(); ++r) {
        if (ds.class_missing(r))
            throw std::invalid_argument("stratified_folds: missing class value at row " +
                                        std::to_string(r));
        groups[ds.class_id(r)].push_back(static_cast<std::uint32_t>(r));
    }

    RngStream rng(seed);
    for (auto& g : groups) shuffle(g, rng);

    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(k);
    for (const auto& g : groups)
        for (std::size_t i = 0; i < g.size(); ++i) plan.folds[i % k].test.indices.push_back(g[i]);

    std::vector<char> in_test(ds.n());
    for (auto& fold : plan.folds) {
        std::sort(fold.test.indices.begin(), fold.test.indices.end());
        std::fill(in_test.begin(), in_test.end(), 0);
        for (auto r : fold.test.indices) in_test[r] = 1;
        fold.train.indices.reserve(ds.n() - fold.test.size());
        for (std::size_t r = 0; r < ds.n(); ++r)
            if (!in_test[r]) fold.train.indices.push_back(static_cast<std::uint32_t>(r));
        fold.test.parent = &ds;
        fold.train.parent = &ds;
    }
    return plan;
}

}  // namespace fastforest
