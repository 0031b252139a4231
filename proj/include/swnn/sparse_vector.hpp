#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace swnn {

/// One non-zero feature of a sparse vector.
struct FeatureValue {
    std::uint32_t id = 0;
    double value = 0.0;

    friend bool operator==(const FeatureValue&, const FeatureValue&) = default;
};

/// Sparse feature vector stored as (feature id, value) pairs, strictly
/// ascending by id. Exact zeros are never stored, so the stored ids are
/// exactly the support of the vector. Immutable after construction.
class SparseVector {
public:
    SparseVector() = default;

    /// Sorts the pairs by id and drops exact zeros.
    /// Throws std::invalid_argument on a duplicate feature id.
    static SparseVector from_pairs(std::vector<FeatureValue> entries);

    /// Entries must already be strictly ascending with no zeros
    /// (checked in debug builds only).
    static SparseVector from_sorted(std::vector<FeatureValue> entries);

    std::span<const FeatureValue> entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::vector<FeatureValue> entries_;
};

/// Sorted-merge dot product over the common support.
double dot(const SparseVector& x, const SparseVector& y);

/// Euclidean norm; 0.0 for the empty vector.
double norm2(const SparseVector& x);

/// |Supp(x) ∩ Supp(y)| via sorted merge.
std::size_t intersection_size(const SparseVector& x, const SparseVector& y);

/// |Supp(x) ∩ Supp(y)| / |Supp(x) ∪ Supp(y)|; 0.0 when both supports are
/// empty.
double jaccard(const SparseVector& x, const SparseVector& y);

/// Cosine similarity; 0.0 if either norm is zero.
double cosine(const SparseVector& x, const SparseVector& y);

/// base^exp for integer exp, with 0^0 == 1.
double ipow(double base, std::uint32_t exp);

/// Jaccard^beta times cosine. Returns 0.0 if either operand has zero norm.
/// beta is an integer so the result is a positive-definite kernel.
double sim(const SparseVector& x, const SparseVector& y, std::uint32_t beta);

}  // namespace swnn
