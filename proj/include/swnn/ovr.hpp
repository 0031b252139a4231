#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "swnn/sparse_vector.hpp"

namespace swnn {

struct WeightPosting {
    std::uint32_t label = 0;
    double weight = 0.0;
};

/// One-versus-rest linear weights stored per feature, so scoring a query
/// touches only the weight rows of its non-zero features. Text format:
///
///   line 1:          <num_features> <num_labels>
///   following lines: <feature_id> <label:weight> <label:weight> ...
///
/// A feature may appear on several lines; a repeated (feature, label) pair is
/// an error. Zero weights are dropped on load.
struct SparseWeightIndex {
    std::uint32_t num_features = 0;
    std::uint32_t num_labels = 0;
    std::vector<std::vector<WeightPosting>> postings;  // size num_features, ascending label

    std::size_t stored_weights() const;
};

/// Throws ParseError (see dataset.hpp) with the offending line number.
SparseWeightIndex load_weights(std::istream& in);
SparseWeightIndex load_weights_file(const std::string& path);

/// Canonical form: one line per feature with at least one weight.
void save_weights(std::ostream& out, const SparseWeightIndex& weights);

/// Reusable accumulator keyed by label id.
struct OvrScratch {
    std::vector<double> score;
    std::vector<std::uint32_t> touched;
};

/// Scores f(x)_l = sum over the query's non-zero features of w_lj * x_j and
/// returns the top_k labels by (score desc, label id asc). Labels never
/// touched score exactly 0 and rank accordingly, so the result matches a
/// dense mat-vec followed by a full sort. If ops is given it receives the
/// number of weight postings visited.
std::vector<std::pair<std::uint32_t, double>> ovr_scores(const SparseWeightIndex& weights,
                                                         const SparseVector& query,
                                                         std::uint32_t top_k,
                                                         OvrScratch* scratch = nullptr,
                                                         std::uint64_t* ops = nullptr);

}  // namespace swnn
