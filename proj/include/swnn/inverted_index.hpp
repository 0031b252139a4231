#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "swnn/dataset.hpp"
#include "swnn/sparse_vector.hpp"

namespace swnn {

/// One non-zero of the training matrix, keyed by training entry id.
struct Posting {
    std::uint32_t entry = 0;
    double value = 0.0;
};

/// Immutable feature-to-postings index over a training set, with the
/// per-entry norms, support sizes and label sets needed at query time.
/// Safe for concurrent queries once built.
struct TrainingIndex {
    std::uint32_t num_features = 0;
    std::uint32_t num_labels = 0;
    std::vector<std::vector<Posting>> postings;  // size num_features, ascending entry ids
    std::vector<double> norms;                   // per entry, ||x_i||_2
    std::vector<std::uint32_t> support_sizes;    // per entry, |Supp(x_i)|
    std::vector<LabelSet> label_sets;            // per entry

    std::size_t num_entries() const { return norms.size(); }
};

TrainingIndex build_index(const Dataset& dataset);

/// Accumulated match between a query and one training entry.
struct CandidateScore {
    std::uint32_t entry = 0;
    double dot = 0.0;
    std::uint32_t intersection = 0;  // shared support size, >= 1
    double sim = 0.0;                // Jaccard^beta * cosine, > 0
};

struct ScoreOptions {
    /// When true, the Jaccard denominator counts only query features below
    /// the index dimension instead of the query's full support.
    bool jaccard_in_vocab_only = false;
};

/// Per-query work counters.
struct QueryStats {
    std::uint64_t postings_visited = 0;       // posting-list elements touched
    std::uint64_t out_of_range_features = 0;  // query ids >= num_features, skipped
    std::uint64_t candidates = 0;             // entries sharing support with the query
};

/// Reusable accumulation scratch sized to the index. A default-constructed
/// scratch grows on first use; reuse avoids reallocation between queries.
/// score_candidates leaves the accumulators zeroed on return.
struct ScoreScratch {
    std::vector<double> dot;
    std::vector<std::uint32_t> overlap;
    std::vector<std::uint32_t> touched;

    void ensure(std::size_t num_entries);
};

/// Scores every training entry sharing at least one feature with the query by
/// traversing the posting lists of the query's support. Entries with
/// non-positive Sim are dropped. Output order is by ascending entry id;
/// ranking happens downstream. A zero-norm query yields no candidates.
std::vector<CandidateScore> score_candidates(const TrainingIndex& index, const SparseVector& query,
                                             std::uint32_t beta, const ScoreOptions& options = {},
                                             ScoreScratch* scratch = nullptr,
                                             QueryStats* stats = nullptr);

/// Binary serialization, little-endian. Layout:
///   magic "SWNN", u32 version (currently 1),
///   u64 num_entries, u64 num_features, u64 num_labels,
///   f64 norms[num_entries], u32 support_sizes[num_entries],
///   per entry: u32 label count, u32 label ids,
///   per feature: u64 posting count, then (u32 entry, f64 value) pairs.
void save_index(std::ostream& out, const TrainingIndex& index);
void save_index_file(const std::string& path, const TrainingIndex& index);

/// Throws std::runtime_error on bad magic, unsupported version or a
/// structurally invalid payload.
TrainingIndex load_index(std::istream& in);
TrainingIndex load_index_file(const std::string& path);

}  // namespace swnn
