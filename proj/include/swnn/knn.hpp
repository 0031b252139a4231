#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "swnn/hyper_params.hpp"
#include "swnn/inverted_index.hpp"
#include "swnn/sparse_vector.hpp"

namespace swnn {

/// One voting neighbor: a training entry id and its similarity to the query.
struct Neighbor {
    std::uint32_t entry = 0;
    double sim = 0.0;
};

/// Ranked label output for one query.
struct Prediction {
    /// (label id, vote score), descending by score, ties ascending by label.
    std::vector<std::pair<std::uint32_t, double>> ranked;
    /// Entry ids of the neighbors that voted, descending by sim, ties
    /// ascending by entry id. Empty when the query matched nothing.
    std::vector<std::uint32_t> neighbors;
};

/// Top-s candidates by (sim desc, entry id asc) via bounded partial sort.
/// Returns all candidates when fewer than s have positive sim.
std::vector<Neighbor> select_neighbors(std::span<const CandidateScore> candidates,
                                       std::uint32_t s);

/// Reusable per-query vote accumulator keyed by label id.
struct VoteScratch {
    std::vector<double> score;
    std::vector<std::uint32_t> touched;

    void ensure(std::size_t num_labels);
};

/// Adds sim^alpha to the score of every label of each neighbor, then ranks
/// the touched labels by (score desc, label id asc) and keeps the top_k.
/// alpha == 0 gives every neighbor weight 1 (plain vote counting).
std::vector<std::pair<std::uint32_t, double>> weighted_vote(std::span<const Neighbor> neighbors,
                                                            std::span<const LabelSet> label_sets,
                                                            double alpha, std::uint32_t top_k,
                                                            VoteScratch* scratch = nullptr);

/// Observed training labels ranked by (frequency desc, label id asc); the
/// score is the occurrence count. Used by the popular-label fallback.
std::vector<std::pair<std::uint32_t, double>> most_frequent_labels(const TrainingIndex& index);

struct PredictOptions {
    ScoreOptions scoring;
    /// When set, queries with no positive-sim candidate return the head of
    /// this ranking instead of an empty prediction. This goes beyond the
    /// plain voting scheme; off by default.
    const std::vector<std::pair<std::uint32_t, double>>* fallback_ranking = nullptr;
};

struct PredictScratch {
    ScoreScratch scores;
    VoteScratch votes;
};

/// Full inference for one query: candidate generation, top-S selection,
/// weighted vote. Pure with respect to the index; deterministic.
Prediction predict(const TrainingIndex& index, const SparseVector& query, const HyperParams& hp,
                   const PredictOptions& options = {}, PredictScratch* scratch = nullptr,
                   QueryStats* stats = nullptr);

struct LatencyStats {
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p99_ms = 0.0;
    double queries_per_sec = 0.0;
    std::uint64_t queries = 0;
};

struct BatchResult {
    std::vector<Prediction> predictions;
    QueryStats totals;            // counters summed over all queries
    LatencyStats latency;         // meaningful only when timed
    bool timed = false;
};

/// Runs predict over all queries with the given number of worker threads.
/// Results are identical to sequential calls regardless of workers. When
/// measure_latency is set, each query is timed around predict only.
BatchResult predict_batch(const TrainingIndex& index, std::span<const SparseVector> queries,
                          const HyperParams& hp, unsigned workers,
                          const PredictOptions& options = {}, bool measure_latency = false);

/// One line per query: tab-separated label:score pairs in rank order, scores
/// with 6 significant digits.
void write_predictions_tsv(std::ostream& out, std::span<const Prediction> predictions);

}  // namespace swnn
