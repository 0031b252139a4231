#include "swnn/knn.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace swnn {

namespace {

bool neighbor_before(const Neighbor& a, const Neighbor& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.entry < b.entry;
}

bool label_before(const std::pair<std::uint32_t, double>& a,
                  const std::pair<std::uint32_t, double>& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
}

}  // namespace

std::vector<Neighbor> select_neighbors(std::span<const CandidateScore> candidates,
                                       std::uint32_t s) {
    std::vector<Neighbor> neighbors;
    neighbors.reserve(candidates.size());
    for (const CandidateScore& c : candidates) neighbors.push_back({c.entry, c.sim});
    const std::size_t keep = std::min<std::size_t>(s, neighbors.size());
    std::partial_sort(neighbors.begin(), neighbors.begin() + keep, neighbors.end(),
                      neighbor_before);
    neighbors.resize(keep);
    return neighbors;
}

void VoteScratch::ensure(std::size_t num_labels) {
    if (score.size() < num_labels) score.resize(num_labels, 0.0);
}

std::vector<std::pair<std::uint32_t, double>> weighted_vote(std::span<const Neighbor> neighbors,
                                                            std::span<const LabelSet> label_sets,
                                                            double alpha, std::uint32_t top_k,
                                                            VoteScratch* scratch) {
    VoteScratch local;
    VoteScratch& vs = scratch ? *scratch : local;
    std::size_t max_label = 0;
    for (const Neighbor& nb : neighbors) {
        for (std::uint32_t l : label_sets[nb.entry]) max_label = std::max<std::size_t>(max_label, l);
    }
    vs.ensure(max_label + 1);
    vs.touched.clear();

    for (const Neighbor& nb : neighbors) {
        const double weight = alpha == 0.0 ? 1.0 : std::pow(nb.sim, alpha);
        if (weight == 0.0) continue;  // underflowed sim^alpha adds nothing
        for (std::uint32_t l : label_sets[nb.entry]) {
            if (vs.score[l] == 0.0) vs.touched.push_back(l);
            vs.score[l] += weight;
        }
    }

    std::vector<std::pair<std::uint32_t, double>> ranked;
    ranked.reserve(vs.touched.size());
    for (std::uint32_t l : vs.touched) {
        ranked.emplace_back(l, vs.score[l]);
        vs.score[l] = 0.0;
    }
    std::sort(ranked.begin(), ranked.end(), label_before);
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

std::vector<std::pair<std::uint32_t, double>> most_frequent_labels(const TrainingIndex& index) {
    std::vector<std::uint64_t> counts(index.num_labels, 0);
    for (const LabelSet& labels : index.label_sets) {
        for (std::uint32_t l : labels) ++counts[l];
    }
    std::vector<std::pair<std::uint32_t, double>> ranked;
    for (std::uint32_t l = 0; l < index.num_labels; ++l) {
        if (counts[l] > 0) ranked.emplace_back(l, static_cast<double>(counts[l]));
    }
    std::sort(ranked.begin(), ranked.end(), label_before);
    return ranked;
}

Prediction predict(const TrainingIndex& index, const SparseVector& query, const HyperParams& hp,
                   const PredictOptions& options, PredictScratch* scratch, QueryStats* stats) {
    hp.validate();
    const std::vector<CandidateScore> candidates =
        score_candidates(index, query, hp.jaccard_exponent, options.scoring,
                         scratch ? &scratch->scores : nullptr, stats);

    Prediction prediction;
    if (candidates.empty()) {
        if (options.fallback_ranking) {
            const auto& fallback = *options.fallback_ranking;
            const std::size_t keep = std::min<std::size_t>(hp.top_k, fallback.size());
            prediction.ranked.assign(fallback.begin(), fallback.begin() + keep);
        }
        return prediction;
    }

    const std::vector<Neighbor> neighbors =
        select_neighbors(candidates, hp.neighborhood_size);
    prediction.neighbors.reserve(neighbors.size());
    for (const Neighbor& nb : neighbors) prediction.neighbors.push_back(nb.entry);
    prediction.ranked = weighted_vote(neighbors, index.label_sets, hp.vote_exponent, hp.top_k,
                                      scratch ? &scratch->votes : nullptr);
    return prediction;
}

namespace {

double type7_percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BatchResult predict_batch(const TrainingIndex& index, std::span<const SparseVector> queries,
                          const HyperParams& hp, unsigned workers, const PredictOptions& options,
                          bool measure_latency) {
    if (workers < 1) throw std::invalid_argument("predict_batch: workers must be >= 1");
    hp.validate();

    BatchResult result;
    result.predictions.resize(queries.size());
    result.timed = measure_latency;
    std::vector<double> latency_ms(measure_latency ? queries.size() : 0);

    const unsigned thread_count =
        static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(queries.size(), 1)));
    std::atomic<std::size_t> next{0};
    std::vector<QueryStats> worker_totals(thread_count);

    auto work = [&](unsigned worker_id) {
        PredictScratch scratch;
        QueryStats query_stats;
        QueryStats& totals = worker_totals[worker_id];
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= queries.size()) break;
            if (measure_latency) {
                const auto start = std::chrono::steady_clock::now();
                result.predictions[i] =
                    predict(index, queries[i], hp, options, &scratch, &query_stats);
                const auto stop = std::chrono::steady_clock::now();
                latency_ms[i] =
                    std::chrono::duration<double, std::milli>(stop - start).count();
            } else {
                result.predictions[i] =
                    predict(index, queries[i], hp, options, &scratch, &query_stats);
            }
            totals.postings_visited += query_stats.postings_visited;
            totals.out_of_range_features += query_stats.out_of_range_features;
            totals.candidates += query_stats.candidates;
        }
    };

    if (thread_count == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(thread_count);
        for (unsigned t = 0; t < thread_count; ++t) threads.emplace_back(work, t);
        for (auto& t : threads) t.join();
    }

    for (const QueryStats& wt : worker_totals) {
        result.totals.postings_visited += wt.postings_visited;
        result.totals.out_of_range_features += wt.out_of_range_features;
        result.totals.candidates += wt.candidates;
    }

    if (measure_latency && !latency_ms.empty()) {
        std::vector<double> sorted = latency_ms;
        std::sort(sorted.begin(), sorted.end());
        double total_ms = 0.0;
        for (double v : sorted) total_ms += v;
        result.latency.queries = sorted.size();
        result.latency.mean_ms = total_ms / static_cast<double>(sorted.size());
        result.latency.p50_ms = type7_percentile(sorted, 0.50);
        result.latency.p99_ms = type7_percentile(sorted, 0.99);
        result.latency.queries_per_sec =
            total_ms > 0.0 ? 1000.0 * static_cast<double>(sorted.size()) / total_ms : 0.0;
    }
    return result;
}

void write_predictions_tsv(std::ostream& out, std::span<const Prediction> predictions) {
    char buf[64];
    std::string line;
    for (const Prediction& p : predictions) {
        line.clear();
        for (std::size_t i = 0; i < p.ranked.size(); ++i) {
            if (i > 0) line += '\t';
            std::snprintf(buf, sizeof(buf), "%u:%.6g", p.ranked[i].first, p.ranked[i].second);
            line += buf;
        }
        line += '\n';
        out << line;
    }
}

}  // namespace swnn
