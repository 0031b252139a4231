#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "swnn/knn.hpp"

using swnn::build_index;
using swnn::Dataset;
using swnn::HyperParams;
using swnn::Neighbor;
using swnn::predict;
using swnn::Prediction;
using swnn::SparseVector;
using swnn::TrainingIndex;

namespace {

Dataset parse(const std::string& text) {
    std::istringstream in(text);
    return swnn::parse_dataset(in);
}

SparseVector ones(std::initializer_list<std::uint32_t> ids) {
    std::vector<swnn::FeatureValue> entries;
    for (std::uint32_t id : ids) entries.push_back({id, 1.0});
    return SparseVector::from_pairs(std::move(entries));
}

HyperParams params(std::uint32_t s, double alpha, std::uint32_t beta, std::uint32_t top_k) {
    return HyperParams{s, alpha, beta, top_k};
}

}  // namespace

TEST_CASE("weighted_vote on the two-neighbor example") {
    const std::vector<swnn::LabelSet> label_sets{{1, 2}, {2, 3}};
    const std::vector<Neighbor> neighbors{{0, 0.9}, {1, 0.5}};
    const auto ranked = swnn::weighted_vote(neighbors, label_sets, 1.0, 3);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0] == std::pair<std::uint32_t, double>{2, 1.4});
    CHECK(ranked[1] == std::pair<std::uint32_t, double>{1, 0.9});
    CHECK(ranked[2] == std::pair<std::uint32_t, double>{3, 0.5});
}

TEST_CASE("select_neighbors keeps the top-S with deterministic tie-breaks") {
    const std::vector<swnn::CandidateScore> candidates{
        {0, 0, 1, 0.5}, {1, 0, 1, 0.9}, {2, 0, 1, 0.5}, {3, 0, 1, 0.7}};
    const auto top = swnn::select_neighbors(candidates, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].entry == 1);
    CHECK(top[1].entry == 3);
    CHECK(top[2].entry == 0);  // tie at 0.5 broken by ascending entry id
    CHECK(swnn::select_neighbors(candidates, 10).size() == 4);
}

TEST_CASE("query identical to a unique training entry votes its labels with weight 1") {
    const Dataset data = parse("2 6 5\n4 1:1 2:2\n0 3:5\n");
    const TrainingIndex index = build_index(data);
    const auto p = predict(index, data.features[0], params(1, 2.0, 1, 3));
    REQUIRE(p.neighbors.size() == 1);
    CHECK(p.neighbors[0] == 0);
    REQUIRE(p.ranked.size() == 1);
    CHECK(p.ranked[0].first == 4);
    CHECK(p.ranked[0].second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("support-mismatch scenario: beta discounts the broader neighbors") {
    // One exact-support twin with labels {1,2}; four wider entries with
    // labels {3,5,6}.
    const Dataset data = parse(
        "5 9 7\n"
        "1,2 1:1 2:1 4:1\n"
        "3,5,6 1:1 2:1 4:1 5:1 8:1\n"
        "3,5,6 1:1 2:1 4:1 5:1 8:1\n"
        "3,5,6 1:1 2:1 4:1 5:1 8:1\n"
        "3,5,6 1:1 2:1 4:1 5:1 8:1\n");
    const TrainingIndex index = build_index(data);
    const SparseVector query = ones({1, 2, 4});
    const double wide_cos = 3.0 / std::sqrt(15.0);

    const auto cosine_only = predict(index, query, params(5, 1.0, 0, 7));
    // all five entries vote; the wider group overwhelms the exact match
    REQUIRE(cosine_only.ranked.size() == 5);
    CHECK(cosine_only.ranked[0].first == 3);
    CHECK(cosine_only.ranked[0].second == doctest::Approx(4.0 * wide_cos).epsilon(1e-12));
    CHECK(cosine_only.ranked[3].second == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_only.neighbors[0] == 0);  // exact match still the top neighbor

    const auto jaccard_weighted = predict(index, query, params(5, 1.0, 1, 7));
    CHECK(jaccard_weighted.neighbors[0] == 0);
    // the wider entries drop to 0.6 * cosine each
    REQUIRE(jaccard_weighted.ranked.size() == 5);
    CHECK(jaccard_weighted.ranked[0].second ==
          doctest::Approx(4.0 * 0.6 * wide_cos).epsilon(1e-12));
    bool found_exact = false;
    for (const auto& [label, score] : jaccard_weighted.ranked) {
        if (label == 1 || label == 2) {
            CHECK(score == doctest::Approx(1.0).epsilon(1e-12));
            found_exact = true;
        }
    }
    CHECK(found_exact);

    // with S=1 only the exact match votes and its labels win outright
    const auto nearest_only = predict(index, query, params(1, 1.0, 1, 7));
    REQUIRE(nearest_only.ranked.size() == 2);
    CHECK(nearest_only.ranked[0].first == 1);
    CHECK(nearest_only.ranked[1].first == 2);
}

TEST_CASE("alpha=0 counts votes, beta=0 ranks by cosine") {
    std::mt19937_64 rng(53);
    oracle::DatasetSpec spec;
    spec.entries = 60;
    spec.features = 40;
    spec.allow_empty = false;
    const Dataset data = oracle::random_dataset(rng, spec);
    const TrainingIndex index = build_index(data);

    for (int q = 0; q < 10; ++q) {
        const SparseVector query = oracle::random_vector(rng, spec.features, 5);

        const auto unweighted = predict(index, query, params(7, 0.0, 1, 50));
        for (const auto& [label, score] : unweighted.ranked) {
            CHECK(score == doctest::Approx(std::round(score)));  // integer counts
            CHECK(score >= 1.0);
        }

        const auto cosine_knn = predict(index, query, params(7, 1.0, 0, 50));
        const auto candidates = score_candidates(index, query, 0);
        std::vector<std::pair<double, std::uint32_t>> by_cosine;
        for (const auto& c : candidates) by_cosine.emplace_back(-c.sim, c.entry);
        std::sort(by_cosine.begin(), by_cosine.end());
        for (std::size_t r = 0; r < cosine_knn.neighbors.size(); ++r) {
            CHECK(cosine_knn.neighbors[r] == by_cosine[r].second);
        }
    }
}

TEST_CASE("predict matches the full-scan oracle") {
    std::mt19937_64 rng(59);
    oracle::DatasetSpec spec;
    spec.entries = 150;
    spec.features = 120;
    spec.max_nnz = 15;
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset data = oracle::random_dataset(rng, spec);
        const TrainingIndex index = build_index(data);
        swnn::PredictScratch scratch;
        for (int q = 0; q < 10; ++q) {
            const HyperParams hp = params(1 + q % 12, 0.5 * (q % 4), q % 3, 5);
            const SparseVector query = oracle::random_vector(rng, spec.features, 1 + q % 12);
            const Prediction got = predict(index, query, hp, {}, &scratch);
            const Prediction expected =
                oracle::predict_full_scan(data.features, data.labels, query, hp, spec.features);
            CHECK(got.neighbors == expected.neighbors);
            REQUIRE(got.ranked.size() == expected.ranked.size());
            for (std::size_t i = 0; i < got.ranked.size(); ++i) {
                CHECK(got.ranked[i].first == expected.ranked[i].first);
                CHECK(got.ranked[i].second ==
                      doctest::Approx(expected.ranked[i].second).epsilon(1e-9));
            }
            // every ranked label must come from some voting neighbor
            for (const auto& [label, score] : got.ranked) {
                bool from_neighbor = false;
                for (std::uint32_t nb : got.neighbors) {
                    const auto& ls = data.labels[nb];
                    if (std::binary_search(ls.begin(), ls.end(), label)) from_neighbor = true;
                }
                CHECK(from_neighbor);
                CHECK(score >= 0.0);
            }
        }
    }
}

TEST_CASE("vote scores only grow as neighbors are added") {
    const std::vector<swnn::LabelSet> label_sets{{1}, {1, 2}, {2, 3}, {1, 3}};
    std::vector<Neighbor> neighbors;
    std::vector<double> previous_scores(4, 0.0);
    for (std::uint32_t i = 0; i < 4; ++i) {
        neighbors.push_back({i, 1.0 - 0.2 * i});
        const auto ranked = swnn::weighted_vote(neighbors, label_sets, 1.5, 10);
        std::vector<double> scores(4, 0.0);
        for (const auto& [label, score] : ranked) scores[label] = score;
        for (std::size_t l = 0; l < 4; ++l) CHECK(scores[l] >= previous_scores[l]);
        previous_scores = scores;
    }
}

TEST_CASE("zero-candidate queries: empty ranking, optional popular fallback") {
    const Dataset data = parse("3 6 4\n1 1:1\n1,3 1:2\n2 2:1\n");
    const TrainingIndex index = build_index(data);
    const SparseVector query = ones({5});

    const auto empty = predict(index, query, params(2, 1.0, 1, 3));
    CHECK(empty.ranked.empty());
    CHECK(empty.neighbors.empty());

    const auto popular = swnn::most_frequent_labels(index);
    REQUIRE(popular.size() == 3);
    CHECK(popular[0].first == 1);  // twice
    CHECK(popular[0].second == 2.0);
    CHECK(popular[1].first == 2);  // once each, ascending id
    CHECK(popular[2].first == 3);

    swnn::PredictOptions options;
    options.fallback_ranking = &popular;
    const auto fell_back = predict(index, query, params(2, 1.0, 1, 2), options);
    REQUIRE(fell_back.ranked.size() == 2);
    CHECK(fell_back.ranked[0].first == 1);
    CHECK(fell_back.ranked[1].first == 2);
    CHECK(fell_back.neighbors.empty());

    // fallback leaves queries with candidates untouched
    const auto normal = predict(index, ones({1}), params(2, 1.0, 1, 3), options);
    CHECK(!normal.neighbors.empty());
}

TEST_CASE("predict_batch is worker-count independent") {
    std::mt19937_64 rng(61);
    oracle::DatasetSpec spec;
    spec.entries = 200;
    spec.features = 80;
    const Dataset data = oracle::random_dataset(rng, spec);
    const TrainingIndex index = build_index(data);
    std::vector<SparseVector> queries;
    for (int i = 0; i < 100; ++i) queries.push_back(oracle::random_vector(rng, 80, 1 + i % 10));

    const HyperParams hp = params(10, 1.0, 1, 5);
    const auto serial = swnn::predict_batch(index, queries, hp, 1);
    const auto parallel = swnn::predict_batch(index, queries, hp, 8);
    REQUIRE(serial.predictions.size() == parallel.predictions.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        CHECK(serial.predictions[i].neighbors == parallel.predictions[i].neighbors);
        CHECK(serial.predictions[i].ranked == parallel.predictions[i].ranked);
    }
    CHECK(serial.totals.postings_visited == parallel.totals.postings_visited);

    const auto empty = swnn::predict_batch(index, {}, hp, 4);
    CHECK(empty.predictions.empty());

    const auto timed = swnn::predict_batch(index, queries, hp, 1, {}, true);
    CHECK(timed.timed);
    CHECK(timed.latency.queries == queries.size());
    CHECK(timed.latency.mean_ms >= 0.0);
    CHECK(timed.latency.p99_ms >= timed.latency.p50_ms);
}

TEST_CASE("per-query latency stays well under a millisecond at desk scale") {
    std::mt19937_64 rng(101);
    oracle::DatasetSpec spec;
    spec.entries = 500;
    spec.features = 1000;
    spec.max_nnz = 20;
    const Dataset data = oracle::random_dataset(rng, spec);
    const TrainingIndex index = build_index(data);
    std::vector<SparseVector> queries;
    for (int i = 0; i < 1000; ++i) queries.push_back(oracle::random_vector(rng, 1000, 20));

    const auto batch = swnn::predict_batch(index, queries, params(20, 1.0, 1, 5), 1, {}, true);
    CHECK(batch.latency.queries == 1000);
    CHECK(batch.latency.mean_ms < 1.0);  // order-of-magnitude bound
}

TEST_CASE("prediction TSV uses 6 significant digits and rank order") {
    std::vector<Prediction> predictions(2);
    predictions[0].ranked = {{7, 1.0}, {2, 0.123456789}};
    // predictions[1] left empty
    std::ostringstream out;
    swnn::write_predictions_tsv(out, predictions);
    CHECK(out.str() == "7:1\t2:0.123457\n\n");
}
