#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "swnn/gram.hpp"
#include "swnn/sparse_vector.hpp"

using swnn::FeatureValue;
using swnn::SparseVector;

namespace {

SparseVector ones(std::initializer_list<std::uint32_t> ids) {
    std::vector<FeatureValue> entries;
    for (std::uint32_t id : ids) entries.push_back({id, 1.0});
    return SparseVector::from_pairs(std::move(entries));
}

SparseVector vec(std::initializer_list<FeatureValue> entries) {
    return SparseVector::from_pairs(std::vector<FeatureValue>(entries));
}

}  // namespace

TEST_CASE("from_pairs sorts, drops zeros, rejects duplicates") {
    const auto v = vec({{4, 2.0}, {1, 1.5}, {7, 0.0}});
    REQUIRE(v.support_size() == 2);
    CHECK(v.entries()[0] == FeatureValue{1, 1.5});
    CHECK(v.entries()[1] == FeatureValue{4, 2.0});
    CHECK_THROWS_AS(vec({{1, 1.0}, {1, 2.0}}), std::invalid_argument);
    CHECK(SparseVector{}.empty());
}

TEST_CASE("dot on examples") {
    CHECK(swnn::dot(SparseVector{}, vec({{1, 5.0}})) == 0.0);
    CHECK(swnn::dot(ones({1, 2, 4}), ones({1, 2, 4, 5, 8})) == 3.0);
    CHECK(swnn::dot(vec({{3, 2.0}}), vec({{3, 0.5}})) == 1.0);
}

TEST_CASE("norm2 on examples") {
    CHECK(swnn::norm2(SparseVector{}) == 0.0);
    CHECK(swnn::norm2(vec({{1, 3.0}, {7, 4.0}})) == 5.0);
    CHECK(swnn::norm2(ones({1, 2, 4})) == doctest::Approx(1.7320508075688772).epsilon(1e-12));
}

TEST_CASE("jaccard on examples") {
    CHECK(swnn::jaccard(ones({1, 2, 4}), ones({1, 2, 4, 5, 8})) == doctest::Approx(0.6));
    CHECK(swnn::jaccard(ones({3, 9}), ones({3, 9})) == 1.0);
    CHECK(swnn::jaccard(ones({1}), ones({2})) == 0.0);
    CHECK(swnn::jaccard(SparseVector{}, SparseVector{}) == 0.0);
}

TEST_CASE("sim on examples") {
    const auto x = ones({1, 2, 4});
    const auto y = ones({1, 2, 4, 5, 8});
    for (std::uint32_t beta : {0u, 1u, 3u}) {
        CHECK(swnn::sim(x, x, beta) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(swnn::sim(x, y, 1) == doctest::Approx(0.6 * 3.0 / std::sqrt(15.0)).epsilon(1e-12));
    CHECK(swnn::sim(x, y, 0) == doctest::Approx(3.0 / std::sqrt(15.0)).epsilon(1e-12));
    // zero-norm operand
    CHECK(swnn::sim(SparseVector{}, y, 1) == 0.0);
    // beta=0 with disjoint supports: J^0 == 1, sim reduces to the cosine (0 here)
    CHECK(swnn::sim(ones({1}), ones({2}), 0) == 0.0);
    CHECK(swnn::ipow(0.0, 0) == 1.0);
}

TEST_CASE("sim is symmetric, bounded and scale invariant on random vectors") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> scale(0.25, 4.0);
    for (int iter = 0; iter < 200; ++iter) {
        const auto x = oracle::random_vector(rng, 40, 1 + iter % 12);
        const auto y = oracle::random_vector(rng, 40, 1 + (iter * 5) % 12);
        const std::uint32_t beta = iter % 4;
        const double sxy = swnn::sim(x, y, beta);
        const double syx = swnn::sim(y, x, beta);
        CHECK(sxy == syx);  // same merge path, commutative accumulation
        CHECK(sxy >= 0.0);  // non-negative data
        CHECK(sxy <= 1.0 + 1e-12);

        const double c = scale(rng);
        std::vector<FeatureValue> scaled(x.entries().begin(), x.entries().end());
        for (auto& fv : scaled) fv.value *= c;
        const double s_scaled = swnn::sim(SparseVector::from_sorted(scaled), y, beta);
        CHECK(s_scaled == doctest::Approx(sxy).epsilon(1e-12));
    }
}

TEST_CASE("sorted-merge dot matches the dense oracle") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        const auto x = oracle::random_vector(rng, 64, 1 + iter % 20, false);
        const auto y = oracle::random_vector(rng, 64, 1 + (iter * 3) % 20, false);
        const double expected = oracle::dot_dense(x, y, 64);
        CHECK(swnn::dot(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("unit-norm L2 distance and cosine rank triples the same way") {
    std::mt19937_64 rng(13);
    auto normalized_dense = [](const SparseVector& v) {
        auto d = oracle::to_dense(v, 32);
        const double n = swnn::norm2(v);
        for (double& e : d) e /= n;
        return d;
    };
    auto l2 = [](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
        return std::sqrt(acc);
    };
    int informative = 0;
    for (int iter = 0; iter < 300; ++iter) {
        const auto x = oracle::random_vector(rng, 32, 1 + iter % 10);
        const auto a = oracle::random_vector(rng, 32, 1 + (iter * 7) % 10);
        const auto b = oracle::random_vector(rng, 32, 1 + (iter * 3) % 10);
        const double da = l2(normalized_dense(x), normalized_dense(a));
        const double db = l2(normalized_dense(x), normalized_dense(b));
        const double ca = swnn::cosine(x, a);
        const double cb = swnn::cosine(x, b);
        if (std::abs(da - db) < 1e-9) continue;  // ties are uninformative
        ++informative;
        CHECK((da < db) == (ca > cb));
    }
    CHECK(informative > 200);
}

TEST_CASE("gram matrix examples") {
    CHECK(swnn::gram_min_eigenvalue(std::vector<SparseVector>{ones({1, 2})}, 1) ==
          doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<SparseVector> twins{ones({1, 2}), ones({1, 2})};
    CHECK(swnn::gram_min_eigenvalue(twins, 2) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(swnn::gram_min_eigenvalue(std::vector<SparseVector>{}, 0),
                    std::invalid_argument);
    const std::vector<SparseVector> three(3, ones({1}));
    CHECK_THROWS_AS(swnn::gram_min_eigenvalue(three, 0, 2), std::invalid_argument);
}

TEST_CASE("gram matrices of random samples are positive semidefinite") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<SparseVector> sample;
        for (int i = 0; i < 30; ++i) sample.push_back(oracle::random_vector(rng, 50, 1 + i % 15));
        for (std::uint32_t beta : {0u, 1u, 2u, 3u}) {
            CHECK(swnn::gram_min_eigenvalue(sample, beta) >= -1e-8);
        }
    }
}
