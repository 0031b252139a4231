#include "swnn/sparse_vector.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swnn {

SparseVector SparseVector::from_pairs(std::vector<FeatureValue> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const FeatureValue& a, const FeatureValue& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i - 1].id == entries[i].id) {
            throw std::invalid_argument("duplicate feature id " + std::to_string(entries[i].id));
        }
    }
    std::erase_if(entries, [](const FeatureValue& fv) { return fv.value == 0.0; });
    SparseVector v;
    v.entries_ = std::move(entries);
    return v;
}

SparseVector SparseVector::from_sorted(std::vector<FeatureValue> entries) {
#ifndef NDEBUG
    for (std::size_t i = 0; i < entries.size(); ++i) {
        assert(entries[i].value != 0.0);
        assert(i == 0 || entries[i - 1].id < entries[i].id);
    }
#endif
    SparseVector v;
    v.entries_ = std::move(entries);
    return v;
}

double dot(const SparseVector& x, const SparseVector& y) {
    auto xs = x.entries();
    auto ys = y.entries();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i].id < ys[j].id) {
            ++i;
        } else if (ys[j].id < xs[i].id) {
            ++j;
        } else {
            acc += xs[i].value * ys[j].value;
            ++i;
            ++j;
        }
    }
    return acc;
}

double norm2(const SparseVector& x) {
    double acc = 0.0;
    for (const auto& fv : x.entries()) acc += fv.value * fv.value;
    return std::sqrt(acc);
}

std::size_t intersection_size(const SparseVector& x, const SparseVector& y) {
    auto xs = x.entries();
    auto ys = y.entries();
    std::size_t count = 0, i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i].id < ys[j].id) {
            ++i;
        } else if (ys[j].id < xs[i].id) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

double jaccard(const SparseVector& x, const SparseVector& y) {
    const std::size_t common = intersection_size(x, y);
    const std::size_t total = x.support_size() + y.support_size() - common;
    if (total == 0) return 0.0;  // both supports empty
    return static_cast<double>(common) / static_cast<double>(total);
}

double cosine(const SparseVector& x, const SparseVector& y) {
    const double nx = norm2(x);
    const double ny = norm2(y);
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return dot(x, y) / (nx * ny);
}

double ipow(double base, std::uint32_t exp) {
    double r = 1.0;  // exp == 0 gives 1, including 0^0
    for (std::uint32_t k = 0; k < exp; ++k) r *= base;
    return r;
}

double sim(const SparseVector& x, const SparseVector& y, std::uint32_t beta) {
    const double nx = norm2(x);
    const double ny = norm2(y);
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return ipow(jaccard(x, y), beta) * (dot(x, y) / (nx * ny));
}

}  // namespace swnn
