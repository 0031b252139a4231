#include "swnn/ovr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "swnn/dataset.hpp"

namespace swnn {

std::size_t SparseWeightIndex::stored_weights() const {
    std::size_t n = 0;
    for (const auto& plist : postings) n += plist.size();
    return n;
}

namespace {

bool parse_u32(std::string_view token, std::uint32_t& out) {
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), last, out);
    return ec == std::errc() && ptr == last && !token.empty();
}

bool parse_f64(std::string_view token, double& out) {
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), last, out);
    return ec == std::errc() && ptr == last && !token.empty() && std::isfinite(out);
}

bool label_score_before(const std::pair<std::uint32_t, double>& a,
                        const std::pair<std::uint32_t, double>& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
}

}  // namespace

SparseWeightIndex load_weights(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    SparseWeightIndex weights;
    {
        const std::size_t space = line.find(' ');
        std::uint32_t nf = 0, nl = 0;
        if (space == std::string::npos || !parse_u32(std::string_view(line).substr(0, space), nf) ||
            !parse_u32(std::string_view(line).substr(space + 1), nl)) {
            throw ParseError(1, "malformed header, expected '<features> <labels>'");
        }
        weights.num_features = nf;
        weights.num_labels = nl;
    }
    weights.postings.resize(weights.num_features);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::string_view rest(line);
        auto next_token = [&rest]() {
            while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
            const std::size_t end = rest.find(' ');
            std::string_view token = rest.substr(0, end);
            rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
            return token;
        };

        std::uint32_t feature = 0;
        const std::string_view head = next_token();
        if (!parse_u32(head, feature)) {
            throw ParseError(lineno, "invalid feature id '" + std::string(head) + "'");
        }
        if (feature >= weights.num_features) {
            throw ParseError(lineno, "feature id " + std::to_string(feature) + " out of range (d=" +
                                         std::to_string(weights.num_features) + ")");
        }
        auto& plist = weights.postings[feature];

        for (std::string_view token = next_token(); !token.empty(); token = next_token()) {
            const std::size_t colon = token.find(':');
            WeightPosting wp;
            if (colon == std::string_view::npos || !parse_u32(token.substr(0, colon), wp.label) ||
                !parse_f64(token.substr(colon + 1), wp.weight)) {
                throw ParseError(lineno, "expected label:weight, got '" + std::string(token) + "'");
            }
            if (wp.label >= weights.num_labels) {
                throw ParseError(lineno, "label id " + std::to_string(wp.label) +
                                             " out of range (L=" +
                                             std::to_string(weights.num_labels) + ")");
            }
            const auto pos = std::lower_bound(
                plist.begin(), plist.end(), wp.label,
                [](const WeightPosting& p, std::uint32_t l) { return p.label < l; });
            if (pos != plist.end() && pos->label == wp.label) {
                throw ParseError(lineno, "duplicate weight for feature " + std::to_string(feature) +
                                             " label " + std::to_string(wp.label));
            }
            plist.insert(pos, wp);
        }
    }

    for (auto& plist : weights.postings) {
        std::erase_if(plist, [](const WeightPosting& p) { return p.weight == 0.0; });
    }
    return weights;
}

SparseWeightIndex load_weights_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return load_weights(in);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_weights(std::ostream& out, const SparseWeightIndex& weights) {
    out << weights.num_features << ' ' << weights.num_labels << '\n';
    char buf[48];
    std::string line;
    for (std::uint32_t f = 0; f < weights.num_features; ++f) {
        if (weights.postings[f].empty()) continue;
        line = std::to_string(f);
        for (const WeightPosting& wp : weights.postings[f]) {
            std::snprintf(buf, sizeof(buf), " %u:%.17g", wp.label, wp.weight);
            line += buf;
        }
        line += '\n';
        out << line;
    }
}

std::vector<std::pair<std::uint32_t, double>> ovr_scores(const SparseWeightIndex& weights,
                                                         const SparseVector& query,
                                                         std::uint32_t top_k, OvrScratch* scratch,
                                                         std::uint64_t* ops) {
    OvrScratch local;
    OvrScratch& s = scratch ? *scratch : local;
    if (s.score.size() < weights.num_labels) s.score.resize(weights.num_labels, 0.0);
    s.touched.clear();
    if (ops) *ops = 0;

    for (const FeatureValue& fv : query.entries()) {
        if (fv.id >= weights.num_features) continue;
        const auto& plist = weights.postings[fv.id];
        if (ops) *ops += plist.size();
        for (const WeightPosting& wp : plist) {
            if (s.score[wp.label] == 0.0) s.touched.push_back(wp.label);
            s.score[wp.label] += wp.weight * fv.value;
        }
    }

    // A score can pass through exact 0.0 when weights cancel, re-marking the
    // label as untouched, so the touched list may hold duplicates.
    std::sort(s.touched.begin(), s.touched.end());
    s.touched.erase(std::unique(s.touched.begin(), s.touched.end()), s.touched.end());

    std::vector<std::pair<std::uint32_t, double>> touched;
    touched.reserve(s.touched.size());
    for (std::uint32_t l : s.touched) touched.emplace_back(l, s.score[l]);
    std::sort(touched.begin(), touched.end(), label_score_before);

    // Untouched labels score exactly 0, so the overall ranking is: positive
    // scores, then the ascending-id run of zero scores, then negatives. The
    // zero run is materialized only when top_k reaches into it.
    const std::size_t result_size = std::min<std::size_t>(top_k, weights.num_labels);
    std::vector<std::pair<std::uint32_t, double>> ranked;
    ranked.reserve(result_size);
    std::size_t t = 0;
    while (t < touched.size() && touched[t].second > 0.0 && ranked.size() < result_size) {
        ranked.push_back(touched[t++]);
    }
    if (ranked.size() < result_size) {
        for (std::uint32_t l = 0; l < weights.num_labels && ranked.size() < result_size; ++l) {
            if (s.score[l] == 0.0) ranked.emplace_back(l, 0.0);
        }
        while (t < touched.size() && touched[t].second == 0.0) ++t;  // merged above
        while (t < touched.size() && ranked.size() < result_size) {
            ranked.push_back(touched[t++]);
        }
    }

    for (std::uint32_t l : s.touched) s.score[l] = 0.0;
    return ranked;
}

}  // namespace swnn
