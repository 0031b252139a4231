#include "swnn/inverted_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace swnn {

TrainingIndex build_index(const Dataset& dataset) {
    TrainingIndex index;
    index.num_features = dataset.num_features;
    index.num_labels = dataset.num_labels;
    index.label_sets = dataset.labels;

    const std::size_t n = dataset.size();
    index.norms.resize(n);
    index.support_sizes.resize(n);

    std::vector<std::size_t> lengths(dataset.num_features, 0);
    for (const SparseVector& x : dataset.features) {
        for (const FeatureValue& fv : x.entries()) ++lengths[fv.id];
    }
    index.postings.resize(dataset.num_features);
    for (std::uint32_t f = 0; f < dataset.num_features; ++f) {
        index.postings[f].reserve(lengths[f]);
    }

    // Entries are visited in ascending id order, so each posting list comes
    // out sorted by entry id.
    for (std::size_t i = 0; i < n; ++i) {
        const SparseVector& x = dataset.features[i];
        double sq = 0.0;
        for (const FeatureValue& fv : x.entries()) {
            sq += fv.value * fv.value;
            index.postings[fv.id].push_back({static_cast<std::uint32_t>(i), fv.value});
        }
        index.norms[i] = std::sqrt(sq);
        index.support_sizes[i] = static_cast<std::uint32_t>(x.support_size());
    }
    return index;
}

void ScoreScratch::ensure(std::size_t num_entries) {
    if (dot.size() < num_entries) {
        dot.resize(num_entries, 0.0);
        overlap.resize(num_entries, 0);
    }
}

std::vector<CandidateScore> score_candidates(const TrainingIndex& index, const SparseVector& query,
                                             std::uint32_t beta, const ScoreOptions& options,
                                             ScoreScratch* scratch, QueryStats* stats) {
    std::vector<CandidateScore> out;
    if (stats) *stats = QueryStats{};

    const double query_norm = norm2(query);
    if (query_norm == 0.0) return out;

    ScoreScratch local;
    ScoreScratch& s = scratch ? *scratch : local;
    s.ensure(index.num_entries());
    s.touched.clear();

    std::size_t in_vocab_support = 0;
    for (const FeatureValue& fv : query.entries()) {
        if (fv.id >= index.num_features) {
            if (stats) ++stats->out_of_range_features;
            continue;
        }
        ++in_vocab_support;
        const auto& plist = index.postings[fv.id];
        if (stats) stats->postings_visited += plist.size();
        for (const Posting& p : plist) {
            if (s.overlap[p.entry] == 0) s.touched.push_back(p.entry);
            s.dot[p.entry] += fv.value * p.value;
            ++s.overlap[p.entry];
        }
    }

    const std::size_t query_support =
        options.jaccard_in_vocab_only ? in_vocab_support : query.support_size();

    // Candidates are emitted in ascending entry id so results do not depend
    // on posting traversal order.
    std::sort(s.touched.begin(), s.touched.end());
    out.reserve(s.touched.size());
    for (std::uint32_t entry : s.touched) {
        const double dotv = s.dot[entry];
        const std::uint32_t common = s.overlap[entry];
        s.dot[entry] = 0.0;  // reset for the next query
        s.overlap[entry] = 0;
        const std::size_t unions = query_support + index.support_sizes[entry] - common;
        const double jac = unions == 0 ? 0.0 : static_cast<double>(common) / unions;
        const double simv = ipow(jac, beta) * (dotv / (query_norm * index.norms[entry]));
        if (simv > 0.0) {
            out.push_back({entry, dotv, common, simv});
        }
    }
    if (stats) stats->candidates = out.size();
    return out;
}

namespace {

void write_bytes(std::ostream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    std::array<unsigned char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    write_bytes(out, b.data(), b.size());
}

void write_u64(std::ostream& out, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    write_bytes(out, b.data(), b.size());
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    write_u64(out, bits);
}

void read_bytes(std::istream& in, void* data, std::size_t size) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (in.gcount() != static_cast<std::streamsize>(size)) {
        throw std::runtime_error("index file truncated");
    }
}

std::uint32_t read_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    read_bytes(in, b.data(), b.size());
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    read_bytes(in, b.data(), b.size());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

constexpr char kMagic[4] = {'S', 'W', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_index(std::ostream& out, const TrainingIndex& index) {
    write_bytes(out, kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    write_u64(out, index.num_entries());
    write_u64(out, index.num_features);
    write_u64(out, index.num_labels);
    for (double n : index.norms) write_f64(out, n);
    for (std::uint32_t s : index.support_sizes) write_u32(out, s);
    for (const LabelSet& labels : index.label_sets) {
        write_u32(out, static_cast<std::uint32_t>(labels.size()));
        for (std::uint32_t l : labels) write_u32(out, l);
    }
    for (const auto& plist : index.postings) {
        write_u64(out, plist.size());
        for (const Posting& p : plist) {
            write_u32(out, p.entry);
            write_f64(out, p.value);
        }
    }
    if (!out) throw std::runtime_error("index write failed");
}

TrainingIndex load_index(std::istream& in) {
    char magic[4];
    read_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not an index file (bad magic)");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) {
        throw std::runtime_error("unsupported index version " + std::to_string(version));
    }
    const std::uint64_t num_entries = read_u64(in);
    const std::uint64_t num_features = read_u64(in);
    const std::uint64_t num_labels = read_u64(in);
    if (num_entries > UINT32_MAX || num_features > UINT32_MAX || num_labels > UINT32_MAX) {
        throw std::runtime_error("index dimensions out of range");
    }

    TrainingIndex index;
    index.num_features = static_cast<std::uint32_t>(num_features);
    index.num_labels = static_cast<std::uint32_t>(num_labels);
    index.norms.resize(num_entries);
    for (auto& n : index.norms) n = read_f64(in);
    index.support_sizes.resize(num_entries);
    for (auto& s : index.support_sizes) s = read_u32(in);
    index.label_sets.resize(num_entries);
    for (auto& labels : index.label_sets) {
        labels.resize(read_u32(in));
        std::uint32_t prev = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = read_u32(in);
            if (labels[i] >= num_labels || (i > 0 && labels[i] <= prev)) {
                throw std::runtime_error("index file corrupt: bad label set");
            }
            prev = labels[i];
        }
    }
    index.postings.resize(num_features);
    for (auto& plist : index.postings) {
        plist.resize(read_u64(in));
        std::uint32_t prev = 0;
        for (std::size_t i = 0; i < plist.size(); ++i) {
            plist[i].entry = read_u32(in);
            plist[i].value = read_f64(in);
            if (plist[i].entry >= num_entries || (i > 0 && plist[i].entry <= prev)) {
                throw std::runtime_error("index file corrupt: bad posting list");
            }
            prev = plist[i].entry;
        }
    }
    return index;
}

void save_index_file(const std::string& path, const TrainingIndex& index) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_index(out, index);
}

TrainingIndex load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return load_index(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace swnn
