#include "swnn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "swnn/dataset.hpp"
#include "swnn/eval.hpp"
#include "swnn/gram.hpp"
#include "swnn/inverted_index.hpp"
#include "swnn/knn.hpp"
#include "swnn/ovr.hpp"

namespace swnn::cli {

namespace {

constexpr double kPsdTolerance = -1e-8;

// Default sweep: (alpha, beta) pairs tried first, then the neighborhood
// sizes retried with the best pair.
constexpr std::pair<double, std::uint32_t> kGridPairs[] = {
    {0.0, 0}, {0.5, 0}, {1.0, 0}, {1.0, 1}, {2.0, 0}, {2.0, 1}};
constexpr std::uint32_t kGridSizes[] = {25, 50, 75};

struct Options {
    std::string train_path;
    std::string test_path;
    std::string index_path;
    std::string weights_path;
    std::string out_path;
    std::uint32_t neighborhood = 0;  // 0 = derive from training labels
    double alpha = 1.0;
    std::uint32_t beta = 1;
    std::uint32_t top_k = 5;
    std::vector<std::uint32_t> ks = {1, 3, 5};
    unsigned workers = 0;  // 0 = logical cores
    std::string fallback = "none";
    bool grid = false;
    bool json_stdout = false;
    std::uint64_t seed = 1;
    std::uint32_t samples = 30;
};

unsigned default_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// S defaults to the average number of labels per training entry, rounded up.
std::uint32_t default_neighborhood(const TrainingIndex& index) {
    std::uint64_t total = 0;
    for (const LabelSet& labels : index.label_sets) total += labels.size();
    if (index.num_entries() == 0 || total == 0) return 1;
    const double avg = static_cast<double>(total) / static_cast<double>(index.num_entries());
    return static_cast<std::uint32_t>(std::ceil(avg));
}

TrainingIndex obtain_index(const Options& opt) {
    if (!opt.index_path.empty()) return load_index_file(opt.index_path);
    if (opt.train_path.empty()) {
        throw CLI::RequiredError("--train or --index");
    }
    return build_index(load_dataset(opt.train_path));
}

HyperParams make_hyper_params(const Options& opt, const TrainingIndex& index) {
    HyperParams hp;
    hp.neighborhood_size = opt.neighborhood > 0 ? opt.neighborhood : default_neighborhood(index);
    hp.vote_exponent = opt.alpha;
    hp.jaccard_exponent = opt.beta;
    hp.top_k = opt.top_k;
    hp.validate();
    return hp;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        auto out = open_out(out_path);
        out << text;
        if (!out) throw std::runtime_error("write failed: " + out_path);
    }
}

int cmd_stats(const Options& opt) {
    const Dataset dataset = load_dataset(opt.train_path);
    const DatasetStats stats = dataset_statistics(dataset);
    if (opt.json_stdout) {
        std::cout << stats_to_json(stats) << '\n';
    } else {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "entries=%zu features=%u labels=%u\n", dataset.size(),
                      dataset.num_features, dataset.num_labels);
        std::cout << buf;
        write_stats_table(std::cout, stats);
    }
    if (!opt.out_path.empty()) {
        auto out = open_out(opt.out_path);
        out << stats_to_json(stats) << '\n';
    }
    return 0;
}

int cmd_index(const Options& opt) {
    const TrainingIndex index = build_index(load_dataset(opt.train_path));
    save_index_file(opt.out_path, index);
    std::size_t postings = 0;
    for (const auto& plist : index.postings) postings += plist.size();
    std::fprintf(stderr, "indexed %zu entries, %u features, %zu postings -> %s\n",
                 index.num_entries(), index.num_features, postings, opt.out_path.c_str());
    return 0;
}

PredictOptions make_predict_options(const Options& opt,
                                    std::vector<std::pair<std::uint32_t, double>>& fallback,
                                    const TrainingIndex& index) {
    PredictOptions options;
    if (opt.fallback == "popular") {
        fallback = most_frequent_labels(index);
        options.fallback_ranking = &fallback;
    }
    return options;
}

int cmd_predict(const Options& opt) {
    const TrainingIndex index = obtain_index(opt);
    const Dataset test = load_dataset(opt.test_path);
    const HyperParams hp = make_hyper_params(opt, index);
    std::vector<std::pair<std::uint32_t, double>> fallback;
    const PredictOptions options = make_predict_options(opt, fallback, index);

    const BatchResult batch =
        predict_batch(index, test.features, hp, default_workers(opt.workers), options);
    if (opt.out_path.empty()) {
        write_predictions_tsv(std::cout, batch.predictions);
    } else {
        auto out = open_out(opt.out_path);
        write_predictions_tsv(out, batch.predictions);
        if (!out) throw std::runtime_error("write failed: " + opt.out_path);
    }
    return 0;
}

int cmd_ovr_predict(const Options& opt) {
    const SparseWeightIndex weights = load_weights_file(opt.weights_path);
    const Dataset test = load_dataset(opt.test_path);
    std::vector<Prediction> predictions(test.size());
    OvrScratch scratch;
    for (std::size_t i = 0; i < test.size(); ++i) {
        predictions[i].ranked = ovr_scores(weights, test.features[i], opt.top_k, &scratch);
    }
    if (opt.out_path.empty()) {
        write_predictions_tsv(std::cout, predictions);
    } else {
        auto out = open_out(opt.out_path);
        write_predictions_tsv(out, predictions);
        if (!out) throw std::runtime_error("write failed: " + opt.out_path);
    }
    return 0;
}

void print_grid_row(const HyperParams& hp, const EvalReport& report) {
    char buf[200];
    std::string line;
    std::snprintf(buf, sizeof(buf), "S=%-4u alpha=%-4g beta=%u ", hp.neighborhood_size,
                  hp.vote_exponent, hp.jaccard_exponent);
    line = buf;
    for (const auto& [k, v] : report.precision_at) {
        std::snprintf(buf, sizeof(buf), " P@%u=%6.2f%%", k, 100.0 * v);
        line += buf;
    }
    std::cout << line << '\n';
}

int cmd_eval(const Options& opt) {
    const TrainingIndex index = obtain_index(opt);
    const Dataset test = load_dataset(opt.test_path);
    std::vector<std::pair<std::uint32_t, double>> fallback;
    const PredictOptions options = make_predict_options(opt, fallback, index);
    const unsigned workers = default_workers(opt.workers);

    if (!opt.grid) {
        const HyperParams hp = make_hyper_params(opt, index);
        const EvalReport report = evaluate(index, test, hp, opt.ks, workers, options);
        write_report_table(std::cout, report);
        if (!opt.out_path.empty()) {
            auto out = open_out(opt.out_path);
            out << report_to_json(report) << '\n';
        }
        return 0;
    }

    // Grid search: every (alpha, beta) pair at the derived S, then the best
    // pair at S = 25, 50, 75.
    std::vector<std::pair<HyperParams, EvalReport>> runs;
    HyperParams base = make_hyper_params(opt, index);
    const std::uint32_t derived_s =
        opt.neighborhood > 0 ? opt.neighborhood : default_neighborhood(index);
    std::size_t best = 0;
    for (const auto& [alpha, beta] : kGridPairs) {
        HyperParams hp = base;
        hp.neighborhood_size = derived_s;
        hp.vote_exponent = alpha;
        hp.jaccard_exponent = beta;
        runs.emplace_back(hp, evaluate(index, test, hp, opt.ks, workers, options));
        print_grid_row(hp, runs.back().second);
        if (runs.back().second.precision_at[0].second > runs[best].second.precision_at[0].second) {
            best = runs.size() - 1;
        }
    }
    const HyperParams best_pair = runs[best].first;
    for (std::uint32_t s : kGridSizes) {
        HyperParams hp = best_pair;
        hp.neighborhood_size = s;
        runs.emplace_back(hp, evaluate(index, test, hp, opt.ks, workers, options));
        print_grid_row(hp, runs.back().second);
    }
    if (!opt.out_path.empty()) {
        std::string json = "[\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            json += report_to_json(runs[i].second);
            json += (i + 1 < runs.size()) ? ",\n" : "\n";
        }
        json += "]\n";
        auto out = open_out(opt.out_path);
        out << json;
    }
    return 0;
}

int cmd_bench(const Options& opt) {
    const TrainingIndex index = obtain_index(opt);
    const Dataset test = load_dataset(opt.test_path);
    const HyperParams hp = make_hyper_params(opt, index);

    // Single thread, per the per-entry latency framing.
    const BatchResult batch = predict_batch(index, test.features, hp, 1, {}, true);
    const LatencyStats& lat = batch.latency;
    const double n = static_cast<double>(std::max<std::size_t>(test.size(), 1));
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "queries=%llu mean=%.4f ms p50=%.4f ms p99=%.4f ms throughput=%.1f queries/s\n",
                  static_cast<unsigned long long>(lat.queries), lat.mean_ms, lat.p50_ms,
                  lat.p99_ms, lat.queries_per_sec);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf),
                  "postings visited=%llu (%.1f/query) candidates=%llu (%.1f/query) "
                  "out-of-range features=%llu\n",
                  static_cast<unsigned long long>(batch.totals.postings_visited),
                  static_cast<double>(batch.totals.postings_visited) / n,
                  static_cast<unsigned long long>(batch.totals.candidates),
                  static_cast<double>(batch.totals.candidates) / n,
                  static_cast<unsigned long long>(batch.totals.out_of_range_features));
    std::cout << buf;

    if (!opt.out_path.empty()) {
        char json[512];
        std::snprintf(json, sizeof(json),
                      "{\n  \"queries\": %llu,\n  \"mean_ms\": %.6f,\n  \"p50_ms\": %.6f,\n"
                      "  \"p99_ms\": %.6f,\n  \"queries_per_sec\": %.3f,\n"
                      "  \"postings_visited\": %llu,\n  \"candidates\": %llu,\n"
                      "  \"out_of_range_features\": %llu\n}\n",
                      static_cast<unsigned long long>(lat.queries), lat.mean_ms, lat.p50_ms,
                      lat.p99_ms, lat.queries_per_sec,
                      static_cast<unsigned long long>(batch.totals.postings_visited),
                      static_cast<unsigned long long>(batch.totals.candidates),
                      static_cast<unsigned long long>(batch.totals.out_of_range_features));
        emit(opt.out_path, json);
    }
    return 0;
}

int cmd_kernel_check(const Options& opt) {
    const Dataset dataset = load_dataset(opt.train_path);
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t i = 0; i < dataset.size(); ++i) {
        if (!dataset.features[i].empty()) eligible.push_back(i);
    }
    if (eligible.empty()) throw std::runtime_error("kernel-check: no non-empty entries");

    const std::size_t want = std::min<std::size_t>(opt.samples, std::min<std::size_t>(
                                                                    eligible.size(), 64));
    std::mt19937_64 rng(opt.seed);
    std::vector<std::uint32_t> picked;
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(picked), want, rng);
    std::vector<SparseVector> sampled;
    sampled.reserve(picked.size());
    for (std::uint32_t i : picked) sampled.push_back(dataset.features[i]);

    bool ok = true;
    char buf[128];
    for (std::uint32_t beta = 0; beta <= 3; ++beta) {
        const double min_eig = gram_min_eigenvalue(sampled, beta);
        const bool pass = min_eig >= kPsdTolerance;
        ok = ok && pass;
        std::snprintf(buf, sizeof(buf), "beta=%u n=%zu min_eigenvalue=% .3e %s\n", beta,
                      sampled.size(), min_eig, pass ? "ok" : "VIOLATION");
        std::cout << buf;
    }
    return ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
    Options opt;
    CLI::App app{"sparse weighted nearest-neighbor multi-label toolkit"};
    app.require_subcommand(1);

    auto add_train = [&](CLI::App* cmd, bool required) {
        auto* o = cmd->add_option("--train", opt.train_path, "training dataset file");
        if (required) o->required();
    };
    auto add_test = [&](CLI::App* cmd) {
        cmd->add_option("--test", opt.test_path, "test dataset file")->required();
    };
    auto add_index_opt = [&](CLI::App* cmd) {
        cmd->add_option("--index", opt.index_path, "serialized index file (instead of --train)");
    };
    auto add_hyper = [&](CLI::App* cmd) {
        cmd->add_option("--S", opt.neighborhood, "neighborhood size (default: avg labels/entry)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--alpha", opt.alpha, "vote-weight exponent")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--beta", opt.beta, "Jaccard exponent (non-negative integer)");
    };
    auto add_workers = [&](CLI::App* cmd) {
        cmd->add_option("--workers", opt.workers, "worker threads (default: logical cores)");
    };
    auto add_out = [&](CLI::App* cmd, const char* what, bool required = false) {
        auto* o = cmd->add_option("--out", opt.out_path, what);
        if (required) o->required();
    };
    auto add_fallback = [&](CLI::App* cmd) {
        cmd->add_option("--fallback", opt.fallback, "ranking for queries with no candidates")
            ->check(CLI::IsMember({"none", "popular"}));
    };

    auto* stats = app.add_subcommand("stats", "dataset summary statistics");
    add_train(stats, true);
    stats->add_flag("--json", opt.json_stdout, "print JSON instead of a table");
    add_out(stats, "also write JSON statistics to this file");

    auto* index_cmd = app.add_subcommand("index", "build and serialize the training index");
    add_train(index_cmd, true);
    add_out(index_cmd, "output index file", true);

    auto* predict = app.add_subcommand("predict", "rank labels for every test entry");
    add_train(predict, false);
    add_index_opt(predict);
    add_test(predict);
    add_hyper(predict);
    predict->add_option("--topk", opt.top_k, "labels per query")->check(CLI::PositiveNumber);
    add_workers(predict);
    add_fallback(predict);
    add_out(predict, "output TSV file (default: stdout)");

    auto* ovr = app.add_subcommand("ovr-predict", "one-vs-rest linear baseline prediction");
    ovr->add_option("--weights", opt.weights_path, "weight file")->required();
    add_test(ovr);
    ovr->add_option("--topk", opt.top_k, "labels per query")->check(CLI::PositiveNumber);
    add_out(ovr, "output TSV file (default: stdout)");

    auto* eval = app.add_subcommand("eval", "evaluate Precision@K on a test set");
    add_train(eval, false);
    add_index_opt(eval);
    add_test(eval);
    add_hyper(eval);
    eval->add_option("--k", opt.ks, "Precision@K cutoffs, comma separated")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    add_workers(eval);
    add_fallback(eval);
    eval->add_flag("--grid", opt.grid, "run the standard hyper-parameter grid");
    add_out(eval, "write the JSON report to this file");

    auto* bench = app.add_subcommand("bench", "single-thread per-query latency benchmark");
    add_train(bench, false);
    add_index_opt(bench);
    add_test(bench);
    add_hyper(bench);
    add_out(bench, "write the JSON latency report to this file");

    auto* kernel = app.add_subcommand("kernel-check", "min Gram eigenvalue per beta on a sample");
    add_train(kernel, true);
    kernel->add_option("--seed", opt.seed, "sampling seed");
    kernel->add_option("--samples", opt.samples, "sample size (max 64)")
        ->check(CLI::Range(1, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (stats->parsed()) return cmd_stats(opt);
        if (index_cmd->parsed()) return cmd_index(opt);
        if (predict->parsed()) return cmd_predict(opt);
        if (ovr->parsed()) return cmd_ovr_predict(opt);
        if (eval->parsed()) return cmd_eval(opt);
        if (bench->parsed()) return cmd_bench(opt);
        if (kernel->parsed()) return cmd_kernel_check(opt);
    } catch (const CLI::RequiredError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("swnn");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace swnn::cli
