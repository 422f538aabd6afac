#include "avdb/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "avdb/csv.hpp"
#include "avdb/error.hpp"

namespace avdb {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ms_since(Clock::time_point t0) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0)
            .count());
}

struct Cell {
    std::string classifier;  // "knn" | "svm" | "cnn"
    int depth = 0;           // cnn only
    std::uint32_t epochs = 0;
};

std::vector<Cell> make_cells(const BenchConfig& cfg) {
    std::vector<Cell> cells;
    cells.push_back({"knn", 0, 0});
    cells.push_back({"svm", 0, 0});
    cells.push_back({"cnn", static_cast<int>(cfg.cnn.conv_channels.size()),
                     cfg.cnn.epochs});
    for (auto [depth, epochs] : cfg.cnn_grid)
        cells.push_back({"cnn", depth, static_cast<std::uint32_t>(epochs)});
    return cells;
}

BenchRow run_cell(const BenchData& data, std::uint64_t seed, const Cell& cell,
                  const BenchConfig& cfg) {
    SplitSpec spec{cfg.train_fraction, seed};
    const Dataset& full = cell.classifier == "cnn" ? data.raw : data.hog;
    auto [train, test] = split_train_test(full, spec);

    BenchRow row;
    row.classifier = cell.classifier;
    row.seed = seed;
    for (const auto& s : train.samples) row.train_ids.push_back(s.id);
    for (const auto& s : test.samples) row.test_ids.push_back(s.id);

    std::vector<Label> truth, preds;
    truth.reserve(test.size());
    for (const auto& s : test.samples) truth.push_back(s.label);
    preds.reserve(test.size());

    auto t0 = Clock::now();
    if (cell.classifier == "knn") {
        row.params = "k=" + std::to_string(cfg.knn_k);
        KnnModel m = knn_fit(train, cfg.knn_k);
        for (const auto& s : test.samples) preds.push_back(knn_predict(m, s.features));
    } else if (cell.classifier == "svm") {
        SvmTrainConfig sc = cfg.svm;
        sc.seed = seed;
        row.params = "lambda=" + format_double(sc.lambda) +
                     ";epochs=" + std::to_string(sc.epochs);
        SvmModel m = svm_train(train, sc);
        for (const auto& s : test.samples) preds.push_back(svm_predict(m, s.features));
    } else {
        CnnTrainConfig cc = cfg.cnn;
        cc.seed = seed;
        cc.conv_channels = default_conv_channels(cell.depth);
        cc.epochs = cell.epochs;
        row.params = "depth=" + std::to_string(cell.depth) +
                     ";epochs=" + std::to_string(cell.epochs);
        auto [m, log] = cnn_train(train, cc);
        const int size = m.input_size;
        for (const auto& s : test.samples)
            preds.push_back(cnn_predict(m, features_as_tensor(s.features, size)));
    }
    row.wall_time_ms = ms_since(t0);

    row.cm = confusion(preds, truth);
    row.rep = report(row.cm);
    row.rep.misclassified_ids = misclassified_ids(row.test_ids, preds, truth);
    return row;
}

}  // namespace

std::vector<std::string> bench_row_fields(const BenchRow& row) {
    return {row.classifier,
            std::to_string(row.seed),
            row.params,
            std::to_string(row.cm.tp),
            std::to_string(row.cm.tn),
            std::to_string(row.cm.fp),
            std::to_string(row.cm.fn),
            format_metric(row.rep.accuracy),
            format_metric(row.rep.sensitivity),
            format_metric(row.rep.precision),
            std::to_string(row.wall_time_ms)};
}

BenchData load_bench_data(const std::filesystem::path& root, int image_size) {
    BenchData data;
    data.hog = load_directory(root, image_size, FeatureMode::Hog);
    data.raw = load_directory(root, image_size, FeatureMode::RawPixels);
    return data;
}

BenchData synth_bench_data(std::uint32_t count_per_class, int size,
                           std::uint64_t corpus_seed) {
    BenchData data;
    data.hog = generate_synthetic(count_per_class, size, corpus_seed, FeatureMode::Hog);
    data.raw =
        generate_synthetic(count_per_class, size, corpus_seed, FeatureMode::RawPixels);
    return data;
}

std::vector<BenchRow> bench_seed(const BenchData& data, std::uint64_t seed,
                                 const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    for (const Cell& cell : make_cells(cfg)) rows.push_back(run_cell(data, seed, cell, cfg));
    return rows;
}

std::string ranking_line(const std::vector<BenchRow>& rows, std::uint64_t seed) {
    // Headline rows: the first knn/svm/cnn row for this seed, display-order
    // CNN, SVM, KNN before sorting so ties keep a fixed order.
    struct Entry {
        std::string name;
        double acc;
    };
    std::vector<Entry> entries;
    for (const char* want : {"cnn", "svm", "knn"}) {
        for (const auto& r : rows) {
            if (r.seed == seed && r.classifier == want) {
                std::string name = want;
                for (char& c : name) c = static_cast<char>(c - 'a' + 'A');
                entries.push_back({name, r.rep.accuracy.value_or(0.0)});
                break;
            }
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.acc > b.acc; });
    std::string line = "seed=" + std::to_string(seed) + " rank=";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) line += entries[i].acc == entries[i - 1].acc ? '=' : '>';
        line += entries[i].name;
    }
    return line;
}

unsigned bench_thread_cap() {
    const char* env = std::getenv("AVDB_THREADS");
    if (!env) return 0;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || v > 256) return 0;
    return static_cast<unsigned>(v);
}

std::vector<BenchRow> bench_all(const BenchData& data,
                                const std::vector<std::uint64_t>& seeds,
                                const BenchConfig& cfg) {
    std::vector<Cell> cells = make_cells(cfg);
    struct Task {
        std::uint64_t seed;
        const Cell* cell;
    };
    std::vector<Task> tasks;
    for (std::uint64_t seed : seeds)
        for (const Cell& cell : cells) tasks.push_back({seed, &cell});

    std::vector<BenchRow> rows(tasks.size());
    unsigned workers = bench_thread_cap();
    if (workers < 2) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            rows[i] = run_cell(data, tasks[i].seed, *tasks[i].cell, cfg);
        return rows;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            rows[i] = run_cell(data, tasks[i].seed, *tasks[i].cell, cfg);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(workers, tasks.size()); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace avdb
