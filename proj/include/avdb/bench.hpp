#pragma once

#include <cstdint>
#include <utility>

#include "avdb/cnn.hpp"
#include "avdb/dataset.hpp"
#include "avdb/knn.hpp"
#include "avdb/metrics.hpp"
#include "avdb/svm.hpp"

namespace avdb {

inline constexpr const char* kCsvHeader =
    "classifier,seed,params,tp,tn,fp,fn,accuracy,sensitivity,precision,wall_time_ms";

struct BenchRow {
    std::string classifier;
    std::uint64_t seed = 0;
    std::string params;
    ConfusionMatrix cm;
    MetricReport rep;
    std::uint64_t wall_time_ms = 0;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

std::vector<std::string> bench_row_fields(const BenchRow& row);

struct BenchConfig {
    double train_fraction = 0.8;
    std::uint32_t knn_k = 5;
    SvmTrainConfig svm;
    CnnTrainConfig cnn;
    /// (conv depth, epochs) sweep run after the three headline classifiers.
    std::vector<std::pair<int, int>> cnn_grid = {{2, 60}, {2, 80}, {3, 60},
                                                 {3, 80}, {4, 60}, {4, 80}};
};

/// The corpus featurized both ways, with identical (class, id) ordering so a
/// split computed on one applies to the other.
struct BenchData {
    Dataset hog;  // knn + svm input
    Dataset raw;  // cnn input
};

BenchData load_bench_data(const std::filesystem::path& root, int image_size);
BenchData synth_bench_data(std::uint32_t count_per_class, int size,
                           std::uint64_t corpus_seed);

/// Runs knn, svm, cnn on the identical seeded split, then the depth/epoch
/// grid. Classifier and training seeds equal the split seed.
std::vector<BenchRow> bench_seed(const BenchData& data, std::uint64_t seed,
                                 const BenchConfig& cfg);

/// "seed=7 rank=CNN>SVM>KNN" from that seed's three headline rows; ties are
/// joined with '='.
std::string ranking_line(const std::vector<BenchRow>& rows, std::uint64_t seed);

/// Worker cap from AVDB_THREADS (0 or unset = serial).
unsigned bench_thread_cap();

/// Runs one bench cell per (seed, cell) task, optionally in parallel; row
/// order is deterministic regardless of thread count.
std::vector<BenchRow> bench_all(const BenchData& data,
                                const std::vector<std::uint64_t>& seeds,
                                const BenchConfig& cfg);

}  // namespace avdb
