// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to the core count.

#include <benchmark/benchmark.h>

#include "gridsentinel/dataset.hpp"
#include "gridsentinel/kernels.hpp"
#include "gridsentinel/knn.hpp"
#include "gridsentinel/rng.hpp"

using namespace gridsentinel;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

// Shapes close to the default campaign: 1092 features.
const Matrix& queries() {
    static const Matrix m = random_matrix(128, 1092, 1);
    return m;
}
const Matrix& reference() {
    static const Matrix m = random_matrix(1024, 1092, 2);
    return m;
}

void BM_MinkowskiP1_Serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_minkowski_serial(queries(), reference(), 1.0));
}
void BM_MinkowskiP1_Parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_minkowski(queries(), reference(), 1.0));
}
void BM_MinkowskiP3_Serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_minkowski_serial(queries(), reference(), 3.0));
}
void BM_MinkowskiP3_Parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_minkowski(queries(), reference(), 3.0));
}
void BM_SqEuclidean_Serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_sq_euclidean_serial(reference(), reference()));
}
void BM_SqEuclidean_Parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_sq_euclidean(reference(), reference()));
}

const KnnModel& knn() {
    static const KnnModel m = [] {
        LabelVector y;
        for (Eigen::Index i = 0; i < reference().rows(); ++i) y.push_back(static_cast<int>(i % 17));
        return train_knn(reference(), y, {5, 2.0});
    }();
    return m;
}
void BM_KnnPredict_Serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(knn().predict_serial(queries()));
}
void BM_KnnPredict_Parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(knn().predict(queries()));
}

CampaignConfig small_campaign() {
    CampaignConfig c;
    c.campaign = Campaign::Simultaneous;
    c.k_simultaneous = 300;
    c.n_normal = 60;
    return c;
}
void BM_Generate_Serial(benchmark::State& st) {
    const CampaignConfig c = small_campaign();
    for (auto _ : st) benchmark::DoNotOptimize(generate_dataset_serial(ieee14(), c));
}
void BM_Generate_Parallel(benchmark::State& st) {
    const CampaignConfig c = small_campaign();
    for (auto _ : st) benchmark::DoNotOptimize(generate_dataset(ieee14(), c));
}

}  // namespace

BENCHMARK(BM_MinkowskiP1_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinkowskiP1_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MinkowskiP3_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinkowskiP3_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SqEuclidean_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SqEuclidean_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KnnPredict_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnPredict_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Generate_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Generate_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
