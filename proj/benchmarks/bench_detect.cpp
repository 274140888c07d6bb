#include <benchmark/benchmark.h>

#include "hlt/pipeline.hpp"

using namespace hlt;

namespace {

struct Fixture {
    HyperCube roi;
    BandGrouping grouping;
    TargetModel model;
    IntegralHistStack stack;

    Fixture()
        : roi(make_roi()),
          grouping(make_grouping(roi.bands, 12)),
          model(init_target_model(roi, init_bbox(), grouping)),
          stack(build_integral_histograms(roi, 10)) {}

    static HyperCube make_roi() {
        SceneRenderer renderer(default_benchmark_config(0));
        return crop_roi(renderer.render_frame(0), {28, 28, 200, 200});
    }
    static Rect init_bbox() { return {100, 100, 8, 4}; }

    static const Fixture& get() {
        static Fixture f;
        return f;
    }
};

void BM_IntegralHistograms(benchmark::State& state) {
    const auto& f = Fixture::get();
    for (auto _ : state)
        benchmark::DoNotOptimize(build_integral_histograms(f.roi, 10));
}
BENCHMARK(BM_IntegralHistograms)->Unit(benchmark::kMillisecond);

void BM_LikelihoodMaps(benchmark::State& state) {
    const auto& f = Fixture::get();
    int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            compute_all_likelihood_maps(f.stack, f.grouping, f.model, threads));
}
BENCHMARK(BM_LikelihoodMaps)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_AdaptiveFuse(benchmark::State& state) {
    const auto& f = Fixture::get();
    auto maps = compute_all_likelihood_maps(f.stack, f.grouping, f.model, 1);
    for (auto _ : state) benchmark::DoNotOptimize(adaptive_fuse(maps));
}
BENCHMARK(BM_AdaptiveFuse)->Unit(benchmark::kMillisecond);

void BM_DetectTotal(benchmark::State& state) {
    const auto& f = Fixture::get();
    for (auto _ : state) {
        auto stack = build_integral_histograms(f.roi, 10);
        auto maps = compute_all_likelihood_maps(stack, f.grouping, f.model, 1);
        auto fused = adaptive_fuse(maps).first;
        benchmark::DoNotOptimize(extract_candidates(fused, stack, f.grouping));
    }
}
BENCHMARK(BM_DetectTotal)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
