#include <benchmark/benchmark.h>

#include <limits>
#include <random>

#include "uncertain_eval/belief.hpp"
#include "uncertain_eval/classification.hpp"
#include "uncertain_eval/segmentation.hpp"
#include "uncertain_eval/synth.hpp"

using namespace ueval;

namespace {

struct Boundaries {
    FoundBoundary found;
    ReferenceBoundary ref;
};

Boundaries random_boundaries(std::size_t side, std::size_t pixels) {
    std::mt19937_64 rng(side * 131 + pixels);
    std::uniform_int_distribution<std::int64_t> u(0, static_cast<std::int64_t>(side) - 1);
    std::uniform_int_distribution<GradeId> g(0, 2);
    std::vector<Pixel> found;
    std::vector<BoundaryPixel> ref;
    for (std::size_t i = 0; i < pixels; ++i) {
        found.push_back({u(rng), u(rng)});
        ref.push_back({{u(rng), u(rng)}, g(rng)});
    }
    return {FoundBoundary(side, side, std::move(found)), ReferenceBoundary(side, side, 3, std::move(ref))};
}

void BM_MatchBoundaries(benchmark::State& state) {
    const auto b = random_boundaries(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const auto scale = CertaintyScale::default_scale();
    for (auto _ : state) benchmark::DoNotOptimize(match_boundaries(b.found, b.ref, scale));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.found.size()));
}
BENCHMARK(BM_MatchBoundaries)->Args({64, 200})->Args({512, 4000})->Args({2048, 20000});

// All-pairs scan for comparison with the bucket grid.
void BM_MatchBruteForce(benchmark::State& state) {
    const auto b = random_boundaries(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        std::int64_t total = 0;
        for (const auto& f : b.found.pixels()) {
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (const auto& e : b.ref.pixels()) {
                const auto dx = e.pos.x - f.x, dy = e.pos.y - f.y;
                best = std::min(best, dx * dx + dy * dy);
            }
            total += best;
        }
        benchmark::DoNotOptimize(total);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.found.size()));
}
BENCHMARK(BM_MatchBruteForce)->Args({64, 200})->Args({512, 4000});

void BM_CombineAppriou(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<std::vector<double>> sources(3, std::vector<double>(n));
    for (auto& s : sources)
        for (double& v : s) v = u(rng);
    FusionConfig config;
    config.normalization = {1.0, 1.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(decide(fuse_sources(FusionModel::Appriou, sources, config)));
}
BENCHMARK(BM_CombineAppriou)->Arg(3)->Arg(6)->Arg(12)->Arg(16);

void BM_AccumulateImage(benchmark::State& state) {
    SynthParams p;
    p.width = p.height = static_cast<std::size_t>(state.range(0));
    p.noise = 0.2;
    const auto img = synth(p);
    const auto comps = compose_tiles(img.labels, TileSpec(p.tile, p.width, p.height));
    const auto scale = CertaintyScale::default_scale();
    for (auto _ : state)
        benchmark::DoNotOptimize(accumulate_image(p.num_classes, comps, img.prediction, scale, true));
}
BENCHMARK(BM_AccumulateImage)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
