#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "lcsense/readout.hpp"
#include "lcsense/rfnet.hpp"

namespace {

void BM_FindDips(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto grid = lcsense::rfnet::FrequencyGrid::linspace(0.5e6, 30e6, n);
    std::vector<double> trace(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = (grid[i] - 6.78e6) / 0.2e6;
        const double b = (grid[i] - 8.26e6) / 0.3e6;
        trace[i] = -12.0 * std::exp(-a * a) - 6.0 * std::exp(-b * b);
    }
    for (auto _ : state) {
        auto dips = lcsense::readout::find_dips(grid.points(), trace, 1.0);
        benchmark::DoNotOptimize(dips.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FindDips)->Arg(10000)->Arg(100000);

void BM_Invert(benchmark::State& state) {
    std::vector<lcsense::readout::CalibrationSample> samples;
    for (double t = 20.0; t <= 110.0 + 1e-9; t += 10.0) {
        samples.push_back({t, 7.03e6 + 2.38e6 * (1.0 - std::exp(-(t - 20.0) / 25.0))});
    }
    const auto curve = lcsense::readout::CalibrationCurve::from_samples(std::move(samples));
    double f = 7.1e6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lcsense::readout::invert(curve, f));
        f += 1e3;
        if (f > 9.3e6) f = 7.1e6;
    }
}
BENCHMARK(BM_Invert);

}  // namespace
