#include <benchmark/benchmark.h>

#include "lcsense/coupled.hpp"

namespace {

lcsense::coupled::CoupledSystem reference_system() {
    lcsense::coupled::CoupledSystem sys;
    sys.reader = {8.35e-6, 3.5, 0.0};
    sys.reader_tuning_capacitance = 66e-12;
    sys.sensor = {8.35e-6, 3.5, 0.0};
    sys.sensor_capacitance = 46e-12;
    sys.k = 0.05;
    sys.port_impedance = 50.0;
    return sys;
}

void BM_CoupledSweep(benchmark::State& state) {
    const auto sys = reference_system();
    const auto grid =
        lcsense::rfnet::FrequencyGrid::linspace(0.5e6, 30e6, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto sweep = lcsense::coupled::sweep(sys, grid);
        benchmark::DoNotOptimize(sweep.s.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CoupledSweep)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_TemperatureSweep(benchmark::State& state) {
    auto sys = reference_system();
    lcsense::composite::CompositeResponseModel model;
    model.kind = lcsense::composite::ResponseKind::exp_decay;
    model.c_ref = 46e-12;
    model.t_ref = 20.0;
    model.rr_max = 0.855;
    model.tau = 300.0;
    model.tand_ref = 0.02;
    sys.sensor_capacitance = model;
    const auto grid = lcsense::rfnet::FrequencyGrid::linspace(0.5e6, 30e6, 4096);
    std::vector<double> temps;
    for (double t = 20.0; t <= 110.0; t += 10.0) temps.push_back(t);
    for (auto _ : state) {
        auto sweeps = lcsense::coupled::temperature_sweep(sys, grid, temps);
        benchmark::DoNotOptimize(sweeps.data());
    }
}
BENCHMARK(BM_TemperatureSweep);

}  // namespace

BENCHMARK_MAIN();
