#include <benchmark/benchmark.h>

#include <random>

#include "lcsense/touchstone.hpp"

namespace {

lcsense::touchstone::TouchstoneDocument sample_doc(std::size_t points, std::size_t ports) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> mag(1e-3, 1.0);
    std::uniform_real_distribution<double> phase(-3.0, 3.0);
    lcsense::touchstone::TouchstoneDocument doc;
    doc.option_line = {lcsense::touchstone::FrequencyUnit::mhz,
                       lcsense::touchstone::Parameter::s, lcsense::touchstone::Format::ri, 50.0};
    doc.ports = ports;
    for (std::size_t p = 0; p < points; ++p) {
        doc.frequencies_hz.push_back(1e6 * static_cast<double>(p + 1));
        for (std::size_t c = 0; c < ports * ports; ++c) {
            doc.values.push_back(std::polar(mag(rng), phase(rng)));
        }
    }
    return doc;
}

void BM_TouchstoneParse(benchmark::State& state) {
    const auto text = lcsense::touchstone::write(
        sample_doc(static_cast<std::size_t>(state.range(0)), 2),
        lcsense::touchstone::Format::ri);
    for (auto _ : state) {
        auto doc = lcsense::touchstone::parse(text);
        benchmark::DoNotOptimize(doc.values.data());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_TouchstoneParse)->Arg(1000)->Arg(10000);

void BM_TouchstoneWrite(benchmark::State& state) {
    const auto doc = sample_doc(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        auto text = lcsense::touchstone::write(doc, lcsense::touchstone::Format::ma);
        benchmark::DoNotOptimize(text.data());
    }
}
BENCHMARK(BM_TouchstoneWrite)->Arg(1000)->Arg(10000);

}  // namespace
