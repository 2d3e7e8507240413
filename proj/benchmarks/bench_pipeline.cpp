// bench_pipeline.cpp — Micro benchmarks of the bath kernels, Liouvillian assembly and spectra

#include <benchmark/benchmark.h>

#include "pcqed/exact_oracle.hpp"
#include "pcqed/master_equation.hpp"
#include "pcqed/spectra.hpp"

using namespace pcqed;

namespace {

SystemParams resonant(double g)
{
    SystemParams s;
    s.g = g;
    s.kappa = 0.5;
    return s;
}

void correlation_table_variational(benchmark::State& state)
{
    const BathParams p;
    const QuadratureGrid q = QuadratureGrid::standard(p);
    const VariationalProfile F = solve_variational(0.0, 2.23, p, q);
    const TauGrid tau = choose_tau_grid(F, p, 4.5, TauGridOptions{});
    for (auto _ : state) benchmark::DoNotOptimize(correlation_table(F, p, tau));
    state.SetLabel(std::to_string(tau.count) + " tau points");
}
BENCHMARK(correlation_table_variational)->Unit(benchmark::kMillisecond);

void build_and_assemble(benchmark::State& state)
{
    const auto method = static_cast<Method>(state.range(0));
    const BathParams p;
    for (auto _ : state) benchmark::DoNotOptimize(assemble(build(method, resonant(2.23), p)).matrix());
    state.SetLabel(to_string(method));
}
BENCHMARK(build_and_assemble)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void cavity_spectrum_variational(benchmark::State& state)
{
    const MasterEquationSpec spec = build_variational(resonant(state.range(0) / 100.0), BathParams{});
    for (auto _ : state) benchmark::DoNotOptimize(cavity_spectrum(spec));
}
BENCHMARK(cavity_spectrum_variational)->Arg(57)->Arg(223)->Arg(791)->Unit(benchmark::kMillisecond);

void oracle_four_modes(benchmark::State& state)
{
    BathParams p;
    p.temperature = 0.0;
    const DiscreteBath bath = discretize_bath(p, 4, 4.0 * p.nu_c, 2, 3);
    OracleOptions opts;
    opts.t_max = 20.0;
    for (auto _ : state) benchmark::DoNotOptimize(exact_evolve(resonant(2.23), bath, 0.0, opts));
}
BENCHMARK(oracle_four_modes)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
