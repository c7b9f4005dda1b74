#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "chaosmm/chaosmm.hpp"

using namespace chaosmm;

namespace {

ModelParams static_params() {
    ModelParams p;
    p.epsilon = 0.1;
    return p;
}

const PhaseState kStart{3.5, 2.0, 0.6, -1.5};

void BM_Step(benchmark::State& state) {
    const ModelParams p = static_params();
    const auto scheme = static_cast<Scheme>(state.range(0));
    PhaseState s = kStart;
    for (auto _ : state) {
        s = step(p, s, 0.01, scheme);
        benchmark::DoNotOptimize(s);
    }
    state.SetLabel(std::string(to_string(scheme)));
}
BENCHMARK(BM_Step)->Arg(static_cast<int>(Scheme::Leapfrog))->Arg(static_cast<int>(Scheme::Yoshida4));

void BM_StepVariational(benchmark::State& state) {
    const ModelParams p = static_params();
    PhaseState s = kStart;
    TangentFrame frame{};
    for (int i = 0; i < 4; ++i) frame[i][i] = 1.0;
    for (auto _ : state) {
        step_variational(p, s, frame, 0.01, Scheme::Yoshida4);
        benchmark::DoNotOptimize(frame);
        if (exceeds_blow_up(s)) s = kStart;
    }
}
BENCHMARK(BM_StepVariational);

void BM_Integrate(benchmark::State& state) {
    const ModelParams p = static_params();
    for (auto _ : state) {
        Trajectory tr = integrate(p, kStart, 0.01, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(tr.states.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Integrate)->Arg(10'000)->Arg(100'000);

void BM_Section(benchmark::State& state) {
    const ModelParams p = static_params();
    for (auto _ : state) {
        PathSection sec = section_crossings(p, kStart, 0.01, 100'000);
        benchmark::DoNotOptimize(sec.points.data());
    }
}
BENCHMARK(BM_Section)->Unit(benchmark::kMillisecond);

void BM_Lyapunov(benchmark::State& state) {
    const ModelParams p = static_params();
    LyapunovOptions opt;
    opt.n_steps = 100'000;
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(p, kStart, opt).exponents);
}
BENCHMARK(BM_Lyapunov)->Unit(benchmark::kMillisecond);

void BM_DominantFrequency(benchmark::State& state) {
    std::vector<double> s(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(0.3 * 0.1 * static_cast<double>(i));
    for (auto _ : state) benchmark::DoNotOptimize(dominant_frequency(s, 0.1));
}
BENCHMARK(BM_DominantFrequency)->Arg(1 << 12)->Arg(1 << 16);

void BM_SampleInitialCondition(benchmark::State& state) {
    EnsembleConfig c;
    c.params = static_params();
    c.energy_target = state.range(0);
    std::size_t path = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_initial_condition(c, path++));
}
BENCHMARK(BM_SampleInitialCondition)->Arg(1)->Arg(20);

void BM_AveragedPerturbation(benchmark::State& state) {
    const ModelParams p = static_params();
    for (auto _ : state) benchmark::DoNotOptimize(kam::averaged_perturbation(p, 0.1, 0.1));
}
BENCHMARK(BM_AveragedPerturbation);

}  // namespace

BENCHMARK_MAIN();
