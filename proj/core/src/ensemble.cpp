#include "chaosmm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "chaosmm/error.hpp"

namespace chaosmm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SamplingBox default_sampling_box(const ModelParams& params, double energy_target) {
    const double reach = std::max(energy_target + 1.0, 0.0);
    const double p1 = std::sqrt(2.0 * params.m_x * reach);
    const double p2 = std::sqrt(2.0 * params.second_mass() * reach);
    SamplingBox box;
    box.bounds = {AxisRange{params.x_0 - 6.0, params.x_0 + 6.0}, AxisRange{-6.0, 6.0}, AxisRange{-p1, p1},
                  AxisRange{-p2, p2}};
    return box;
}

void EnsembleConfig::validate() const {
    params.validate();
    if (!std::isfinite(energy_target)) throw ValidationError("energy_target: must be finite");
    if (!(std::isfinite(energy_tol) && energy_tol > 0.0)) throw ValidationError("energy_tol: must be > 0");
    if (n_paths < 1) throw ValidationError("n_paths: must be >= 1");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt: must be finite and > 0");
    if (n_steps < 1) throw ValidationError("n_steps: must be >= 1");
    if (record_every < 1) throw ValidationError("record_every: must be >= 1");
    if (renorm_every < 1) throw ValidationError("renorm_every: must be >= 1");
    if (history_every < 1) throw ValidationError("history_every: must be >= 1");
    const SamplingBox b = box();
    const std::array<double, 4> equilibrium{params.x_0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < 4; ++i) {
        const AxisRange& r = b.bounds[i];
        if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi)) {
            throw ValidationError("sampling_box: bounds must be finite with lo <= hi");
        }
        if (!(r.lo <= equilibrium[i] && equilibrium[i] <= r.hi)) {
            throw ValidationError("sampling_box: must contain the equilibrium point");
        }
    }
}

SamplingBox EnsembleConfig::box() const {
    return sampling_box ? *sampling_box : default_sampling_box(params, energy_target);
}

LyapunovOptions EnsembleConfig::lyapunov_options() const {
    LyapunovOptions o;
    o.dt = dt;
    o.n_steps = n_steps;
    o.scheme = scheme;
    o.renorm_every = renorm_every;
    o.zero_threshold = zero_threshold;
    o.history_every = history_every;
    return o;
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t draw, std::uint64_t lane) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ path);
    h = splitmix64(h ^ draw);
    return splitmix64(h ^ lane);
}

double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t draw, std::uint64_t lane) noexcept {
    return static_cast<double>(counter_hash(seed, path, draw, lane) >> 11) * 0x1.0p-53;
}

PhaseState sample_initial_condition(const EnsembleConfig& config, std::size_t path_index) {
    const SamplingBox b = config.box();
    for (std::size_t draw = 0; draw < kMaxRejectedDraws; ++draw) {
        std::array<double, 4> z{};
        for (std::size_t lane = 0; lane < 4; ++lane) {
            const AxisRange& r = b.bounds[lane];
            z[lane] = r.lo + (r.hi - r.lo) * counter_uniform(config.master_seed, path_index, draw, lane);
        }
        const PhaseState s{z[0], z[1], z[2], z[3], 0.0};
        if (uses_risk_coordinates(config.params.kind) && !(std::abs(s.q1) >= singularity_threshold(config.params))) {
            continue;
        }
        if (std::abs(energy(config.params, s) - config.energy_target) <= config.energy_tol) return s;
    }
    throw SamplingExhaustedError("no initial condition within energy_tol of energy_target after " +
                                 std::to_string(kMaxRejectedDraws) + " draws (path " + std::to_string(path_index) + ")");
}

namespace {

PathResult run_path(const EnsembleConfig& config, AnalysisKind analysis, std::size_t index) {
    PathResult r;
    r.path_index = index;
    try {
        const PhaseState ic = sample_initial_condition(config, index);
        r.ic = ic;
        switch (analysis) {
            case AnalysisKind::Poincare: {
                PathSection sec = section_crossings(config.params, ic, config.dt, config.n_steps, index, config.scheme);
                if (!sec.status.completed()) {
                    r.error = std::string("path terminated: ") + std::string(to_string(sec.status.kind));
                }
                r.result = std::move(sec);
                break;
            }
            case AnalysisKind::Lyapunov: {
                LyapunovSpectrum spec = lyapunov_spectrum(config.params, ic, config.lyapunov_options());
                if (spec.truncated()) {
                    r.error = std::string("path terminated: ") + std::string(to_string(spec.status.kind));
                }
                r.result = std::move(spec);
                break;
            }
            case AnalysisKind::Trajectory: {
                Trajectory traj = integrate(config.params, ic, config.dt, config.n_steps, config.scheme,
                                            config.record_every);
                if (!traj.status.completed()) {
                    r.error = std::string("path terminated: ") + std::string(to_string(traj.status.kind));
                }
                r.result = std::move(traj);
                break;
            }
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

}  // namespace

std::vector<PathResult> run_ensemble(const EnsembleConfig& config, AnalysisKind analysis, std::size_t workers) {
    config.validate();
    std::vector<PathResult> results(config.n_paths);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.n_paths);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < config.n_paths; i = next.fetch_add(1)) {
            results[i] = run_path(config, analysis, i);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return results;
}

RangeStats range_stats(std::span<const double> values) {
    RangeStats s;
    if (values.empty()) return s;
    s.count = values.size();
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    return s;
}

}  // namespace chaosmm
