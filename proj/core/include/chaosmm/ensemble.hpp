#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chaosmm/analysis.hpp"
#include "chaosmm/integrate.hpp"
#include "chaosmm/model.hpp"

namespace chaosmm {

/// Per-coordinate bounds (q1, q2, p1, p2) for candidate initial conditions.
struct SamplingBox {
    std::array<AxisRange, 4> bounds{};
};

/// Positions x0 +/- 6 and q2 in [-6, 6]; momenta +/- sqrt(2 m (E + 1)).
SamplingBox default_sampling_box(const ModelParams& params, double energy_target);

inline constexpr std::size_t kMaxRejectedDraws = 1'000'000;

struct EnsembleConfig {
    ModelParams params;
    double energy_target = 1.0;
    double energy_tol = 0.01;
    std::size_t n_paths = 1;
    std::uint64_t master_seed = 0;
    double dt = 0.01;
    std::size_t n_steps = 100'000;
    Scheme scheme = Scheme::Yoshida4;
    std::size_t record_every = 1;
    std::optional<SamplingBox> sampling_box;
    // Lyapunov runs reuse dt, n_steps and scheme from above.
    std::size_t renorm_every = 10;
    double zero_threshold = kZeroExponentThreshold;
    std::size_t history_every = 1000;

    void validate() const;
    [[nodiscard]] SamplingBox box() const;
    [[nodiscard]] LyapunovOptions lyapunov_options() const;
};

/// Counter-based generator: a pure function of its four keys.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t draw, std::uint64_t lane) noexcept;
double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t draw, std::uint64_t lane) noexcept;

/// First uniform draw from the box whose energy lies within energy_tol of the
/// target. Throws SamplingExhaustedError after kMaxRejectedDraws rejections.
PhaseState sample_initial_condition(const EnsembleConfig& config, std::size_t path_index);

enum class AnalysisKind { Poincare, Lyapunov, Trajectory };

struct PathResult {
    std::size_t path_index = 0;
    std::optional<PhaseState> ic;
    std::string error;  // non-empty when the path failed
    std::variant<std::monostate, PathSection, LyapunovSpectrum, Trajectory> result;

    [[nodiscard]] bool ok() const noexcept { return error.empty(); }
};

/// Runs every path (sample + analysis) on up to `workers` threads; 0 means
/// hardware concurrency. Results are ordered by path index and do not depend
/// on the worker count.
std::vector<PathResult> run_ensemble(const EnsembleConfig& config, AnalysisKind analysis, std::size_t workers = 1);

struct RangeStats {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;

    [[nodiscard]] double range() const noexcept { return max - min; }
};

RangeStats range_stats(std::span<const double> values);

}  // namespace chaosmm
