#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "chaosmm/integrate.hpp"
#include "chaosmm/model.hpp"

namespace chaosmm {

// ---------------------------------------------------------------------------
// Poincare sections on v = 0 with vdot > 0

/// Crossing times are bisected on the cubic Hermite interpolant to this
/// tolerance (time units).
inline constexpr double kCrossingTimeTol = 1e-12;

struct PoincarePoint {
    std::size_t path_id = 0;
    double t = 0.0;
    double x = 0.0;
    double p_x = 0.0;
    double v = 0.0;    // interpolated inventory at the refined time
    double p_v = 0.0;
};

struct PathSection {
    std::vector<PoincarePoint> points;
    Termination status;
};

struct PoincareSection {
    // The surface is fixed: inventory coordinate, level 0, upward crossings.
    double energy_target = 0.0;
    ModelParams params;
    std::vector<PoincarePoint> points;
    std::vector<Termination> path_status;
};

/// Refined up-crossing for one step, or nullopt. `before`/`after` are
/// consecutive integrator samples separated by `dt`.
std::optional<PoincarePoint> refine_up_crossing(const ModelParams& params, const PhaseState& before,
                                                const PhaseState& after, double dt);

PathSection section_crossings(const ModelParams& params, const PhaseState& ic, double dt, std::size_t n_steps,
                              std::size_t path_id = 0, Scheme scheme = Scheme::Yoshida4);

PoincareSection poincare_section(const ModelParams& params, std::span<const PhaseState> ics, double dt,
                                 std::size_t n_steps, Scheme scheme = Scheme::Yoshida4);

/// General conic least-squares ellipse through (x - x0, p_x) points.
struct EllipseFit {
    bool valid = false;
    double centre_x = 0.0;
    double centre_y = 0.0;
    double m11 = 0.0;  // (z - c)^T M (z - c) = 1
    double m12 = 0.0;
    double m22 = 0.0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double max_radial_residual = 0.0;

    [[nodiscard]] double relative_residual() const noexcept {
        return valid ? max_radial_residual / semi_major : 0.0;
    }
};

EllipseFit fit_ellipse(std::span<const std::array<double, 2>> points);

/// Regularity test: points of a single path in (x - x0, p_x) lie on an ellipse
/// with max radial residual at most 1e-3 of the semi-major axis.
inline constexpr double kClosedCurveTol = 1e-3;
EllipseFit fit_section_ellipse(const ModelParams& params, std::span<const PoincarePoint> points);
bool is_closed_curve(const ModelParams& params, std::span<const PoincarePoint> points,
                     double tolerance = kClosedCurveTol);

// ---------------------------------------------------------------------------
// Lyapunov spectrum (tangent-map propagation with QR re-orthonormalisation)

inline constexpr double kZeroExponentThreshold = 1e-3;

struct LyapunovOptions {
    double dt = 0.01;
    std::size_t n_steps = 1'000'000;
    std::size_t renorm_every = 10;
    double zero_threshold = kZeroExponentThreshold;
    Scheme scheme = Scheme::Yoshida4;
    /// Running estimates are stored every `history_every` renormalisations.
    std::size_t history_every = 1;
};

struct LyapunovSpectrum {
    std::array<double, 4> exponents{};  // descending, inverse time units
    std::size_t renorm_interval = 0;
    std::vector<double> history_time;
    std::vector<std::array<double, 4>> history;
    double h_ks = 0.0;
    double elapsed_time = 0.0;
    Termination status;

    [[nodiscard]] double max_exponent() const noexcept { return exponents[0]; }
    [[nodiscard]] bool truncated() const noexcept { return !status.completed(); }
};

LyapunovSpectrum lyapunov_spectrum(const ModelParams& params, const PhaseState& ic, const LyapunovOptions& options = {});

/// Pesin estimate: sum of exponents strictly above the threshold.
double ks_entropy(std::span<const double> exponents, double zero_threshold = kZeroExponentThreshold);
double ks_entropy(const LyapunovSpectrum& spectrum, double zero_threshold = kZeroExponentThreshold);

// ---------------------------------------------------------------------------
// Series utilities

/// Angular frequency of the strongest non-DC spectral peak (Gaussian window,
/// log-parabolic peak interpolation). Needs at least 64 samples.
double dominant_frequency(std::span<const double> series, double dt);

enum class Component { Time, Price, Inventory, Q2, P1, P2, Energy };

std::vector<double> component_series(const Trajectory& traj, Component component);

/// Elements 0, every_n, 2*every_n, ... of the chosen component.
std::vector<double> subsample(const Trajectory& traj, std::size_t every_n, Component component);
std::vector<double> subsample(std::span<const double> series, std::size_t every_n);

struct Histogram {
    std::vector<double> edges;  // n_bins + 1
    std::vector<std::size_t> counts;
};

/// Uniform bins, right-open except the last which is closed. Without a range
/// the bins span [min, max] of the series; with a range, values outside it
/// are not counted.
Histogram histogram(std::span<const double> series, std::size_t n_bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

std::vector<double> differences(std::span<const double> series);
double lag1_autocorrelation(std::span<const double> series);

}  // namespace chaosmm
