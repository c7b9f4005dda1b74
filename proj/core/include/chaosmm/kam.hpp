#pragma once

// Action-angle variables of the uncoupled (epsilon = 0) static model and
// first-order averaging of the risk coupling epsilon*(x*v)^2/2.

#include <cstddef>
#include <cstdint>

#include "chaosmm/integrate.hpp"
#include "chaosmm/model.hpp"

namespace chaosmm::kam {

struct ActionAngle {
    double i_x = 0.0;
    double theta_x = 0.0;
    double i_v = 0.0;
    double theta_v = 0.0;
};

struct FrequencyReport {
    double omega_x = 0.0;
    double omega_v = 0.0;
    double omega_x_pred = 0.0;
    double omega_v_pred = 0.0;
    double resonance_distance = 0.0;
};

/// omega = sqrt(k/m) per oscillator. Requires StaticRisk with k_x > 0 and a
/// quadratic inventory potential with k_v > 0.
struct Frequencies {
    double omega_x;
    double omega_v;
};
Frequencies unperturbed_frequencies(const ModelParams& params);

double wrap_angle(double theta) noexcept;

ActionAngle to_action_angle(const ModelParams& params, const PhaseState& state);
PhaseState from_action_angle(const ModelParams& params, const ActionAngle& aa);

/// (eps/2) (x0^2 + I_x/(m_x w_x)) I_v/(m_v w_v)
double averaged_perturbation_closed_form(const ModelParams& params, double i_x, double i_v);

/// Double angle average of the coupling, by trapezoid quadrature on an
/// n_quad x n_quad grid. Cross-checked against the closed form; a mismatch
/// beyond 1e-10 throws std::logic_error.
double averaged_perturbation(const ModelParams& params, double i_x, double i_v, std::size_t n_quad = 64);

FrequencyReport predicted_frequencies(const ModelParams& params, double i_x, double i_v);

struct FrequencyMeasurement {
    double omega_x_measured = 0.0;
    double omega_v_measured = 0.0;
    // Actions averaged over the recorded orbit; angles unused.
    ActionAngle mean_actions;
    Termination status;
};

/// Integrates from the action-angle ic and takes the dominant spectral peak of
/// each coordinate (NaN for a flat coordinate). Needs at least 64 recorded
/// samples.
FrequencyMeasurement measure_frequencies(const ModelParams& params, const ActionAngle& ic, double dt,
                                         std::size_t n_steps, std::size_t record_every = 1,
                                         Scheme scheme = Scheme::Yoshida4);

enum class Transform {
    Standard,  // xi = sqrt(2I/(m w)) sin(theta), p = sqrt(2 I m w) cos(theta)
    Literal,   // xi = sqrt(2I/m) sin(theta),     p = sqrt(2 I k) cos(theta)
};

enum class Oscillator { Price, Inventory };

/// Max deviation of the finite-difference Poisson bracket {q, p} over
/// (theta, I) from unity, across n_samples random points.
double canonicality_check(const ModelParams& params, std::size_t n_samples, Transform transform = Transform::Standard,
                          Oscillator oscillator = Oscillator::Price, std::uint64_t seed = 20240229);

}  // namespace chaosmm::kam
