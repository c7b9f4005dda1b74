#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "chaosmm/model.hpp"

namespace chaosmm {

enum class Scheme { Leapfrog, Yoshida4 };

std::string_view to_string(Scheme scheme);

/// Yoshida triple-jump weights: w1 = 1/(2 - 2^(1/3)), w0 = 1 - 2 w1.
inline constexpr double kYoshidaW1 = 1.3512071919596578;
inline constexpr double kYoshidaW0 = 1.0 - 2.0 * kYoshidaW1;

/// Any state component beyond this magnitude terminates a run.
inline constexpr double kBlowUpThreshold = 1e12;

struct Termination {
    enum class Kind { Completed, BlowUp, SingularityExit };
    Kind kind = Kind::Completed;
    std::size_t step = 0;  // step index at which the run stopped

    [[nodiscard]] bool completed() const noexcept { return kind == Kind::Completed; }
};

std::string_view to_string(Termination::Kind kind);

struct Trajectory {
    ModelParams params;
    Scheme scheme = Scheme::Yoshida4;
    double dt = 0.0;
    std::size_t record_every = 1;
    std::vector<PhaseState> states;
    std::vector<double> energies;
    Termination status;

    /// Spacing between consecutive recorded samples.
    [[nodiscard]] double sample_dt() const noexcept { return dt * static_cast<double>(record_every); }
};

PhaseState step_leapfrog(const ModelParams& params, const PhaseState& state, double dt);
PhaseState step_yoshida4(const ModelParams& params, const PhaseState& state, double dt);
PhaseState step(const ModelParams& params, const PhaseState& state, double dt, Scheme scheme);

/// Fixed-step symplectic integration. Abnormal termination is reported in
/// Trajectory::status rather than thrown; bad arguments throw ValidationError.
Trajectory integrate(const ModelParams& params, const PhaseState& ic, double dt, std::size_t n_steps,
                     Scheme scheme = Scheme::Yoshida4, std::size_t record_every = 1);

struct ElTrajectory {
    double dt = 0.0;
    std::size_t record_every = 1;
    std::vector<LagrangeState> states;
    Termination status;
};

/// Classical RK4 on the first-order reduction of el_rhs.
ElTrajectory integrate_el_rk4(const ModelParams& params, const LagrangeState& ic, double dt, std::size_t n_steps,
                              std::size_t record_every = 1);

/// Tangent vector (dq1, dq2, dp1, dp2).
using Tangent = std::array<double, 4>;
using TangentFrame = std::array<Tangent, 4>;

/// Advances the state together with tangent vectors under the linearisation
/// of the same discrete map, so the tangent map is exactly symplectic.
void step_variational(const ModelParams& params, PhaseState& state, TangentFrame& frame, double dt, Scheme scheme);

bool exceeds_blow_up(const PhaseState& state) noexcept;

}  // namespace chaosmm
