#pragma once

// Market-maker Hamiltonians: price x coupled to market-maker inventory v
// through the risk term epsilon*(x*v)^2/2.
//
// StaticRisk   H = px^2/2mx + pv^2/2mv + kx(x-x0)^2/2 + eps(xv)^2/2 + f(v)
// DynamicRisk  H = px^2/2mx + pu^2/2mu + kx(x-x0)^2/2 + eps u^2/2,  u = xv
// LimitedDepth DynamicRisk + f(u/x)
//
// The two risk-position models are carried in canonical (x, u, px, pu)
// coordinates, where H is separable; inventory is reconstructed as v = u/x.

#include <array>
#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace chaosmm {

enum class ModelKind { StaticRisk, DynamicRisk, LimitedDepth };

std::string_view to_string(ModelKind kind);

struct QuadraticPotential {
    double k_v = 0.0;
};

/// f(v) = k_v (|v| - v_max) outside the band |v| < v_max, zero inside.
struct KickPotential {
    double k_v = 0.0;
    double v_max = 1.0;
};

struct NoPotential {};

using InventoryPotential = std::variant<NoPotential, QuadraticPotential, KickPotential>;

double inventory_value(const InventoryPotential& f, double v);
double inventory_slope(const InventoryPotential& f, double v);
double inventory_curvature(const InventoryPotential& f, double v);

struct ModelParams {
    ModelKind kind = ModelKind::StaticRisk;
    double m_x = 1.0;
    double m_v = 1.0;
    double m_u = 1.0;
    double k_x = 0.11;
    double x_0 = 3.0;
    double epsilon = 0.0;
    InventoryPotential inventory = QuadraticPotential{0.1};

    /// Throws ValidationError naming the offending field.
    void validate() const;

    /// Inertia of the second canonical coordinate (m_v or m_u).
    [[nodiscard]] double second_mass() const noexcept {
        return kind == ModelKind::StaticRisk ? m_v : m_u;
    }

    /// x0 = 3, k_x = 0.11, k_v = 0.1, m_x = m_v = 1.
    static ModelParams reference_static(double epsilon);
};

/// |x| below this is treated as leaving the domain where v = u/x exists.
double singularity_threshold(const ModelParams& params) noexcept;

bool uses_risk_coordinates(ModelKind kind) noexcept;

/// (q1, q2) = (x, v) for StaticRisk and (x, u) otherwise.
struct PhaseState {
    double q1 = 0.0;
    double q2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double t = 0.0;
};

struct StateDerivative {
    double dq1 = 0.0;
    double dq2 = 0.0;
    double dp1 = 0.0;
    double dp2 = 0.0;
};

struct Gradient2 {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Symmetric 2x2 matrix.
struct Hessian2 {
    double h11 = 0.0;
    double h12 = 0.0;
    double h22 = 0.0;
};

/// Second-order state (x, v, xdot, vdot) used by the Euler-Lagrange route.
struct LagrangeState {
    double x = 0.0;
    double v = 0.0;
    double x_dot = 0.0;
    double v_dot = 0.0;
    double t = 0.0;
};

struct Acceleration {
    double x_ddot = 0.0;
    double v_ddot = 0.0;
};

double potential(const ModelParams& params, double q1, double q2);
double kinetic(const ModelParams& params, const PhaseState& state) noexcept;
double energy(const ModelParams& params, const PhaseState& state);

/// Potential as a function of price and inventory for every model.
double potential_xv(const ModelParams& params, double x, double v);

Gradient2 grad_potential(const ModelParams& params, double q1, double q2);
Hessian2 hessian_potential(const ModelParams& params, double q1, double q2);
StateDerivative eom_rhs(const ModelParams& params, const PhaseState& state);

/// Accelerations in (x, v) from the Euler-Lagrange equations. The
/// LimitedDepth branch reproduces the published reduced form verbatim.
Acceleration el_rhs(const ModelParams& params, const LagrangeState& state);

/// Inventory v = q2/q1 for risk-coordinate models, q2 otherwise.
double inventory_of(const ModelParams& params, const PhaseState& state);

/// Conversions between canonical state and (x, v, xdot, vdot).
LagrangeState to_lagrange(const ModelParams& params, const PhaseState& state);
PhaseState from_lagrange(const ModelParams& params, const LagrangeState& state);

struct DynamicInitial {
    double x = 0.0;
    double x_dot = 0.0;
    double u = 0.0;
    double u_dot = 0.0;
};

struct DynamicSolution {
    double x = 0.0;
    double u = 0.0;
    double v = 0.0;
    double x_dot = 0.0;
    double u_dot = 0.0;
};

/// Exact solution of the DynamicRisk model: two independent oscillators
/// in x and u. Throws SingularityError when x(t) is too close to zero.
DynamicSolution dynamic_closed_form(const ModelParams& params, const DynamicInitial& ic, double t);

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

struct PotentialGrid {
    std::vector<double> x_values;
    std::vector<double> v_values;
    std::vector<double> values;  // row-major: values[i * v_values.size() + j]

    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        return values[i * v_values.size() + j];
    }
};

PotentialGrid potential_grid(const ModelParams& params, AxisRange x_range, AxisRange v_range, std::size_t n);

}  // namespace chaosmm
