#include "chaosmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaosmm/error.hpp"

namespace chaosmm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) {
        throw ValidationError(field + ": " + what);
    }
}

bool finite(double x) { return std::isfinite(x); }

double guarded_inverse(const ModelParams& params, double x) {
    if (!(std::abs(x) >= singularity_threshold(params))) {
        throw SingularityError("price too close to zero for v = u/x (x = " + std::to_string(x) + ")");
    }
    return 1.0 / x;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::StaticRisk:
            return "static";
        case ModelKind::DynamicRisk:
            return "dynamic";
        case ModelKind::LimitedDepth:
            return "limited";
    }
    return "unknown";
}

double inventory_value(const InventoryPotential& f, double v) {
    return std::visit(Overloaded{
                          [](const NoPotential&) { return 0.0; },
                          [v](const QuadraticPotential& q) { return 0.5 * q.k_v * v * v; },
                          [v](const KickPotential& k) {
                              const double a = std::abs(v);
                              return a > k.v_max ? k.k_v * (a - k.v_max) : 0.0;
                          },
                      },
                      f);
}

// At |v| == v_max the inside branch (zero force) applies.
double inventory_slope(const InventoryPotential& f, double v) {
    return std::visit(Overloaded{
                          [](const NoPotential&) { return 0.0; },
                          [v](const QuadraticPotential& q) { return q.k_v * v; },
                          [v](const KickPotential& k) {
                              if (std::abs(v) <= k.v_max) return 0.0;
                              return v > 0.0 ? k.k_v : -k.k_v;
                          },
                      },
                      f);
}

double inventory_curvature(const InventoryPotential& f, double /*v*/) {
    return std::visit(Overloaded{
                          [](const NoPotential&) { return 0.0; },
                          [](const QuadraticPotential& q) { return q.k_v; },
                          [](const KickPotential&) { return 0.0; },
                      },
                      f);
}

void ModelParams::validate() const {
    require(finite(m_x) && m_x > 0.0, "m_x", "must be finite and > 0");
    if (kind == ModelKind::StaticRisk) {
        require(finite(m_v) && m_v > 0.0, "m_v", "must be finite and > 0");
    } else {
        require(finite(m_u) && m_u > 0.0, "m_u", "must be finite and > 0");
    }
    require(finite(k_x) && k_x >= 0.0, "k_x", "must be finite and >= 0");
    require(finite(x_0), "x_0", "must be finite");
    require(finite(epsilon) && epsilon >= 0.0, "epsilon", "must be finite and >= 0");

    std::visit(Overloaded{
                   [](const NoPotential&) {},
                   [](const QuadraticPotential& q) {
                       require(finite(q.k_v) && q.k_v >= 0.0, "inventory_potential.k_v", "must be finite and >= 0");
                   },
                   [](const KickPotential& k) {
                       require(finite(k.k_v) && k.k_v >= 0.0, "inventory_potential.k_v", "must be finite and >= 0");
                       require(finite(k.v_max) && k.v_max > 0.0, "inventory_potential.v_max", "must be finite and > 0");
                   },
               },
               inventory);

    if (kind == ModelKind::DynamicRisk) {
        require(std::holds_alternative<NoPotential>(inventory), "inventory_potential",
                "dynamic model takes no inventory potential");
    }
    if (kind == ModelKind::LimitedDepth) {
        require(!std::holds_alternative<NoPotential>(inventory), "inventory_potential",
                "limited-depth model needs a quadratic or kick potential");
    }
}

ModelParams ModelParams::reference_static(double epsilon) {
    ModelParams p;
    p.kind = ModelKind::StaticRisk;
    p.m_x = 1.0;
    p.m_v = 1.0;
    p.k_x = 0.11;
    p.x_0 = 3.0;
    p.epsilon = epsilon;
    p.inventory = QuadraticPotential{0.1};
    return p;
}

double singularity_threshold(const ModelParams& params) noexcept {
    return 1e-6 * std::max(1.0, std::abs(params.x_0));
}

bool uses_risk_coordinates(ModelKind kind) noexcept { return kind != ModelKind::StaticRisk; }

double potential(const ModelParams& params, double q1, double q2) {
    const double dx = q1 - params.x_0;
    const double price = 0.5 * params.k_x * dx * dx;
    switch (params.kind) {
        case ModelKind::StaticRisk: {
            const double risk = q1 * q2;
            return price + 0.5 * params.epsilon * risk * risk + inventory_value(params.inventory, q2);
        }
        case ModelKind::DynamicRisk:
            return price + 0.5 * params.epsilon * q2 * q2;
        case ModelKind::LimitedDepth: {
            const double v = q2 * guarded_inverse(params, q1);
            return price + 0.5 * params.epsilon * q2 * q2 + inventory_value(params.inventory, v);
        }
    }
    return 0.0;
}

double kinetic(const ModelParams& params, const PhaseState& s) noexcept {
    return 0.5 * s.p1 * s.p1 / params.m_x + 0.5 * s.p2 * s.p2 / params.second_mass();
}

double energy(const ModelParams& params, const PhaseState& s) {
    return kinetic(params, s) + potential(params, s.q1, s.q2);
}

double potential_xv(const ModelParams& params, double x, double v) {
    const double dx = x - params.x_0;
    const double risk = x * v;
    double value = 0.5 * params.k_x * dx * dx + 0.5 * params.epsilon * risk * risk;
    if (params.kind != ModelKind::DynamicRisk) {
        value += inventory_value(params.inventory, v);
    }
    return value;
}

Gradient2 grad_potential(const ModelParams& params, double q1, double q2) {
    const double price_force = params.k_x * (q1 - params.x_0);
    switch (params.kind) {
        case ModelKind::StaticRisk:
            return {price_force + params.epsilon * q2 * q2 * q1,
                    params.epsilon * q1 * q1 * q2 + inventory_slope(params.inventory, q2)};
        case ModelKind::DynamicRisk:
            return {price_force, params.epsilon * q2};
        case ModelKind::LimitedDepth: {
            const double inv_x = guarded_inverse(params, q1);
            const double v = q2 * inv_x;
            const double slope = inventory_slope(params.inventory, v);
            return {price_force - slope * v * inv_x, params.epsilon * q2 + slope * inv_x};
        }
    }
    return {};
}

Hessian2 hessian_potential(const ModelParams& params, double q1, double q2) {
    switch (params.kind) {
        case ModelKind::StaticRisk:
            return {params.k_x + params.epsilon * q2 * q2, 2.0 * params.epsilon * q1 * q2,
                    params.epsilon * q1 * q1 + inventory_curvature(params.inventory, q2)};
        case ModelKind::DynamicRisk:
            return {params.k_x, 0.0, params.epsilon};
        case ModelKind::LimitedDepth: {
            // f(u/x) with v = u/x
            const double inv_x = guarded_inverse(params, q1);
            const double v = q2 * inv_x;
            const double f1 = inventory_slope(params.inventory, v);
            const double f2 = inventory_curvature(params.inventory, v);
            const double inv_x2 = inv_x * inv_x;
            return {params.k_x + (f2 * v * v + 2.0 * f1 * v) * inv_x2, -(f2 * v + f1) * inv_x2,
                    params.epsilon + f2 * inv_x2};
        }
    }
    return {};
}

StateDerivative eom_rhs(const ModelParams& params, const PhaseState& s) {
    const Gradient2 g = grad_potential(params, s.q1, s.q2);
    return {s.p1 / params.m_x, s.p2 / params.second_mass(), -g.d1, -g.d2};
}

Acceleration el_rhs(const ModelParams& params, const LagrangeState& s) {
    const double x = s.x;
    const double v = s.v;
    switch (params.kind) {
        case ModelKind::StaticRisk: {
            const double stiffness = (params.k_x + params.epsilon * v * v) / params.m_x;
            return {-stiffness * x + (params.k_x / params.m_x) * params.x_0,
                    -(params.epsilon * x * x * v + inventory_slope(params.inventory, v)) / params.m_v};
        }
        case ModelKind::DynamicRisk:
        case ModelKind::LimitedDepth: {
            const double inv_x = guarded_inverse(params, x);
            const double pull = params.k_x * (x - params.x_0) / params.m_x;
            Acceleration a{-pull, -2.0 * (s.x_dot * inv_x) * s.v_dot - (params.epsilon / params.m_u - pull * inv_x) * v};
            if (params.kind == ModelKind::LimitedDepth) {
                const double slope = inventory_slope(params.inventory, v);
                a.x_ddot += v * inv_x * slope;
                a.v_ddot -= (1.0 + v * inv_x) * slope;
            }
            return a;
        }
    }
    return {};
}

double inventory_of(const ModelParams& params, const PhaseState& s) {
    if (!uses_risk_coordinates(params.kind)) return s.q2;
    return s.q2 * guarded_inverse(params, s.q1);
}

LagrangeState to_lagrange(const ModelParams& params, const PhaseState& s) {
    const double x_dot = s.p1 / params.m_x;
    if (!uses_risk_coordinates(params.kind)) {
        return {s.q1, s.q2, x_dot, s.p2 / params.m_v, s.t};
    }
    const double inv_x = guarded_inverse(params, s.q1);
    const double u_dot = s.p2 / params.m_u;
    return {s.q1, s.q2 * inv_x, x_dot, (u_dot * s.q1 - s.q2 * x_dot) * inv_x * inv_x, s.t};
}

PhaseState from_lagrange(const ModelParams& params, const LagrangeState& s) {
    if (!uses_risk_coordinates(params.kind)) {
        return {s.x, s.v, params.m_x * s.x_dot, params.m_v * s.v_dot, s.t};
    }
    const double u = s.x * s.v;
    const double u_dot = s.x_dot * s.v + s.x * s.v_dot;
    return {s.x, u, params.m_x * s.x_dot, params.m_u * u_dot, s.t};
}

namespace {

struct OscillatorAt {
    double position;
    double velocity;
};

// y'' = -w^2 (y - centre); w == 0 degrades to free motion.
OscillatorAt harmonic(double centre, double y0, double v0, double w, double t) {
    if (w == 0.0) {
        return {y0 + v0 * t, v0};
    }
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    const double d = y0 - centre;
    return {centre + d * c + (v0 / w) * s, -d * w * s + v0 * c};
}

}  // namespace

DynamicSolution dynamic_closed_form(const ModelParams& params, const DynamicInitial& ic, double t) {
    if (params.kind != ModelKind::DynamicRisk) {
        throw ValidationError("model.kind: closed form exists only for the dynamic model");
    }
    const double w_x = std::sqrt(params.k_x / params.m_x);
    const double w_u = std::sqrt(params.epsilon / params.m_u);
    const OscillatorAt x = harmonic(params.x_0, ic.x, ic.x_dot, w_x, t);
    const OscillatorAt u = harmonic(0.0, ic.u, ic.u_dot, w_u, t);
    if (!(std::abs(x.position) >= singularity_threshold(params))) {
        throw SingularityError("closed form: x(t) = 0, inventory undefined");
    }
    return {x.position, u.position, u.position / x.position, x.velocity, u.velocity};
}

PotentialGrid potential_grid(const ModelParams& params, AxisRange x_range, AxisRange v_range, std::size_t n) {
    params.validate();
    require(n >= 2, "n", "grid needs at least 2 points per axis");
    require(finite(x_range.lo) && finite(x_range.hi) && x_range.lo < x_range.hi, "x_range", "must satisfy lo < hi");
    require(finite(v_range.lo) && finite(v_range.hi) && v_range.lo < v_range.hi, "v_range", "must satisfy lo < hi");

    auto axis = [n](AxisRange r) {
        std::vector<double> a(n);
        const double step = (r.hi - r.lo) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) a[i] = r.lo + step * static_cast<double>(i);
        a.back() = r.hi;
        return a;
    };

    PotentialGrid grid;
    grid.x_values = axis(x_range);
    grid.v_values = axis(v_range);
    grid.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            grid.values[i * n + j] = potential_xv(params, grid.x_values[i], grid.v_values[j]);
        }
    }
    return grid;
}

}  // namespace chaosmm
