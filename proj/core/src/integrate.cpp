#include "chaosmm/integrate.hpp"

#include <cmath>
#include <string>

#include "chaosmm/error.hpp"

namespace chaosmm {

std::string_view to_string(Scheme scheme) {
    return scheme == Scheme::Leapfrog ? "leapfrog" : "yoshida4";
}

std::string_view to_string(Termination::Kind kind) {
    switch (kind) {
        case Termination::Kind::Completed:
            return "completed";
        case Termination::Kind::BlowUp:
            return "blow_up";
        case Termination::Kind::SingularityExit:
            return "singularity_exit";
    }
    return "unknown";
}

namespace {

void kick(const ModelParams& params, PhaseState& s, double h) {
    const Gradient2 g = grad_potential(params, s.q1, s.q2);
    s.p1 -= h * g.d1;
    s.p2 -= h * g.d2;
}

void drift(const ModelParams& params, PhaseState& s, double h) {
    s.q1 += h * s.p1 / params.m_x;
    s.q2 += h * s.p2 / params.second_mass();
}

void kick_frame(const ModelParams& params, PhaseState& s, TangentFrame& frame, double h) {
    const Gradient2 g = grad_potential(params, s.q1, s.q2);
    const Hessian2 hs = hessian_potential(params, s.q1, s.q2);
    s.p1 -= h * g.d1;
    s.p2 -= h * g.d2;
    for (Tangent& d : frame) {
        d[2] -= h * (hs.h11 * d[0] + hs.h12 * d[1]);
        d[3] -= h * (hs.h12 * d[0] + hs.h22 * d[1]);
    }
}

void drift_frame(const ModelParams& params, PhaseState& s, TangentFrame& frame, double h) {
    const double inv_m1 = 1.0 / params.m_x;
    const double inv_m2 = 1.0 / params.second_mass();
    s.q1 += h * s.p1 * inv_m1;
    s.q2 += h * s.p2 * inv_m2;
    for (Tangent& d : frame) {
        d[0] += h * d[2] * inv_m1;
        d[1] += h * d[3] * inv_m2;
    }
}

bool crossed_singularity(const ModelParams& params, double x_prev, double x_next) {
    if (!uses_risk_coordinates(params.kind)) return false;
    return !(std::abs(x_next) >= singularity_threshold(params)) || std::signbit(x_prev) != std::signbit(x_next);
}

void check_run_args(double dt, std::size_t n_steps, std::size_t record_every) {
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt: must be finite and > 0");
    if (n_steps < 1) throw ValidationError("n_steps: must be >= 1");
    if (record_every < 1) throw ValidationError("record_every: must be >= 1");
}

}  // namespace

PhaseState step_leapfrog(const ModelParams& params, const PhaseState& state, double dt) {
    PhaseState s = state;
    kick(params, s, 0.5 * dt);
    drift(params, s, dt);
    kick(params, s, 0.5 * dt);
    s.t += dt;
    return s;
}

// Three leapfrog substeps (w1, w0, w1); the adjacent half-kicks at shared
// positions are merged.
PhaseState step_yoshida4(const ModelParams& params, const PhaseState& state, double dt) {
    PhaseState s = state;
    const double a = kYoshidaW1 * dt;
    const double b = kYoshidaW0 * dt;
    kick(params, s, 0.5 * a);
    drift(params, s, a);
    kick(params, s, 0.5 * (a + b));
    drift(params, s, b);
    kick(params, s, 0.5 * (a + b));
    drift(params, s, a);
    kick(params, s, 0.5 * a);
    s.t += dt;
    return s;
}

PhaseState step(const ModelParams& params, const PhaseState& state, double dt, Scheme scheme) {
    return scheme == Scheme::Leapfrog ? step_leapfrog(params, state, dt) : step_yoshida4(params, state, dt);
}

void step_variational(const ModelParams& params, PhaseState& s, TangentFrame& frame, double dt, Scheme scheme) {
    if (scheme == Scheme::Leapfrog) {
        kick_frame(params, s, frame, 0.5 * dt);
        drift_frame(params, s, frame, dt);
        kick_frame(params, s, frame, 0.5 * dt);
    } else {
        const double a = kYoshidaW1 * dt;
        const double b = kYoshidaW0 * dt;
        kick_frame(params, s, frame, 0.5 * a);
        drift_frame(params, s, frame, a);
        kick_frame(params, s, frame, 0.5 * (a + b));
        drift_frame(params, s, frame, b);
        kick_frame(params, s, frame, 0.5 * (a + b));
        drift_frame(params, s, frame, a);
        kick_frame(params, s, frame, 0.5 * a);
    }
    s.t += dt;
}

bool exceeds_blow_up(const PhaseState& s) noexcept {
    for (double c : {s.q1, s.q2, s.p1, s.p2}) {
        if (!(std::abs(c) <= kBlowUpThreshold)) return true;
    }
    return false;
}

Trajectory integrate(const ModelParams& params, const PhaseState& ic, double dt, std::size_t n_steps, Scheme scheme,
                     std::size_t record_every) {
    params.validate();
    check_run_args(dt, n_steps, record_every);
    for (double c : {ic.q1, ic.q2, ic.p1, ic.p2, ic.t}) {
        if (!std::isfinite(c)) throw ValidationError("initial_state: components must be finite");
    }

    Trajectory traj;
    traj.params = params;
    traj.scheme = scheme;
    traj.dt = dt;
    traj.record_every = record_every;
    traj.states.reserve(n_steps / record_every + 1);
    traj.energies.reserve(n_steps / record_every + 1);

    const double t0 = ic.t;
    if (uses_risk_coordinates(params.kind) && !(std::abs(ic.q1) >= singularity_threshold(params))) {
        traj.status = {Termination::Kind::SingularityExit, 0};
        return traj;
    }
    try {
        traj.energies.push_back(energy(params, ic));
    } catch (const SingularityError&) {
        traj.status = {Termination::Kind::SingularityExit, 0};
        return traj;
    }
    traj.states.push_back(ic);

    PhaseState current = ic;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        PhaseState next;
        try {
            next = step(params, current, dt, scheme);
        } catch (const SingularityError&) {
            traj.status = {Termination::Kind::SingularityExit, n};
            return traj;
        }
        next.t = t0 + static_cast<double>(n) * dt;
        if (exceeds_blow_up(next)) {
            traj.status = {Termination::Kind::BlowUp, n};
            return traj;
        }
        if (crossed_singularity(params, current.q1, next.q1)) {
            traj.status = {Termination::Kind::SingularityExit, n};
            return traj;
        }
        if (n % record_every == 0) {
            try {
                traj.energies.push_back(energy(params, next));
            } catch (const SingularityError&) {
                traj.status = {Termination::Kind::SingularityExit, n};
                return traj;
            }
            traj.states.push_back(next);
        }
        current = next;
    }
    traj.status = {Termination::Kind::Completed, n_steps};
    return traj;
}

namespace {

struct ElDerivative {
    double dx, dv, dx_dot, dv_dot;
};

ElDerivative el_derivative(const ModelParams& params, const LagrangeState& s) {
    const Acceleration a = el_rhs(params, s);
    return {s.x_dot, s.v_dot, a.x_ddot, a.v_ddot};
}

LagrangeState advance(const LagrangeState& s, const ElDerivative& d, double h) {
    return {s.x + h * d.dx, s.v + h * d.dv, s.x_dot + h * d.dx_dot, s.v_dot + h * d.dv_dot, s.t};
}

bool el_blow_up(const LagrangeState& s) {
    for (double c : {s.x, s.v, s.x_dot, s.v_dot}) {
        if (!(std::abs(c) <= kBlowUpThreshold)) return true;
    }
    return false;
}

}  // namespace

ElTrajectory integrate_el_rk4(const ModelParams& params, const LagrangeState& ic, double dt, std::size_t n_steps,
                              std::size_t record_every) {
    params.validate();
    check_run_args(dt, n_steps, record_every);

    ElTrajectory traj;
    traj.dt = dt;
    traj.record_every = record_every;
    if (uses_risk_coordinates(params.kind) && !(std::abs(ic.x) >= singularity_threshold(params))) {
        traj.status = {Termination::Kind::SingularityExit, 0};
        return traj;
    }
    traj.states.reserve(n_steps / record_every + 1);
    traj.states.push_back(ic);

    const double t0 = ic.t;
    LagrangeState s = ic;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        LagrangeState next;
        try {
            const ElDerivative k1 = el_derivative(params, s);
            const ElDerivative k2 = el_derivative(params, advance(s, k1, 0.5 * dt));
            const ElDerivative k3 = el_derivative(params, advance(s, k2, 0.5 * dt));
            const ElDerivative k4 = el_derivative(params, advance(s, k3, dt));
            const double w = dt / 6.0;
            next = {s.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
                    s.v + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
                    s.x_dot + w * (k1.dx_dot + 2.0 * k2.dx_dot + 2.0 * k3.dx_dot + k4.dx_dot),
                    s.v_dot + w * (k1.dv_dot + 2.0 * k2.dv_dot + 2.0 * k3.dv_dot + k4.dv_dot),
                    t0 + static_cast<double>(n) * dt};
        } catch (const SingularityError&) {
            traj.status = {Termination::Kind::SingularityExit, n};
            return traj;
        }
        if (el_blow_up(next)) {
            traj.status = {Termination::Kind::BlowUp, n};
            return traj;
        }
        if (crossed_singularity(params, s.x, next.x)) {
            traj.status = {Termination::Kind::SingularityExit, n};
            return traj;
        }
        if (n % record_every == 0) traj.states.push_back(next);
        s = next;
    }
    traj.status = {Termination::Kind::Completed, n_steps};
    return traj;
}

}  // namespace chaosmm
