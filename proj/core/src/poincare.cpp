#include <cmath>

#include "chaosmm/analysis.hpp"
#include "chaosmm/error.hpp"

namespace chaosmm {

namespace {

struct Hermite {
    double y0, m0, y1, m1, h;

    [[nodiscard]] double operator()(double tau) const {
        const double t2 = tau * tau;
        const double t3 = t2 * tau;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + tau) * h * m0 + (-2.0 * t3 + 3.0 * t2) * y1 +
               (t3 - t2) * h * m1;
    }
};

void require_static(const ModelParams& params) {
    if (params.kind != ModelKind::StaticRisk) {
        throw ValidationError("model.kind: Poincare sections are defined for the static model");
    }
}

}  // namespace

std::optional<PoincarePoint> refine_up_crossing(const ModelParams& params, const PhaseState& before,
                                                const PhaseState& after, double dt) {
    if (!(before.q2 < 0.0 && after.q2 >= 0.0)) return std::nullopt;

    const StateDerivative d0 = eom_rhs(params, before);
    const StateDerivative d1 = eom_rhs(params, after);
    const Hermite v{before.q2, d0.dq2, after.q2, d1.dq2, dt};

    double lo = 0.0;
    double hi = 1.0;
    const double tau_tol = kCrossingTimeTol / dt;
    while (hi - lo > tau_tol) {
        const double mid = 0.5 * (lo + hi);
        if (v(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double tau = 0.5 * (lo + hi);

    const Hermite x{before.q1, d0.dq1, after.q1, d1.dq1, dt};
    const Hermite px{before.p1, d0.dp1, after.p1, d1.dp1, dt};
    const Hermite pv{before.p2, d0.dp2, after.p2, d1.dp2, dt};

    PoincarePoint point;
    point.t = before.t + tau * dt;
    point.x = x(tau);
    point.p_x = px(tau);
    point.v = v(tau);
    point.p_v = pv(tau);
    if (!(point.p_v / params.m_v > 0.0)) return std::nullopt;
    return point;
}

PathSection section_crossings(const ModelParams& params, const PhaseState& ic, double dt, std::size_t n_steps,
                              std::size_t path_id, Scheme scheme) {
    params.validate();
    require_static(params);
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt: must be finite and > 0");

    PathSection out;
    PhaseState current = ic;
    const double t0 = ic.t;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        PhaseState next = step(params, current, dt, scheme);
        next.t = t0 + static_cast<double>(n) * dt;
        if (exceeds_blow_up(next)) {
            out.status = {Termination::Kind::BlowUp, n};
            return out;
        }
        if (auto p = refine_up_crossing(params, current, next, dt)) {
            p->path_id = path_id;
            out.points.push_back(*p);
        }
        current = next;
    }
    out.status = {Termination::Kind::Completed, n_steps};
    return out;
}

PoincareSection poincare_section(const ModelParams& params, std::span<const PhaseState> ics, double dt,
                                 std::size_t n_steps, Scheme scheme) {
    PoincareSection section;
    section.params = params;
    double e_sum = 0.0;
    for (std::size_t i = 0; i < ics.size(); ++i) {
        PathSection path = section_crossings(params, ics[i], dt, n_steps, i, scheme);
        section.points.insert(section.points.end(), path.points.begin(), path.points.end());
        section.path_status.push_back(path.status);
        e_sum += energy(params, ics[i]);
    }
    section.energy_target = ics.empty() ? 0.0 : e_sum / static_cast<double>(ics.size());
    return section;
}

}  // namespace chaosmm
