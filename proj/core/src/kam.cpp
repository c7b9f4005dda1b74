#include "chaosmm/kam.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>

#include "chaosmm/analysis.hpp"
#include "chaosmm/error.hpp"

namespace chaosmm::kam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double inventory_stiffness(const ModelParams& params) {
    const auto* q = std::get_if<QuadraticPotential>(&params.inventory);
    if (!q) throw ValidationError("inventory_potential: action-angle variables need a quadratic potential");
    return q->k_v;
}

struct Pair {
    double q;
    double p;
};

Pair oscillator_point(double i, double theta, double m, double k, Transform transform) {
    if (transform == Transform::Standard) {
        const double w = std::sqrt(k / m);
        return {std::sqrt(2.0 * i / (m * w)) * std::sin(theta), std::sqrt(2.0 * i * m * w) * std::cos(theta)};
    }
    return {std::sqrt(2.0 * i / m) * std::sin(theta), std::sqrt(2.0 * i * k) * std::cos(theta)};
}

}  // namespace

Frequencies unperturbed_frequencies(const ModelParams& params) {
    params.validate();
    if (params.kind != ModelKind::StaticRisk) throw ValidationError("model.kind: action-angle form needs the static model");
    const double k_v = inventory_stiffness(params);
    if (!(params.k_x > 0.0)) throw ValidationError("k_x: zero stiffness has no angle variable");
    if (!(k_v > 0.0)) throw ValidationError("inventory_potential.k_v: zero stiffness has no angle variable");
    return {std::sqrt(params.k_x / params.m_x), std::sqrt(k_v / params.m_v)};
}

double wrap_angle(double theta) noexcept {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

ActionAngle to_action_angle(const ModelParams& params, const PhaseState& s) {
    const auto [w_x, w_v] = unperturbed_frequencies(params);
    const double xi = s.q1 - params.x_0;
    const double mw_x = params.m_x * w_x;
    const double mw_v = params.m_v * w_v;
    ActionAngle aa;
    aa.i_x = 0.5 * (s.p1 * s.p1 / mw_x + mw_x * xi * xi);
    aa.theta_x = wrap_angle(std::atan2(mw_x * xi, s.p1));
    aa.i_v = 0.5 * (s.p2 * s.p2 / mw_v + mw_v * s.q2 * s.q2);
    aa.theta_v = wrap_angle(std::atan2(mw_v * s.q2, s.p2));
    return aa;
}

PhaseState from_action_angle(const ModelParams& params, const ActionAngle& aa) {
    unperturbed_frequencies(params);
    if (!(aa.i_x >= 0.0 && aa.i_v >= 0.0)) throw ValidationError("actions must be non-negative");
    const double k_v = inventory_stiffness(params);
    const Pair x = oscillator_point(aa.i_x, aa.theta_x, params.m_x, params.k_x, Transform::Standard);
    const Pair v = oscillator_point(aa.i_v, aa.theta_v, params.m_v, k_v, Transform::Standard);
    return {params.x_0 + x.q, v.q, x.p, v.p, 0.0};
}

double averaged_perturbation_closed_form(const ModelParams& params, double i_x, double i_v) {
    const auto [w_x, w_v] = unperturbed_frequencies(params);
    return 0.5 * params.epsilon * (params.x_0 * params.x_0 + i_x / (params.m_x * w_x)) * i_v / (params.m_v * w_v);
}

double averaged_perturbation(const ModelParams& params, double i_x, double i_v, std::size_t n_quad) {
    if (!(i_x >= 0.0 && i_v >= 0.0)) throw ValidationError("actions must be non-negative");
    if (n_quad < 64) throw ValidationError("n_quad: at least 64 points per angle");

    double sum = 0.0;
    for (std::size_t a = 0; a < n_quad; ++a) {
        const double theta_x = kTwoPi * static_cast<double>(a) / static_cast<double>(n_quad);
        for (std::size_t b = 0; b < n_quad; ++b) {
            const double theta_v = kTwoPi * static_cast<double>(b) / static_cast<double>(n_quad);
            const PhaseState s = from_action_angle(params, {i_x, theta_x, i_v, theta_v});
            const double risk = s.q1 * s.q2;
            sum += 0.5 * params.epsilon * risk * risk;
        }
    }
    const double quadrature = sum / static_cast<double>(n_quad * n_quad);

    const double closed = averaged_perturbation_closed_form(params, i_x, i_v);
    if (std::abs(quadrature - closed) > 1e-10 * std::max(1.0, std::abs(closed))) {
        throw std::logic_error("averaged_perturbation: quadrature " + std::to_string(quadrature) +
                               " disagrees with closed form " + std::to_string(closed));
    }
    return quadrature;
}

FrequencyReport predicted_frequencies(const ModelParams& params, double i_x, double i_v) {
    if (!(i_x >= 0.0 && i_v >= 0.0)) throw ValidationError("actions must be non-negative");
    const auto [w_x, w_v] = unperturbed_frequencies(params);
    const double mw_x = params.m_x * w_x;
    const double mw_v = params.m_v * w_v;
    FrequencyReport r;
    r.omega_x = w_x;
    r.omega_v = w_v;
    r.omega_x_pred = w_x + 0.5 * params.epsilon * i_v / (mw_x * mw_v);
    r.omega_v_pred = w_v + 0.5 * params.epsilon * (params.x_0 * params.x_0 + i_x / mw_x) / mw_v;
    r.resonance_distance = std::abs(w_x - w_v);
    return r;
}

FrequencyMeasurement measure_frequencies(const ModelParams& params, const ActionAngle& ic, double dt,
                                         std::size_t n_steps, std::size_t record_every, Scheme scheme) {
    const PhaseState start = from_action_angle(params, ic);
    const Trajectory traj = integrate(params, start, dt, n_steps, scheme, record_every);
    FrequencyMeasurement m;
    m.status = traj.status;
    const auto x = component_series(traj, Component::Price);
    const auto v = component_series(traj, Component::Inventory);
    auto peak = [&](const std::vector<double>& series) {
        try {
            return dominant_frequency(series, traj.sample_dt());
        } catch (const NoPeakError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    m.omega_x_measured = peak(x);
    m.omega_v_measured = peak(v);
    for (const PhaseState& s : traj.states) {
        const ActionAngle aa = to_action_angle(params, s);
        m.mean_actions.i_x += aa.i_x;
        m.mean_actions.i_v += aa.i_v;
    }
    const auto n = static_cast<double>(traj.states.size());
    m.mean_actions.i_x /= n;
    m.mean_actions.i_v /= n;
    return m;
}

double canonicality_check(const ModelParams& params, std::size_t n_samples, Transform transform, Oscillator oscillator,
                          std::uint64_t seed) {
    unperturbed_frequencies(params);
    const double m = oscillator == Oscillator::Price ? params.m_x : params.m_v;
    const double k = oscillator == Oscillator::Price ? params.k_x : inventory_stiffness(params);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> action(0.05, 2.0);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);

    double worst = 0.0;
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double i = action(rng);
        const double th = angle(rng);
        const double hi = 1e-6 * std::max(1.0, i);
        const double ht = 1e-6;
        const Pair ip = oscillator_point(i + hi, th, m, k, transform);
        const Pair im = oscillator_point(i - hi, th, m, k, transform);
        const Pair tp = oscillator_point(i, th + ht, m, k, transform);
        const Pair tm = oscillator_point(i, th - ht, m, k, transform);
        const double dq_dth = (tp.q - tm.q) / (2.0 * ht);
        const double dp_dth = (tp.p - tm.p) / (2.0 * ht);
        const double dq_di = (ip.q - im.q) / (2.0 * hi);
        const double dp_di = (ip.p - im.p) / (2.0 * hi);
        // {q, p} with theta as coordinate and I as momentum.
        const double bracket = dq_dth * dp_di - dq_di * dp_dth;
        const double sign = bracket < 0.0 ? -1.0 : 1.0;
        worst = std::max(worst, std::abs(bracket * sign - 1.0));
    }
    return worst;
}

}  // namespace chaosmm::kam
