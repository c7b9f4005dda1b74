#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "chaosmm/error.hpp"
#include "chaosmm/kam.hpp"

using namespace chaosmm;
using namespace chaosmm::kam;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

ModelParams static_params(double eps) {
    ModelParams p;
    p.epsilon = eps;
    return p;
}

// Brute-force angle average on a grid independent of the library's quadrature.
double brute_average(const ModelParams& p, double i_x, double i_v, int n) {
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const PhaseState s = from_action_angle(p, {i_x, kTwoPi * (a + 0.5) / n, i_v, kTwoPi * (b + 0.5) / n});
            sum += 0.5 * p.epsilon * (s.q1 * s.q2) * (s.q1 * s.q2);
        }
    }
    return sum / (n * n);
}

}  // namespace

TEST(ActionAngle, Examples) {
    const ModelParams p = static_params(0.1);
    const ActionAngle zero = to_action_angle(p, {3.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(zero.i_x, 0.0);
    EXPECT_EQ(zero.i_v, 0.0);

    const ActionAngle aa = to_action_angle(p, {4.0, 0.0, 0.0, 0.0});
    EXPECT_NEAR(aa.theta_x, std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(aa.i_x, std::sqrt(0.11) / 2, 1e-15);
    EXPECT_NEAR(aa.i_x, 0.165831, 1e-6);
}

TEST(ActionAngle, RoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    ModelParams p = static_params(0.0);
    p.m_x = 1.3;
    p.m_v = 0.7;
    for (int i = 0; i < 500; ++i) {
        const PhaseState s{3 + u(rng), u(rng), u(rng), u(rng)};
        const ActionAngle aa = to_action_angle(p, s);
        EXPECT_GE(aa.theta_x, 0.0);
        EXPECT_LT(aa.theta_x, kTwoPi);
        EXPECT_GE(aa.theta_v, 0.0);
        EXPECT_LT(aa.theta_v, kTwoPi);
        const PhaseState r = from_action_angle(p, aa);
        EXPECT_NEAR(r.q1, s.q1, 1e-12);
        EXPECT_NEAR(r.q2, s.q2, 1e-12);
        EXPECT_NEAR(r.p1, s.p1, 1e-12);
        EXPECT_NEAR(r.p2, s.p2, 1e-12);
    }
}

TEST(ActionAngle, InverseExamples) {
    const ModelParams p = static_params(0.0);
    for (double th : {0.0, 1.0, 4.0}) {
        const PhaseState s = from_action_angle(p, {0.0, th, 0.0, th + 1});
        EXPECT_EQ(s.q1, 3.0);
        EXPECT_EQ(s.q2, 0.0);
        EXPECT_EQ(s.p1, 0.0);
        EXPECT_EQ(s.p2, 0.0);
    }
    const ActionAngle aa{0.3, 1.1, 0.7, 2.9};
    const PhaseState a = from_action_angle(p, aa);
    const PhaseState b = from_action_angle(p, {0.3, 1.1 + kTwoPi, 0.7, 2.9 + kTwoPi});
    EXPECT_NEAR(a.q1, b.q1, 1e-14);
    EXPECT_NEAR(a.q2, b.q2, 1e-14);
    EXPECT_NEAR(a.p1, b.p1, 1e-14);
    EXPECT_NEAR(a.p2, b.p2, 1e-14);
}

TEST(ActionAngle, UnperturbedEnergyIdentity) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> action(0.0, 3.0);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    ModelParams p = static_params(0.0);
    p.m_x = 0.8;
    p.m_v = 2.0;
    p.inventory = QuadraticPotential{0.3};
    const auto [w_x, w_v] = unperturbed_frequencies(p);
    for (int i = 0; i < 1000; ++i) {
        const ActionAngle aa{action(rng), angle(rng), action(rng), angle(rng)};
        EXPECT_NEAR(energy(p, from_action_angle(p, aa)), w_x * aa.i_x + w_v * aa.i_v, 1e-10);
    }
}

TEST(ActionAngle, Preconditions) {
    ModelParams p = static_params(0.1);
    p.k_x = 0.0;
    EXPECT_THROW(to_action_angle(p, {3, 0, 0, 0}), ValidationError);
    p = static_params(0.1);
    p.inventory = KickPotential{0.1, 1.0};
    EXPECT_THROW(to_action_angle(p, {3, 0, 0, 0}), ValidationError);
    p.inventory = QuadraticPotential{0.0};
    EXPECT_THROW(unperturbed_frequencies(p), ValidationError);
    ModelParams d;
    d.kind = ModelKind::DynamicRisk;
    d.inventory = NoPotential{};
    EXPECT_THROW(unperturbed_frequencies(d), ValidationError);
    EXPECT_THROW(from_action_angle(static_params(0.1), {-0.1, 0, 0, 0}), ValidationError);
}

TEST(WrapAngle, Range) {
    EXPECT_NEAR(wrap_angle(-0.5), kTwoPi - 0.5, 1e-15);
    EXPECT_NEAR(wrap_angle(kTwoPi + 0.25), 0.25, 1e-14);
    EXPECT_EQ(wrap_angle(0.0), 0.0);
    EXPECT_LT(wrap_angle(kTwoPi), kTwoPi);
}

TEST(AveragedPerturbation, Examples) {
    const ModelParams p = static_params(0.01);
    EXPECT_EQ(averaged_perturbation_closed_form(p, 0.5, 0.0), 0.0);
    EXPECT_NEAR(averaged_perturbation(p, 0.5, 0.0), 0.0, 1e-15);
    ModelParams centred = p;
    centred.x_0 = 0.0;
    EXPECT_NEAR(averaged_perturbation(centred, 0.0, 0.4), 0.0, 1e-15);

    const double expected = 0.005 * (9 + 0.1 / std::sqrt(0.11)) * (0.1 / std::sqrt(0.1));
    EXPECT_NEAR(averaged_perturbation(p, 0.1, 0.1), expected, 1e-12);
    EXPECT_NEAR(expected, 0.014707, 1e-6);
    EXPECT_NEAR(brute_average(p, 0.1, 0.1, 50), expected, 1e-12);
}

TEST(AveragedPerturbation, QuadratureAgreesWithClosedForm) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> pos(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        ModelParams p = static_params(pos(rng) * 0.1);
        p.m_x = pos(rng);
        p.m_v = pos(rng);
        p.k_x = pos(rng);
        p.x_0 = 2 * pos(rng) - 3;
        p.inventory = QuadraticPotential{pos(rng)};
        const double ix = pos(rng);
        const double iv = pos(rng);
        const double closed = averaged_perturbation_closed_form(p, ix, iv);
        EXPECT_NEAR(averaged_perturbation(p, ix, iv), closed, 1e-10);
        EXPECT_NEAR(averaged_perturbation(p, ix, iv, 128), closed, 1e-10);
    }
}

TEST(PredictedFrequencies, Examples) {
    const FrequencyReport r0 = predicted_frequencies(static_params(0.0), 0.4, 0.7);
    EXPECT_EQ(r0.omega_x_pred, r0.omega_x);
    EXPECT_EQ(r0.omega_v_pred, r0.omega_v);
    EXPECT_NEAR(r0.resonance_distance, std::sqrt(0.11) - std::sqrt(0.1), 1e-15);
    EXPECT_NEAR(r0.resonance_distance, 0.015434, 1e-6);
    EXPECT_EQ(r0.resonance_distance, std::abs(r0.omega_x - r0.omega_v));

    const FrequencyReport a = predicted_frequencies(static_params(0.01), 0.4, 0.7);
    const FrequencyReport b = predicted_frequencies(static_params(0.02), 0.4, 0.7);
    EXPECT_NEAR(b.omega_x_pred - b.omega_x, 2 * (a.omega_x_pred - a.omega_x), 1e-15);
    EXPECT_NEAR(b.omega_v_pred - b.omega_v, 2 * (a.omega_v_pred - a.omega_v), 1e-15);
    EXPECT_EQ(a.resonance_distance, b.resonance_distance);
}

TEST(PredictedFrequencies, AreActionDerivativesOfAverage) {
    const ModelParams p = static_params(0.03);
    const double h = 1e-6;
    const auto [w_x, w_v] = unperturbed_frequencies(p);
    const FrequencyReport r = predicted_frequencies(p, 0.4, 0.7);
    const double dx = (averaged_perturbation(p, 0.4 + h, 0.7) - averaged_perturbation(p, 0.4 - h, 0.7)) / (2 * h);
    const double dv = (averaged_perturbation(p, 0.4, 0.7 + h) - averaged_perturbation(p, 0.4, 0.7 - h)) / (2 * h);
    EXPECT_NEAR(r.omega_x_pred, w_x + dx, 1e-8);
    EXPECT_NEAR(r.omega_v_pred, w_v + dv, 1e-8);
}

TEST(Canonicality, StandardAndLiteralTransforms) {
    const ModelParams p = static_params(0.0);
    EXPECT_LE(canonicality_check(p, 200), 1e-5);
    EXPECT_LE(canonicality_check(p, 200, Transform::Standard, Oscillator::Inventory), 1e-5);
    EXPECT_NEAR(canonicality_check(p, 200, Transform::Literal), std::abs(std::sqrt(0.11) - 1), 1e-4);
    EXPECT_NEAR(canonicality_check(p, 200, Transform::Literal), 0.668, 1e-3);

    ModelParams equal = p;
    equal.k_x = 2.5;
    equal.m_x = 2.5;
    EXPECT_LE(canonicality_check(equal, 200, Transform::Literal), 1e-5);
}

TEST(MeasureFrequencies, UnperturbedOrbit) {
    const ModelParams p = static_params(0.0);
    const auto m = measure_frequencies(p, {0.1, 0.0, 0.1, 0.0}, 0.01, 500'000, 10);
    EXPECT_TRUE(m.status.completed());
    EXPECT_NEAR(m.omega_x_measured, std::sqrt(0.11), 1e-3);
    EXPECT_NEAR(m.omega_v_measured, std::sqrt(0.1), 1e-3);
    EXPECT_NEAR(m.mean_actions.i_x, 0.1, 1e-8);
    EXPECT_NEAR(m.mean_actions.i_v, 0.1, 1e-8);

    const auto flat = measure_frequencies(p, {0.1, 0.0, 0.0, 0.0}, 0.01, 10'000, 10);
    EXPECT_TRUE(std::isnan(flat.omega_v_measured));
}

TEST(MeasureFrequencies, FirstOrderShift) {
    // near-resonant, so only the sign and rough size of the shift are checked
    const ModelParams p = static_params(0.001);
    const auto m = measure_frequencies(p, {0.1, 0.0, 0.1, 0.0}, 0.01, 2'000'000, 10);
    const auto pred = predicted_frequencies(p, m.mean_actions.i_x, m.mean_actions.i_v);
    const double shift_pred = pred.omega_x_pred - pred.omega_x;
    const double shift_meas = m.omega_x_measured - pred.omega_x;
    EXPECT_GT(shift_meas, 0.0);
    EXPECT_NEAR(shift_meas, shift_pred, 0.5 * shift_pred);
}
