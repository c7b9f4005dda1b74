#include <algorithm>
#include <cmath>
#include <functional>

#include "chaosmm/analysis.hpp"
#include "chaosmm/error.hpp"

namespace chaosmm {

namespace {

double dot(const Tangent& a, const Tangent& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

// Modified Gram-Schmidt; returns log of the diagonal of R.
std::array<double, 4> orthonormalise(TangentFrame& frame) {
    std::array<double, 4> log_r{};
    for (std::size_t j = 0; j < 4; ++j) {
        Tangent& vj = frame[j];
        for (std::size_t i = 0; i < j; ++i) {
            const double r = dot(frame[i], vj);
            for (std::size_t c = 0; c < 4; ++c) vj[c] -= r * frame[i][c];
        }
        const double norm = std::sqrt(dot(vj, vj));
        log_r[j] = std::log(norm);
        for (double& c : vj) c /= norm;
    }
    return log_r;
}

std::array<double, 4> sorted_descending(std::array<double, 4> a) {
    std::sort(a.begin(), a.end(), std::greater<>());
    return a;
}

}  // namespace

LyapunovSpectrum lyapunov_spectrum(const ModelParams& params, const PhaseState& ic, const LyapunovOptions& options) {
    params.validate();
    if (!(std::isfinite(options.dt) && options.dt > 0.0)) throw ValidationError("dt: must be finite and > 0");
    if (options.renorm_every < 1) throw ValidationError("renorm_every: must be >= 1");
    if (options.history_every < 1) throw ValidationError("history_every: must be >= 1");
    if (options.n_steps < options.renorm_every) throw ValidationError("n_steps: must cover one renormalisation");

    LyapunovSpectrum out;
    out.renorm_interval = options.renorm_every;

    TangentFrame frame{};
    for (std::size_t i = 0; i < 4; ++i) frame[i][i] = 1.0;

    std::array<double, 4> log_sum{};
    std::size_t renorms = 0;
    std::size_t last_renorm_step = 0;
    PhaseState s = ic;
    out.status = {Termination::Kind::Completed, options.n_steps};

    for (std::size_t n = 1; n <= options.n_steps; ++n) {
        try {
            step_variational(params, s, frame, options.dt, options.scheme);
        } catch (const SingularityError&) {
            out.status = {Termination::Kind::SingularityExit, n};
            break;
        }
        if (exceeds_blow_up(s)) {
            out.status = {Termination::Kind::BlowUp, n};
            break;
        }
        if (n % options.renorm_every != 0) continue;

        const std::array<double, 4> log_r = orthonormalise(frame);
        bool finite = true;
        for (double l : log_r) finite = finite && std::isfinite(l);
        if (!finite) {
            out.status = {Termination::Kind::BlowUp, n};
            break;
        }
        for (std::size_t i = 0; i < 4; ++i) log_sum[i] += log_r[i];
        ++renorms;
        last_renorm_step = n;
        if (renorms % options.history_every == 0) {
            const double t = static_cast<double>(n) * options.dt;
            std::array<double, 4> est{};
            for (std::size_t i = 0; i < 4; ++i) est[i] = log_sum[i] / t;
            out.history_time.push_back(t);
            out.history.push_back(sorted_descending(est));
        }
    }

    out.elapsed_time = static_cast<double>(last_renorm_step) * options.dt;
    if (renorms > 0) {
        for (std::size_t i = 0; i < 4; ++i) out.exponents[i] = log_sum[i] / out.elapsed_time;
        out.exponents = sorted_descending(out.exponents);
    }
    out.h_ks = ks_entropy(out.exponents, options.zero_threshold);
    return out;
}

double ks_entropy(std::span<const double> exponents, double zero_threshold) {
    double sum = 0.0;
    for (double l : exponents) {
        if (l > zero_threshold) sum += l;
    }
    return sum;
}

double ks_entropy(const LyapunovSpectrum& spectrum, double zero_threshold) {
    return ks_entropy(spectrum.exponents, zero_threshold);
}

}  // namespace chaosmm
