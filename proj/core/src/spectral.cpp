#include <fftw3.h>

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>

#include "chaosmm/analysis.hpp"
#include "chaosmm/error.hpp"

namespace chaosmm {

namespace {

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan_s* p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace

double dominant_frequency(std::span<const double> series, double dt) {
    const std::size_t n = series.size();
    if (n < 64) throw ValidationError("series: dominant_frequency needs at least 64 samples");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt: must be finite and > 0");

    // A Gaussian window has a Gaussian transform, so the log-magnitude peak
    // is a parabola and three-point interpolation is nearly exact.
    const double sigma = static_cast<double>(n) / 8.0;
    const double centre = 0.5 * static_cast<double>(n - 1);
    std::vector<double> window(n);
    double w_sum = 0.0;
    double weighted = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (static_cast<double>(i) - centre) / sigma;
        window[i] = std::exp(-0.5 * z * z);
        w_sum += window[i];
        weighted += window[i] * series[i];
        scale = std::max(scale, std::abs(series[i]));
    }
    const double mean = weighted / w_sum;
    double spread = 0.0;
    for (double x : series) spread = std::max(spread, std::abs(x - mean));
    if (!(spread > 1e-13 * std::max(scale, 1e-300))) {
        throw NoPeakError("series is flat; no spectral peak");
    }

    const std::size_t m = next_pow2(2 * n);
    const std::size_t n_bins = m / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
    std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_bins)));
    std::unique_ptr<fftw_plan_s, PlanDestroy> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE));
    }
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = window[i] * (series[i] - mean);
    for (std::size_t i = n; i < m; ++i) in.get()[i] = 0.0;
    fftw_execute(plan.get());

    std::vector<double> mag(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        mag[k] = std::hypot(out.get()[k][0], out.get()[k][1]);
    }

    // Skip the main lobe around DC: spectral width of the window in bins.
    const double lobe = static_cast<double>(m) / (2.0 * std::numbers::pi * sigma);
    const auto k_min = static_cast<std::size_t>(std::ceil(5.0 * lobe)) + 1;
    std::size_t best = 0;
    for (std::size_t k = std::max<std::size_t>(k_min, 1); k + 1 < n_bins; ++k) {
        if (mag[k] >= mag[k - 1] && mag[k] >= mag[k + 1] && (best == 0 || mag[k] > mag[best])) best = k;
    }
    if (best == 0 || !(mag[best] > 0.0)) throw NoPeakError("no non-DC spectral peak");

    const double a = std::log(mag[best - 1]);
    const double b = std::log(mag[best]);
    const double c = std::log(mag[best + 1]);
    const double denom = a - 2.0 * b + c;
    const double delta = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    return 2.0 * std::numbers::pi * (static_cast<double>(best) + delta) / (static_cast<double>(m) * dt);
}

}  // namespace chaosmm
