#include <algorithm>
#include <cmath>

#include "chaosmm/analysis.hpp"
#include "chaosmm/error.hpp"

namespace chaosmm {

std::vector<double> component_series(const Trajectory& traj, Component component) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const PhaseState& s = traj.states[i];
        switch (component) {
            case Component::Time:
                out.push_back(s.t);
                break;
            case Component::Price:
                out.push_back(s.q1);
                break;
            case Component::Inventory:
                out.push_back(inventory_of(traj.params, s));
                break;
            case Component::Q2:
                out.push_back(s.q2);
                break;
            case Component::P1:
                out.push_back(s.p1);
                break;
            case Component::P2:
                out.push_back(s.p2);
                break;
            case Component::Energy:
                out.push_back(traj.energies[i]);
                break;
        }
    }
    return out;
}

std::vector<double> subsample(std::span<const double> series, std::size_t every_n) {
    if (every_n < 1) throw ValidationError("every_n: must be >= 1");
    std::vector<double> out;
    out.reserve(series.size() / every_n + 1);
    for (std::size_t i = 0; i < series.size(); i += every_n) out.push_back(series[i]);
    return out;
}

std::vector<double> subsample(const Trajectory& traj, std::size_t every_n, Component component) {
    return subsample(component_series(traj, component), every_n);
}

Histogram histogram(std::span<const double> series, std::size_t n_bins, std::optional<std::pair<double, double>> range) {
    if (series.empty()) throw ValidationError("series: histogram of an empty series");
    if (n_bins < 1) throw ValidationError("n_bins: must be >= 1");

    double lo = 0.0;
    double hi = 0.0;
    if (range) {
        lo = range->first;
        hi = range->second;
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw ValidationError("range: must satisfy lo < hi");
    } else {
        const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
        lo = *mn;
        hi = *mx;
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }

    Histogram h;
    h.edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(n_bins, 0);

    for (double x : series) {
        if (!(x >= lo && x <= hi)) continue;
        if (x == hi) {
            ++h.counts.back();
            continue;
        }
        auto k = static_cast<std::size_t>(std::floor((x - lo) / (hi - lo) * static_cast<double>(n_bins)));
        k = std::min(k, n_bins - 1);
        // Reconcile the arithmetic index with the stored edges.
        while (k > 0 && x < h.edges[k]) --k;
        while (k + 1 < n_bins && x >= h.edges[k + 1]) ++k;
        ++h.counts[k];
    }
    return h;
}

std::vector<double> differences(std::span<const double> series) {
    std::vector<double> out;
    if (series.size() < 2) return out;
    out.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) out.push_back(series[i] - series[i - 1]);
    return out;
}

double lag1_autocorrelation(std::span<const double> series) {
    if (series.size() < 3) throw ValidationError("series: autocorrelation needs at least 3 samples");
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(series.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double d = series[i] - mean;
        den += d * d;
        if (i + 1 < series.size()) num += d * (series[i + 1] - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace chaosmm
