#include <Eigen/Dense>
#include <cmath>

#include "chaosmm/analysis.hpp"

namespace chaosmm {

EllipseFit fit_ellipse(std::span<const std::array<double, 2>> points) {
    EllipseFit fit;
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n < 6) return fit;

    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : points) {
        mx += p[0];
        my += p[1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& p : points) {
        sx += (p[0] - mx) * (p[0] - mx);
        sy += (p[1] - my) * (p[1] - my);
    }
    sx = std::sqrt(sx / static_cast<double>(n));
    sy = std::sqrt(sy / static_cast<double>(n));
    if (!(sx > 0.0 && sy > 0.0)) return fit;

    // Conic A x^2 + B xy + C y^2 + D x + E y + F = 0 in normalised
    // coordinates: smallest right singular vector of the design matrix.
    Eigen::MatrixXd design(n, 6);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = (points[i][0] - mx) / sx;
        const double y = (points[i][1] - my) / sy;
        design.row(i) << x * x, x * y, y * y, x, y, 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
    const Eigen::VectorXd theta = svd.matrixV().col(5);

    Eigen::Matrix3d q_norm;
    q_norm << theta(0), theta(1) / 2, theta(3) / 2, theta(1) / 2, theta(2), theta(4) / 2, theta(3) / 2,
        theta(4) / 2, theta(5);
    Eigen::Matrix3d to_norm;
    to_norm << 1.0 / sx, 0.0, -mx / sx, 0.0, 1.0 / sy, -my / sy, 0.0, 0.0, 1.0;
    const Eigen::Matrix3d q = to_norm.transpose() * q_norm * to_norm;

    const Eigen::Matrix2d a = q.topLeftCorner<2, 2>();
    const Eigen::Vector2d b = q.topRightCorner<2, 1>();
    if (!(a.determinant() > 0.0)) return fit;  // not an ellipse
    const Eigen::Vector2d c = -a.ldlt().solve(b);
    const double k = q(2, 2) + b.dot(c);
    if (k == 0.0) return fit;
    const Eigen::Matrix2d m = a / (-k);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m);
    const Eigen::Vector2d lam = eig.eigenvalues();
    if (!(lam(0) > 0.0 && lam(1) > 0.0)) return fit;

    fit.valid = true;
    fit.centre_x = c(0);
    fit.centre_y = c(1);
    fit.m11 = m(0, 0);
    fit.m12 = m(0, 1);
    fit.m22 = m(1, 1);
    fit.semi_major = 1.0 / std::sqrt(lam(0));
    fit.semi_minor = 1.0 / std::sqrt(lam(1));

    double worst = 0.0;
    for (const auto& p : points) {
        const Eigen::Vector2d d(p[0] - c(0), p[1] - c(1));
        const double r = d.norm();
        if (r == 0.0) {
            worst = std::max(worst, fit.semi_minor);
            continue;
        }
        const Eigen::Vector2d dir = d / r;
        const double r_curve = 1.0 / std::sqrt(dir.dot(m * dir));
        worst = std::max(worst, std::abs(r - r_curve));
    }
    fit.max_radial_residual = worst;
    return fit;
}

EllipseFit fit_section_ellipse(const ModelParams& params, std::span<const PoincarePoint> points) {
    std::vector<std::array<double, 2>> xy;
    xy.reserve(points.size());
    for (const auto& p : points) xy.push_back({p.x - params.x_0, p.p_x});
    return fit_ellipse(xy);
}

bool is_closed_curve(const ModelParams& params, std::span<const PoincarePoint> points, double tolerance) {
    if (points.size() < 10) return false;
    const EllipseFit fit = fit_section_ellipse(params, points);
    return fit.valid && fit.relative_residual() <= tolerance;
}

}  // namespace chaosmm
