#include "conekernel/geometry.hpp"

#include "conekernel/error.hpp"

#include <algorithm>
#include <string>

namespace conekernel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double normalize_signed_angle(double angle) noexcept {
    double r = std::remainder(angle, kTwoPi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

Wedge2D::Wedge2D(double kappa, double alpha) : kappa_(kappa), alpha_(alpha) {
    if (!(kappa > 0.0 && kappa < kTwoPi)) {
        throw InputError("BAD_ANGLE", "wedge opening must lie in (0, 2pi), got " + std::to_string(kappa));
    }
    if (!std::isfinite(alpha)) throw InputError("BAD_ANGLE", "wedge orientation must be finite");
    alpha_ = std::fmod(alpha, kTwoPi);
    if (alpha_ < 0.0) alpha_ += kTwoPi;
    if (alpha_ >= kTwoPi) alpha_ = 0.0;
}

double Wedge2D::relative_angle(Point2 p) const noexcept {
    return normalize_signed_angle(std::atan2(p.x2, p.x1) - alpha_);
}

SphericalCap3D::SphericalCap3D(double kappa) : kappa_(kappa) {
    if (!(kappa > 0.0 && kappa < kTwoPi)) {
        throw InputError("BAD_ANGLE", "cap opening must lie in (0, 2pi), got " + std::to_string(kappa));
    }
}

bool SphericalCap3D::contains(double x1, double x2, double x3) const noexcept {
    const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
    if (r == 0.0) return false;
    return std::acos(std::clamp(x3 / r, -1.0, 1.0)) < 0.5 * kappa_;
}

bool contains(const Wedge2D& domain, Point2 p) noexcept {
    if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) return false;
    if (p.x1 == 0.0 && p.x2 == 0.0) return false;
    return std::abs(domain.relative_angle(p)) < 0.5 * domain.kappa();
}

double distance_to_ray(Point2 p, Point2 direction) noexcept {
    const double along = dot(p, direction);
    if (along <= 0.0) return norm(p);
    return std::abs(cross(direction, p));
}

double rho(const Wedge2D& domain, Point2 p) {
    if (!contains(domain, p)) {
        throw InputError("OUTSIDE_DOMAIN", "point is not inside the wedge");
    }
    const double lower = distance_to_ray(p, unit_vector(domain.lower_edge_angle()));
    const double upper = distance_to_ray(p, unit_vector(domain.upper_edge_angle()));
    return std::min({lower, upper, rho0(p)});
}

WeightPair weights(double tau, const Wedge2D& domain, Point2 p) {
    if (!(tau > 0.0)) throw InputError("BAD_TIME", "tau must be positive");
    const double scale = std::sqrt(tau);
    const double d_boundary = rho(domain, p);
    WeightPair w;
    w.R = std::min(rho0(p) / scale, 1.0);
    w.J = std::min(d_boundary / scale, 1.0);
    return w;
}

PolarCell PolarCell::centered_at(double r, double theta, double dr, double dtheta) {
    // The centroid radius of [m - dr/2, m + dr/2] is m + dr^2 / (12 m).
    const double disc = r * r - dr * dr / 3.0;
    if (!(dr > 0.0) || !(dtheta > 0.0) || !(disc >= 0.0)) {
        throw InputError("BAD_CELL", "cell widths must be positive and smaller than the radius");
    }
    const double mid = 0.5 * (r + std::sqrt(disc));
    if (!(mid - 0.5 * dr > 0.0)) throw InputError("BAD_CELL", "cell would include the vertex");
    return {mid - 0.5 * dr, mid + 0.5 * dr, theta - 0.5 * dtheta, theta + 0.5 * dtheta};
}

} // namespace conekernel
