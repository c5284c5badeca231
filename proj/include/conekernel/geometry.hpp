#pragma once

#include <cmath>
#include <numbers>

namespace conekernel {

struct Point2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Point2 operator*(double s, Point2 p) noexcept { return {s * p.x1, s * p.x2}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) noexcept { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Point2 a, Point2 b) noexcept { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Point2 p) noexcept { return std::hypot(p.x1, p.x2); }
inline Point2 unit_vector(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }
inline Point2 from_polar(double r, double angle) noexcept { return r * unit_vector(angle); }

/// Signed angle in (-pi, pi].
double normalize_signed_angle(double angle) noexcept;

/// The open angular sector {r v_theta : r > 0, |theta - alpha| < kappa/2}.
///
/// kappa is the opening in (0, 2pi); alpha the direction of the center ray,
/// stored normalized to [0, 2pi). Points on either boundary ray and the
/// vertex itself are outside.
class Wedge2D {
public:
    Wedge2D(double kappa, double alpha = 0.0);

    double kappa() const noexcept { return kappa_; }
    double alpha() const noexcept { return alpha_; }

    /// Angle of the clockwise boundary ray, alpha - kappa/2.
    double lower_edge_angle() const noexcept { return alpha_ - 0.5 * kappa_; }
    double upper_edge_angle() const noexcept { return alpha_ + 0.5 * kappa_; }

    /// Polar angle of p relative to the center ray, in (-pi, pi].
    double relative_angle(Point2 p) const noexcept;

    /// Polar angle of p measured counterclockwise from the clockwise edge.
    /// Lies in (0, kappa) for interior points.
    double edge_angle(Point2 p) const noexcept { return relative_angle(p) + 0.5 * kappa_; }

    /// Cartesian point at radius r and edge angle theta in (0, kappa).
    Point2 point_at(double r, double theta) const noexcept {
        return from_polar(r, lower_edge_angle() + theta);
    }

    bool is_convex() const noexcept { return kappa_ <= std::numbers::pi; }

private:
    double kappa_;
    double alpha_;
};

/// Circular cone in R^3 around the x3-axis with polar half-opening kappa/2.
class SphericalCap3D {
public:
    explicit SphericalCap3D(double kappa);

    double kappa() const noexcept { return kappa_; }
    bool contains(double x1, double x2, double x3) const noexcept;

private:
    double kappa_;
};

struct WeightPair {
    double R = 1.0;  ///< min(|x|/sqrt(tau), 1)
    double J = 1.0;  ///< min(rho(x)/sqrt(tau), 1)
};

bool contains(const Wedge2D& domain, Point2 p) noexcept;

inline double rho0(Point2 p) noexcept { return norm(p); }

/// Distance from p to the boundary of the wedge (union of the two closed edge rays).
/// Throws InputError("OUTSIDE_DOMAIN") when p is not in the open wedge.
double rho(const Wedge2D& domain, Point2 p);

/// Distance from p to the closed ray {s u : s >= 0}, u a unit vector.
double distance_to_ray(Point2 p, Point2 direction) noexcept;

/// Vertex and boundary weights at parabolic scale tau.
WeightPair weights(double tau, const Wedge2D& domain, Point2 p);

/// Annular sector [r_lo, r_hi] x [theta_lo, theta_hi] in edge-angle coordinates.
struct PolarCell {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;

    double area() const noexcept { return 0.5 * (r_hi * r_hi - r_lo * r_lo) * (theta_hi - theta_lo); }
    /// Radius and angle of the area centroid.
    double centroid_radius() const noexcept {
        return (2.0 / 3.0) * (r_hi * r_hi * r_hi - r_lo * r_lo * r_lo) / (r_hi * r_hi - r_lo * r_lo);
    }
    double centroid_angle() const noexcept { return 0.5 * (theta_lo + theta_hi); }
    /// Cell of the given widths whose area centroid is (r, theta).
    static PolarCell centered_at(double r, double theta, double dr, double dtheta);
};

} // namespace conekernel
