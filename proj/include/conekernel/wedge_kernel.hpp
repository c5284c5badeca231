#pragma once

#include "conekernel/error.hpp"
#include "conekernel/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace conekernel {

struct SeriesControl {
    double rel_tol = 1e-10;
    std::int64_t max_terms = 100000;
};

/// Thrown when the eigenfunction series needs more than max_terms terms.
class SeriesTruncationError : public NumericalError {
public:
    SeriesTruncationError(double partial_sum, double last_term, std::int64_t terms);

    double partial_sum() const noexcept { return partial_sum_; }
    double last_term() const noexcept { return last_term_; }

private:
    double partial_sum_;
    double last_term_;
};

/// Gaussian (4 pi tau)^{-d/2} exp(-|x-y|^2 / (4 tau)) in R^d.
double heat_kernel_free(int d, double tau, std::span<const double> x, std::span<const double> y);
double heat_kernel_free(double tau, Point2 x, Point2 y);

/// Dirichlet heat kernel of the right half-plane {x1 > 0} by reflection.
/// Points on the boundary line give 0.
double heat_kernel_halfplane(double tau, Point2 x, Point2 y);

/// Dirichlet heat kernel of the wedge (kernel of d/dt - Laplacian) from its
/// sine/Bessel eigenfunction series in polar coordinates about the vertex.
/// Points on the closed boundary give 0; points outside throw OUTSIDE_DOMAIN.
double heat_kernel_wedge(const Wedge2D& domain, double tau, Point2 x, Point2 y, const SeriesControl& ctrl = {});
double heat_kernel_wedge(double kappa, double tau, Point2 x, Point2 y, const SeriesControl& ctrl = {});

/// Same kernel in edge-angle polar coordinates (r, theta), theta in [0, kappa].
double heat_kernel_wedge_polar(double kappa, double tau, double r, double theta, double r_src, double theta_src,
                               const SeriesControl& ctrl = {});

/// Evaluates y -> G(tau, x, y) for a fixed source on rings r = const at a fixed
/// set of edge angles. Coefficients are built once per ring and summed by
/// Clenshaw's recurrence across all angles at once.
class WedgeKernelSlice {
public:
    WedgeKernelSlice(const Wedge2D& domain, double tau, Point2 source, std::span<const double> thetas,
                     std::int64_t max_terms = 100000);

    std::size_t size() const noexcept { return two_cos_.size(); }

    /// out[j] = G(tau, (r, thetas[j]), source).
    void evaluate(double r, std::span<double> out) const;

private:
    double kappa_;
    double tau_;
    double r_src_;
    double theta_src_;
    std::int64_t max_terms_;
    std::vector<double> two_cos_;
    std::vector<double> sines_;
};

/// Grid for the polar tensor quadratures below. Panel widths are in units of sqrt(tau).
struct QuadSpec {
    int order = 16;
    double panel_width = 0.5;
    double radius_sigmas = 12.0;  ///< r_max = |source| + radius_sigmas * sqrt(tau)
};

/// Total mass of G(tau, ., y) over the wedge: the survival probability from y.
double kernel_mass(const Wedge2D& domain, double tau, Point2 y, const QuadSpec& quad = {});
double kernel_mass(double kappa, double tau, Point2 y, const QuadSpec& quad = {});

/// Integral over the wedge of G(tau1, x, z) G(tau2, z, y) dz.
double chapman_kolmogorov(const Wedge2D& domain, double tau1, double tau2, Point2 x, Point2 y,
                          const QuadSpec& quad = {});

/// Average of G(tau, ., y) over a polar cell (Gauss–Legendre, order x order).
double cell_average(const Wedge2D& domain, double tau, Point2 y, const PolarCell& cell, int order = 8);

} // namespace conekernel
