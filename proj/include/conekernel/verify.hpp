#pragma once

#include "conekernel/geometry.hpp"
#include "conekernel/kernel_mc.hpp"
#include "conekernel/spd.hpp"
#include "conekernel/wedge_kernel.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace conekernel {

/// Candidate upper bound
///   N tau^{-1} R_x^{beta1} R_y^{beta2} J_x J_y exp(-sigma |x - y|^2 / tau)
/// in two dimensions. The refined two-weight form uses beta1 = lambda_plus - 1,
/// beta2 = lambda_minus - 1.
struct BoundSpec {
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    double sigma = 0.125;
    double N = 1.0;
    double beta1 = 0.0;
    double beta2 = 0.0;

    static BoundSpec two_weight(double lambda_plus, double lambda_minus, double sigma, double N = 1.0);
};

/// Right-hand side with vertex and boundary weights (J factors).
double bound_rhs(const BoundSpec& spec, const Wedge2D& domain, double tau, Point2 x, Point2 y);

/// Same envelope with R in place of J: N tau^{-1} R_x^{lambda+} R_y^{lambda-} exp(...).
double less_rough_rhs(const BoundSpec& spec, const Wedge2D& domain, double tau, Point2 x, Point2 y);

struct KernelSample {
    double tau = 1.0;
    Point2 x;
    Point2 y;
    double G = 0.0;
};

struct BoundCheckReport {
    double max_ratio = 0.0;
    double feasible_N = 0.0;  ///< smallest N with G <= RHS on every evaluated sample
    std::size_t argmax = 0;   ///< index into the sample list
    KernelSample argmax_sample;
    std::size_t n_evaluated = 0;
    std::size_t n_excluded = 0;  ///< samples below the underflow floor
};

/// feasible_N = max over samples of G / RHS(N = 1). Samples with G below
/// floor_rel times the largest G are excluded. spec.N is ignored.
/// Throws InputError("EMPTY_SAMPLE") or NumericalError("ZERO_ENVELOPE") when
/// the envelope vanishes at a sample with G > 0.
BoundCheckReport check_upper_bound(std::span<const KernelSample> samples, const BoundSpec& spec,
                                   const Wedge2D& domain, double floor_rel = 1e-14);

struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    double window_min = 0.0;
    double window_max = 0.0;
    std::size_t n_points = 0;
    std::vector<double> abscissa;
    std::vector<double> ordinate;
};

/// Least-squares line through (xs, ys). Needs at least 5 points and a nonempty window.
FitReport linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Fits log G + log tau against |x - y|^2 / tau at one (tau, y); the slope
/// estimates -sigma (exactly -1/4 for the free kernel). Samples with
/// G <= 0 or rho(x) < 2 sqrt(tau) are skipped.
FitReport fit_gaussian_sigma(std::span<const KernelSample> samples, const Wedge2D& domain);

using KernelSampler = std::function<double(double tau, Point2 x, Point2 y)>;

struct ExponentFitOptions {
    double window_lo = 1e-3;  ///< in units of sqrt(tau)
    double window_hi = 1e-1;
    int n_points = 16;
};

/// Slope of log G against log |x| along the center ray; approaches the
/// vertex exponent. Requires |y| >= 4 sqrt(tau).
FitReport fit_vertex_exponent(const KernelSampler& sampler, const Wedge2D& domain, double tau, Point2 y,
                              const ExponentFitOptions& opt = {});

/// Slope of log G against log rho(x) as x approaches the clockwise edge at
/// fixed radius |x| = radius >= 4 sqrt(tau).
FitReport fit_boundary_exponent(const KernelSampler& sampler, const Wedge2D& domain, double tau, Point2 y,
                                double radius, const ExponentFitOptions& opt = {});

/// Wedge seen through the linear map x -> B^{-1} x with B B^T = A, which
/// turns sum a_ij D_ij into the Laplacian.
struct TransformedWedge {
    Wedge2D image{1.0};
    Sym2 b_inv;             ///< symmetric A^{-1/2}
    double jacobian = 1.0;  ///< |det B^{-1}| = 1 / sqrt(det A)
    double lower_edge = 0.0;

    Point2 map(Point2 p) const noexcept { return b_inv.apply(p); }
};

TransformedWedge transform_wedge(const SpdMatrix2& a, const Wedge2D& domain);

/// Exact Dirichlet kernel of d/dt - sum a_ij D_ij with constant A on the wedge.
double transformed_kernel(const SpdMatrix2& a, const Wedge2D& domain, double tau, Point2 x, Point2 y,
                          const SeriesControl& ctrl = {});

/// Cell average of the transformed kernel.
double transformed_cell_average(const SpdMatrix2& a, const Wedge2D& domain, double tau, Point2 y,
                                const PolarCell& cell, int order = 8);

struct TransformCheck {
    double exact = 0.0;  ///< cell average of the transformed exact kernel
    double mc = 0.0;
    double mc_stderr = 0.0;
    double relative_deviation = 0.0;  ///< (mc - exact) / exact
    double z = 0.0;                   ///< (mc - exact) / mc_stderr
    std::uint64_t count = 0;
};

/// Monte Carlo estimate for constant A over x_cell from y against the exact
/// transformed kernel. cfg.binning is replaced by x_cell.
TransformCheck constant_coeff_transform_check(const SpdMatrix2& a, const Wedge2D& domain, double tau,
                                              const PolarCell& x_cell, Point2 y, const McConfig& cfg);

/// Sample grid that resolves the vertex and the boundary down to given scales.
struct RefinementGrid {
    double vertex_min = 1e-2;    ///< smallest |x| / sqrt(tau)
    double boundary_min = 1e-2;  ///< smallest rho(x) / sqrt(tau) away from the vertex
};

/// Kernel samples on a grid: x along several rays (down to vertex_min), x
/// approaching both edges at fixed radii (down to boundary_min), plus a
/// coarse interior grid; y from a small fixed set.
std::vector<KernelSample> refinement_samples(const KernelSampler& sampler, const Wedge2D& domain, double tau,
                                             const RefinementGrid& grid);

struct RefinementLevel {
    int level = 0;
    RefinementGrid grid;
    BoundCheckReport report;
};

/// Bound checks on successively refined grids. Each level shrinks the
/// resolved vertex scale by decay^{1/lambda_c} and the boundary scale by
/// decay, so the kernel itself drops by about `decay` per level at both.
std::vector<RefinementLevel> refinement_study(const KernelSampler& sampler, const Wedge2D& domain, double tau,
                                              const BoundSpec& spec, double lambda_c, int levels,
                                              double decay = 1e3, RefinementGrid base = {});

} // namespace conekernel
