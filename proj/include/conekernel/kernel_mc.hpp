#pragma once

#include "conekernel/geometry.hpp"
#include "conekernel/spd.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace conekernel {

/// Time-dependent coefficient matrix A(t) with declared parabolicity bounds
/// nu1 |xi|^2 <= xi^T A(t) xi <= nu2 |xi|^2.
///
/// The evaluator must be piecewise continuous with finitely many jumps per
/// unit time. Bounds are spot-checked on construction over `check_times`
/// (default: 401 points on [-20, 20]) and again at every simulated step.
class TimeCoefficients {
public:
    using Evaluator = std::function<Sym2(double)>;

    TimeCoefficients(Evaluator evaluator, double nu1, double nu2, std::span<const double> check_times = {});

    static TimeCoefficients constant(const SpdMatrix2& a);

    /// A(t) = base + amplitude * sin(frequency * t + phase); the bounds are the
    /// extreme eigenvalues over the segment between base - amplitude and base + amplitude.
    static TimeCoefficients sinusoidal(const Sym2& base, const Sym2& amplitude, double frequency, double phase = 0.0);

    Sym2 at(double t) const { return evaluator_(t); }
    double nu1() const noexcept { return nu1_; }
    double nu2() const noexcept { return nu2_; }

    /// Throws InputError("PARABOLICITY") if A(t) leaves [nu1, nu2].
    void check(double t) const;

private:
    Evaluator evaluator_;
    double nu1_;
    double nu2_;
};

/// Coefficients of the time-reversed operator: t -> A(-t), same bounds.
TimeCoefficients hat_coefficients(const TimeCoefficients& coeffs);

/// Histogram grid in edge-angle polar coordinates.
struct PolarGrid {
    std::vector<double> radial_edges;
    std::vector<double> angular_edges;

    static PolarGrid uniform(double r_lo, double r_hi, int n_radial, double theta_lo, double theta_hi, int n_angular);
    std::size_t n_radial() const noexcept { return radial_edges.empty() ? 0 : radial_edges.size() - 1; }
    std::size_t n_angular() const noexcept { return angular_edges.empty() ? 0 : angular_edges.size() - 1; }
};

struct McConfig {
    std::uint64_t n_paths = 100000;
    double dt = 0.01;
    std::uint64_t seed = 0;
    PolarGrid binning;
    /// Brownian-bridge test for crossings between step endpoints.
    bool bridge_correction = true;
    /// Worker threads; 0 means hardware concurrency. Never changes results.
    int threads = 0;
};

struct DensityCell {
    PolarCell cell;
    double area = 0.0;
    Point2 centroid;
    std::uint64_t count = 0;
    double value = 0.0;   ///< count / (n_paths * area)
    double std_error = 0.0;  ///< binomial standard error of value
};

struct DensityEstimate {
    std::vector<DensityCell> cells;  ///< radial-major: index = i_r * n_angular + i_theta
    std::size_t n_radial = 0;
    std::size_t n_angular = 0;
    std::uint64_t survivors = 0;
    std::uint64_t total = 0;
    std::uint64_t steps = 0;
    double dt = 0.0;  ///< step actually used: (t - s) / steps

    const DensityCell& at(std::size_t i_r, std::size_t i_theta) const { return cells[i_r * n_angular + i_theta]; }
};

/// Monte Carlo estimate of G(t, s, ., y) for the operator d/dt - sum a_ij(t) D_ij
/// with Dirichlet conditions on the wedge: Euler–Maruyama paths of
/// dX = sqrt(2 A(t)) dW started at y, killed on exit, binned at time t.
///
/// The step is (t - s) / ceil((t - s) / cfg.dt), so cfg.dt is an upper bound.
/// Paths within 4 sqrt(dt) of the vertex take four substeps. Each path draws
/// from its own counter-based stream keyed by (seed, path index), so results
/// do not depend on the number of threads or the SIMD tier.
DensityEstimate simulate_killed_density(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, Point2 y,
                                        double t, const McConfig& cfg);

struct DualityReport {
    double forward = 0.0;  ///< G(t, s, x_cell, y) from paths started at y
    double forward_stderr = 0.0;
    double reverse = 0.0;  ///< G-hat(-s, -t, y_cell, x) from reversed-time paths started at x
    double reverse_stderr = 0.0;
    double z = 0.0;  ///< (forward - reverse) / pooled standard error
    std::uint64_t forward_count = 0;
    std::uint64_t reverse_count = 0;
    PolarCell x_cell;
    PolarCell y_cell;
    Point2 x_start;  ///< area centroid of x_cell
};

/// Compares G(t, s, x, y) with G-hat(-s, -t, y, x). The cell around y has the
/// widths of x_cell and its area centroid at y; the reversed run starts at the
/// area centroid of x_cell. cfg.binning is ignored.
DualityReport duality_report(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, double t,
                             const PolarCell& x_cell, Point2 y, const McConfig& cfg);

double duality_residual(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, double t,
                        const PolarCell& x_cell, Point2 y, const McConfig& cfg);

} // namespace conekernel
