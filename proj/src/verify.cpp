#include "conekernel/verify.hpp"

#include "conekernel/error.hpp"
#include "conekernel/quadrature.hpp"

#include <boost/math/statistics/linear_regression.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conekernel {

namespace {

constexpr double kPi = std::numbers::pi;

void require_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("BAD_TIME", "tau must be positive and finite");
}

// N tau^{-1} (wx^{ex} * fx) (wy^{ey} * fy) exp(-sigma |x - y|^2 / tau); shared by both envelopes so that
// replacing J by R is the only difference in the floating-point evaluation.
double envelope(double n, double tau, double rx, double ex, double fx, double ry, double ey, double fy, double sigma,
                double dist2) {
    const double vx = std::pow(rx, ex) * fx;
    const double vy = std::pow(ry, ey) * fy;
    return n / tau * vx * vy * std::exp(-sigma * dist2 / tau);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    return v;
}

// About `per_decade` log-spaced points covering [lo, hi].
std::vector<double> decade_grid(double lo, double hi, int per_decade) {
    const int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    return log_spaced(lo, hi, n);
}

void check_window(const ExponentFitOptions& opt) {
    if (!(opt.window_lo > 0.0) || !(opt.window_hi >= 10.0 * opt.window_lo) || opt.n_points < 12) {
        throw InputError("INSUFFICIENT_RANGE", "exponent fits need a window of at least one decade and 12 points");
    }
}

FitReport log_log_fit(const std::vector<double>& abscissa, const std::vector<double>& values) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 0.0 && std::isfinite(values[i])) {
            lx.push_back(std::log(abscissa[i]));
            ly.push_back(std::log(values[i]));
        }
    }
    return linear_fit(lx, ly);
}

} // namespace

BoundSpec BoundSpec::two_weight(double lambda_plus, double lambda_minus, double sigma, double N) {
    if (!(sigma > 0.0) || !(N > 0.0)) throw InputError("BAD_BOUND", "sigma and N must be positive");
    BoundSpec s;
    s.lambda_plus = lambda_plus;
    s.lambda_minus = lambda_minus;
    s.sigma = sigma;
    s.N = N;
    s.beta1 = lambda_plus - 1.0;
    s.beta2 = lambda_minus - 1.0;
    return s;
}

double bound_rhs(const BoundSpec& spec, const Wedge2D& domain, double tau, Point2 x, Point2 y) {
    const WeightPair wx = weights(tau, domain, x);
    const WeightPair wy = weights(tau, domain, y);
    const Point2 d = x - y;
    return envelope(spec.N, tau, wx.R, spec.beta1, wx.J, wy.R, spec.beta2, wy.J, spec.sigma, dot(d, d));
}

double less_rough_rhs(const BoundSpec& spec, const Wedge2D& domain, double tau, Point2 x, Point2 y) {
    const WeightPair wx = weights(tau, domain, x);
    const WeightPair wy = weights(tau, domain, y);
    const Point2 d = x - y;
    return envelope(spec.N, tau, wx.R, spec.beta1, wx.R, wy.R, spec.beta2, wy.R, spec.sigma, dot(d, d));
}

BoundCheckReport check_upper_bound(std::span<const KernelSample> samples, const BoundSpec& spec,
                                   const Wedge2D& domain, double floor_rel) {
    if (samples.empty()) throw InputError("EMPTY_SAMPLE", "no kernel samples to check");
    BoundSpec unit = spec;
    unit.N = 1.0;
    double g_max = 0.0;
    for (const auto& s : samples) {
        if (!(s.G >= 0.0)) throw InputError("NEGATIVE_KERNEL", "kernel samples must be nonnegative");
        g_max = std::max(g_max, s.G);
    }
    const double floor = floor_rel * g_max;
    BoundCheckReport rep;
    bool found = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.G < floor || s.G == 0.0) {
            ++rep.n_excluded;
            continue;
        }
        const double rhs = bound_rhs(unit, domain, s.tau, s.x, s.y);
        if (!(rhs > 0.0)) {
            throw NumericalError("ZERO_ENVELOPE", "bound envelope vanishes at a sample with positive kernel value");
        }
        const double ratio = s.G / rhs;
        ++rep.n_evaluated;
        if (!found || ratio > rep.max_ratio) {
            found = true;
            rep.max_ratio = ratio;
            rep.argmax = i;
        }
    }
    if (!found) throw InputError("EMPTY_SAMPLE", "every sample fell below the underflow floor");
    rep.feasible_N = rep.max_ratio;
    rep.argmax_sample = samples[rep.argmax];
    return rep;
}

FitReport linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InputError("SIZE_MISMATCH", "fit abscissa and ordinate differ in length");
    if (xs.size() < 5) throw InputError("INSUFFICIENT_POINTS", "fits need at least 5 usable points");
    FitReport f;
    f.abscissa.assign(xs.begin(), xs.end());
    f.ordinate.assign(ys.begin(), ys.end());
    const auto [lo, hi] = std::minmax_element(f.abscissa.begin(), f.abscissa.end());
    f.window_min = *lo;
    f.window_max = *hi;
    if (!(f.window_min < f.window_max)) throw InputError("INSUFFICIENT_RANGE", "fit abscissa has no spread");
    const auto [c0, c1, r2] = boost::math::statistics::simple_ordinary_least_squares_with_R_squared(f.abscissa, f.ordinate);
    f.intercept = c0;
    f.slope = c1;
    f.r_squared = r2;
    f.n_points = f.abscissa.size();
    const double n = static_cast<double>(f.n_points);
    double mean_x = 0.0;
    for (double v : f.abscissa) mean_x += v;
    mean_x /= n;
    double sxx = 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < f.n_points; ++i) {
        sxx += (f.abscissa[i] - mean_x) * (f.abscissa[i] - mean_x);
        const double e = f.ordinate[i] - (c0 + c1 * f.abscissa[i]);
        sse += e * e;
    }
    f.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
    return f;
}

FitReport fit_gaussian_sigma(std::span<const KernelSample> samples, const Wedge2D& domain) {
    if (samples.empty()) throw InputError("INSUFFICIENT_POINTS", "fits need at least 5 usable points");
    const double tau = samples.front().tau;
    const Point2 y = samples.front().y;
    std::vector<double> xs, ys;
    for (const auto& s : samples) {
        if (s.tau != tau || !(s.y == y)) {
            throw InputError("MIXED_SAMPLES", "Gaussian fits need samples at one tau and one source point");
        }
        if (!(s.G > 0.0) || !contains(domain, s.x) || rho(domain, s.x) < 2.0 * std::sqrt(tau)) continue;
        const Point2 d = s.x - s.y;
        xs.push_back(dot(d, d) / tau);
        ys.push_back(std::log(s.G) + std::log(tau));
    }
    return linear_fit(xs, ys);
}

FitReport fit_vertex_exponent(const KernelSampler& sampler, const Wedge2D& domain, double tau, Point2 y,
                              const ExponentFitOptions& opt) {
    require_tau(tau);
    check_window(opt);
    const double sq = std::sqrt(tau);
    if (!contains(domain, y) || norm(y) < 4.0 * sq * (1.0 - 1e-12)) {
        throw InputError("BAD_SOURCE", "vertex fits need a source with |y| >= 4 sqrt(tau)");
    }
    const auto radii = log_spaced(opt.window_lo * sq, opt.window_hi * sq, opt.n_points);
    std::vector<double> g;
    for (double r : radii) g.push_back(sampler(tau, domain.point_at(r, 0.5 * domain.kappa()), y));
    return log_log_fit(radii, g);
}

FitReport fit_boundary_exponent(const KernelSampler& sampler, const Wedge2D& domain, double tau, Point2 y,
                                double radius, const ExponentFitOptions& opt) {
    require_tau(tau);
    check_window(opt);
    const double sq = std::sqrt(tau);
    if (!(radius >= 4.0 * sq * (1.0 - 1e-12))) {
        throw InputError("BAD_RADIUS", "boundary fits need |x| >= 4 sqrt(tau)");
    }
    if (!contains(domain, y)) throw InputError("OUTSIDE_DOMAIN", "source lies outside the wedge");
    const auto dists = log_spaced(opt.window_lo * sq, opt.window_hi * sq, opt.n_points);
    std::vector<double> rhos, g;
    for (double d : dists) {
        const double phi = std::asin(std::min(1.0, d / radius));
        if (!(phi < 0.5 * domain.kappa())) continue;
        const Point2 x = domain.point_at(radius, phi);
        rhos.push_back(rho(domain, x));
        g.push_back(sampler(tau, x, y));
    }
    return log_log_fit(rhos, g);
}

TransformedWedge transform_wedge(const SpdMatrix2& a, const Wedge2D& domain) {
    TransformedWedge tw;
    tw.b_inv = spd_sqrt(a.inverse());
    tw.jacobian = 1.0 / std::sqrt(a.det());
    const Point2 lo = tw.map(unit_vector(domain.lower_edge_angle()));
    const Point2 hi = tw.map(unit_vector(domain.upper_edge_angle()));
    double opening = std::atan2(cross(lo, hi), dot(lo, hi));
    if (opening <= 0.0) opening += 2.0 * kPi;
    tw.lower_edge = std::atan2(lo.x2, lo.x1);
    tw.image = Wedge2D(opening, tw.lower_edge + 0.5 * opening);
    return tw;
}

double transformed_kernel(const SpdMatrix2& a, const Wedge2D& domain, double tau, Point2 x, Point2 y,
                          const SeriesControl& ctrl) {
    if (!contains(domain, x) || !contains(domain, y)) {
        throw InputError("OUTSIDE_DOMAIN", "points must lie inside the wedge");
    }
    const TransformedWedge tw = transform_wedge(a, domain);
    return tw.jacobian * heat_kernel_wedge(tw.image, tau, tw.map(x), tw.map(y), ctrl);
}

double transformed_cell_average(const SpdMatrix2& a, const Wedge2D& domain, double tau, Point2 y,
                                const PolarCell& cell, int order) {
    const TransformedWedge tw = transform_wedge(a, domain);
    const quad::Rule ang = quad::composite_gauss_legendre(cell.theta_lo, cell.theta_hi, 1, order);
    const quad::Rule rad = quad::composite_gauss_legendre(cell.r_lo, cell.r_hi, 1, order);
    const Point2 ym = tw.map(y);
    double total = 0.0;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < ang.nodes.size(); ++j) {
            const Point2 x = domain.point_at(rad.nodes[i], ang.nodes[j]);
            s += ang.weights[j] * heat_kernel_wedge(tw.image, tau, tw.map(x), ym);
        }
        total += rad.weights[i] * rad.nodes[i] * s;
    }
    return tw.jacobian * total / cell.area();
}

TransformCheck constant_coeff_transform_check(const SpdMatrix2& a, const Wedge2D& domain, double tau,
                                              const PolarCell& x_cell, Point2 y, const McConfig& cfg) {
    require_tau(tau);
    McConfig c = cfg;
    c.binning = {{x_cell.r_lo, x_cell.r_hi}, {x_cell.theta_lo, x_cell.theta_hi}};
    const DensityEstimate est = simulate_killed_density(TimeCoefficients::constant(a), domain, 0.0, y, tau, c);
    TransformCheck chk;
    chk.exact = transformed_cell_average(a, domain, tau, y, x_cell);
    chk.mc = est.cells[0].value;
    chk.mc_stderr = est.cells[0].std_error;
    chk.count = est.cells[0].count;
    chk.relative_deviation = (chk.mc - chk.exact) / chk.exact;
    chk.z = chk.mc_stderr > 0.0 ? (chk.mc - chk.exact) / chk.mc_stderr : INFINITY;
    return chk;
}

std::vector<KernelSample> refinement_samples(const KernelSampler& sampler, const Wedge2D& domain, double tau,
                                             const RefinementGrid& grid) {
    require_tau(tau);
    if (!(grid.vertex_min > 0.0 && grid.vertex_min < 1.0) || !(grid.boundary_min > 0.0 && grid.boundary_min < 0.25)) {
        throw InputError("BAD_GRID", "refinement scales must be small positive multiples of sqrt(tau)");
    }
    const double sq = std::sqrt(tau);
    const double kappa = domain.kappa();
    const std::vector<Point2> sources = {domain.point_at(sq, 0.5 * kappa), domain.point_at(2.0 * sq, 0.3 * kappa)};
    std::vector<Point2> xs;
    // Rays into the vertex.
    for (double frac : {0.5, 0.25, 0.75, 0.125}) {
        for (double r : decade_grid(grid.vertex_min * sq, 4.0 * sq, 6)) xs.push_back(domain.point_at(r, frac * kappa));
    }
    // Approach to both edges away from the vertex.
    const double max_phi = std::min(0.5 * kappa, 0.5 * kPi);
    for (double rf : {0.5, 1.0, 2.0}) {
        const double r = rf * sq;
        for (double d : decade_grid(grid.boundary_min * sq, 0.9 * r * std::sin(max_phi), 6)) {
            const double phi = std::asin(d / r);
            xs.push_back(domain.point_at(r, phi));
            xs.push_back(domain.point_at(r, kappa - phi));
        }
    }
    // Coarse interior grid.
    for (double rf : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
        for (int j = 0; j < 8; ++j) xs.push_back(domain.point_at(rf * sq, (j + 0.5) * kappa / 8.0));
    }
    std::vector<KernelSample> out;
    out.reserve(xs.size() * sources.size());
    for (const Point2& y : sources) {
        for (const Point2& x : xs) out.push_back({tau, x, y, sampler(tau, x, y)});
    }
    return out;
}

std::vector<RefinementLevel> refinement_study(const KernelSampler& sampler, const Wedge2D& domain, double tau,
                                              const BoundSpec& spec, double lambda_c, int levels, double decay,
                                              RefinementGrid base) {
    if (levels < 1 || !(decay > 1.0) || !(lambda_c > 0.0)) {
        throw InputError("BAD_REFINEMENT", "need levels >= 1, decay > 1, lambda_c > 0");
    }
    std::vector<RefinementLevel> out;
    for (int level = 0; level < levels; ++level) {
        RefinementLevel lv;
        lv.level = level;
        lv.grid.vertex_min = base.vertex_min * std::pow(decay, -level / lambda_c);
        lv.grid.boundary_min = base.boundary_min * std::pow(decay, -level);
        const auto samples = refinement_samples(sampler, domain, tau, lv.grid);
        lv.report = check_upper_bound(samples, spec, domain);
        out.push_back(lv);
    }
    return out;
}

} // namespace conekernel
