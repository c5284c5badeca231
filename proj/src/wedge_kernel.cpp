#include "conekernel/wedge_kernel.hpp"

#include "conekernel/quadrature.hpp"
#include "conekernel/simd.hpp"
#include "conekernel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace conekernel {

namespace {

constexpr double kPi = std::numbers::pi;

void require_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("BAD_TIME", "tau must be positive and finite");
}

struct PolarPoint {
    double r;
    double theta;
    bool on_boundary;
};

PolarPoint to_polar(const Wedge2D& domain, Point2 p) {
    const double r = norm(p);
    if (!std::isfinite(r)) throw InputError("BAD_POINT", "point coordinates must be finite");
    if (r == 0.0) return {0.0, 0.0, true};
    const double theta = domain.edge_angle(p);
    if (theta < 0.0 || theta > domain.kappa()) {
        throw InputError("OUTSIDE_DOMAIN", "point lies outside the wedge");
    }
    return {r, theta, theta == 0.0 || theta == domain.kappa()};
}

// Geometric tail bound for a positive sequence with non-increasing ratios.
double envelope_tail(double current, double previous) {
    if (!(previous > 0.0)) return current;
    const double q = current / previous;
    if (q >= 1.0) return INFINITY;
    return current * q / (1.0 - q);
}

// Scaled Bessel envelope coefficients for one ring, truncated once the
// envelope tail drops below `tol` times the envelope sum.
std::vector<double> ring_envelope(double phi, double z, double tol, std::int64_t max_terms) {
    std::vector<double> s;
    double env_sum = 0.0;
    double prev = 0.0;
    for (std::int64_t n = 1;; ++n) {
        if (n > max_terms) throw SeriesTruncationError(env_sum, prev, max_terms);
        const double sn = specfun::bessel_i_scaled(static_cast<double>(n) * phi, z);
        if (sn == 0.0) break;
        s.push_back(sn);
        env_sum += sn;
        if (n >= 2 && envelope_tail(sn, prev) <= tol * env_sum) break;
        prev = sn;
    }
    return s;
}

std::vector<double> radial_breakpoints(double r_max, double h) {
    std::vector<double> b{0.0};
    // Graded panels toward the vertex, where the kernel behaves like r^{pi/kappa}.
    for (int k = 8; k >= 1; --k) {
        const double v = h * std::ldexp(1.0, -k);
        if (v < r_max) b.push_back(v);
    }
    for (double v = h; v < r_max; v += h) b.push_back(v);
    b.push_back(r_max);
    return b;
}

quad::Rule angular_rule(double kappa, double radius_scale, double h, int order) {
    const int panels = std::max(4, static_cast<int>(std::ceil(kappa * radius_scale / h)));
    return quad::composite_gauss_legendre(0.0, kappa, panels, order);
}

} // namespace

SeriesTruncationError::SeriesTruncationError(double partial_sum, double last_term, std::int64_t terms)
    : NumericalError("SERIES_TRUNCATION", "wedge kernel series not converged after " + std::to_string(terms) +
                                              " terms (partial sum " + std::to_string(partial_sum) +
                                              ", last term " + std::to_string(last_term) + ")"),
      partial_sum_(partial_sum),
      last_term_(last_term) {}

double heat_kernel_free(int d, double tau, std::span<const double> x, std::span<const double> y) {
    require_tau(tau);
    if (d < 1 || x.size() != static_cast<std::size_t>(d) || y.size() != static_cast<std::size_t>(d)) {
        throw InputError("BAD_DIMENSION", "point dimension does not match d");
    }
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) dist2 += (x[i] - y[i]) * (x[i] - y[i]);
    return std::pow(4.0 * kPi * tau, -0.5 * d) * std::exp(-dist2 / (4.0 * tau));
}

double heat_kernel_free(double tau, Point2 x, Point2 y) {
    const double a[2] = {x.x1, x.x2};
    const double b[2] = {y.x1, y.x2};
    return heat_kernel_free(2, tau, a, b);
}

double heat_kernel_halfplane(double tau, Point2 x, Point2 y) {
    require_tau(tau);
    if (x.x1 < 0.0 || y.x1 < 0.0) throw InputError("OUTSIDE_DOMAIN", "point lies outside the half-plane x1 > 0");
    const Point2 d = x - y;
    const double dy2 = d.x2 * d.x2;
    // exp(-a) - exp(-b) = exp(-a) * (-expm1(a - b)), a = |x-y|^2/4tau, b = |x-y*|^2/4tau, b - a = x1 y1 / tau
    const double a = (d.x1 * d.x1 + dy2) / (4.0 * tau);
    const double gap = x.x1 * y.x1 / tau;
    return std::exp(-a) * -std::expm1(-gap) / (4.0 * kPi * tau);
}

double heat_kernel_wedge_polar(double kappa, double tau, double r, double theta, double r_src, double theta_src,
                               const SeriesControl& ctrl) {
    require_tau(tau);
    if (!(kappa > 0.0 && kappa < 2.0 * kPi)) throw InputError("BAD_ANGLE", "kappa must lie in (0, 2 pi)");
    if (!(ctrl.rel_tol > 0.0 && ctrl.rel_tol < 1.0) || ctrl.max_terms < 1) {
        throw InputError("BAD_CONTROL", "rel_tol must lie in (0, 1) and max_terms be positive");
    }
    if (r <= 0.0 || r_src <= 0.0 || theta <= 0.0 || theta >= kappa || theta_src <= 0.0 || theta_src >= kappa) {
        return 0.0;
    }
    const double dr = r - r_src;
    const double pref = std::exp(-dr * dr / (4.0 * tau)) / (kappa * tau);
    if (pref == 0.0) return 0.0;
    const double phi = kPi / kappa;
    const double z = r * r_src / (2.0 * tau);
    double sum = 0.0;
    double env_sum = 0.0;
    double prev = 0.0;
    double last = 0.0;
    for (std::int64_t n = 1;; ++n) {
        if (n > ctrl.max_terms) throw SeriesTruncationError(pref * sum, pref * std::abs(last), ctrl.max_terms);
        const double nu = static_cast<double>(n) * phi;
        const double sn = specfun::bessel_i_scaled(nu, z);
        if (sn == 0.0) break;
        last = sn * std::sin(nu * theta) * std::sin(nu * theta_src);
        sum += last;
        env_sum += sn;
        if (n >= 2) {
            const double tail = envelope_tail(sn, prev);
            if (tail <= ctrl.rel_tol * std::abs(sum) || tail <= 1e-30 * env_sum) break;
        }
        prev = sn;
    }
    return std::max(0.0, pref * sum);
}

double heat_kernel_wedge(const Wedge2D& domain, double tau, Point2 x, Point2 y, const SeriesControl& ctrl) {
    require_tau(tau);
    const PolarPoint px = to_polar(domain, x);
    const PolarPoint py = to_polar(domain, y);
    if (px.on_boundary || py.on_boundary) return 0.0;
    return heat_kernel_wedge_polar(domain.kappa(), tau, px.r, px.theta, py.r, py.theta, ctrl);
}

double heat_kernel_wedge(double kappa, double tau, Point2 x, Point2 y, const SeriesControl& ctrl) {
    return heat_kernel_wedge(Wedge2D(kappa, 0.0), tau, x, y, ctrl);
}

WedgeKernelSlice::WedgeKernelSlice(const Wedge2D& domain, double tau, Point2 source, std::span<const double> thetas,
                                   std::int64_t max_terms)
    : kappa_(domain.kappa()), tau_(tau), max_terms_(max_terms) {
    require_tau(tau);
    const PolarPoint ps = to_polar(domain, source);
    if (ps.on_boundary) throw InputError("OUTSIDE_DOMAIN", "source must lie strictly inside the wedge");
    r_src_ = ps.r;
    theta_src_ = ps.theta;
    const double phi = kPi / kappa_;
    two_cos_.reserve(thetas.size());
    sines_.reserve(thetas.size());
    for (double t : thetas) {
        two_cos_.push_back(2.0 * std::cos(phi * t));
        sines_.push_back(std::sin(phi * t));
    }
}

void WedgeKernelSlice::evaluate(double r, std::span<double> out) const {
    if (out.size() != size()) throw InputError("SIZE_MISMATCH", "output span does not match the angle set");
    const double dr = r - r_src_;
    const double pref = std::exp(-dr * dr / (4.0 * tau_)) / (kappa_ * tau_);
    if (!(r > 0.0) || pref == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double phi = kPi / kappa_;
    std::vector<double> coeffs = ring_envelope(phi, r * r_src_ / (2.0 * tau_), 1e-16, max_terms_);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        coeffs[k] *= pref * std::sin(static_cast<double>(k + 1) * phi * theta_src_);
    }
    simd::sine_series(coeffs, two_cos_, sines_, out);
}

double kernel_mass(const Wedge2D& domain, double tau, Point2 y, const QuadSpec& quad) {
    require_tau(tau);
    const double sq = std::sqrt(tau);
    const double h = quad.panel_width * sq;
    const double r_max = norm(y) + quad.radius_sigmas * sq;
    const quad::Rule ang = angular_rule(domain.kappa(), norm(y) + 2.0 * sq, h, quad.order);
    const auto breaks = radial_breakpoints(r_max, h);
    const quad::Rule rad = quad::gauss_legendre_on(breaks, quad.order);
    const WedgeKernelSlice slice(domain, tau, y, ang.nodes);
    std::vector<double> ring(ang.nodes.size());
    std::vector<double> ring_terms(ang.nodes.size());
    std::vector<double> radial_terms(rad.nodes.size());
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        slice.evaluate(rad.nodes[i], ring);
        for (std::size_t j = 0; j < ring.size(); ++j) ring_terms[j] = ang.weights[j] * ring[j];
        radial_terms[i] = rad.weights[i] * rad.nodes[i] * quad::compensated_sum(ring_terms);
    }
    return quad::compensated_sum(radial_terms);
}

double kernel_mass(double kappa, double tau, Point2 y, const QuadSpec& quad) {
    return kernel_mass(Wedge2D(kappa, 0.0), tau, y, quad);
}

double chapman_kolmogorov(const Wedge2D& domain, double tau1, double tau2, Point2 x, Point2 y,
                          const QuadSpec& quad) {
    require_tau(tau1);
    require_tau(tau2);
    const double sq_min = std::sqrt(std::min(tau1, tau2));
    const double sq_max = std::sqrt(std::max(tau1, tau2));
    const double h = quad.panel_width * sq_min;
    const double r_far = std::max(norm(x), norm(y));
    const double r_max = r_far + quad.radius_sigmas * sq_max;
    const quad::Rule ang = angular_rule(domain.kappa(), r_far + 2.0 * sq_max, h, quad.order);
    const quad::Rule rad = quad::gauss_legendre_on(radial_breakpoints(r_max, h), quad.order);
    const WedgeKernelSlice from_x(domain, tau1, x, ang.nodes);
    const WedgeKernelSlice from_y(domain, tau2, y, ang.nodes);
    std::vector<double> gx(ang.nodes.size()), gy(ang.nodes.size()), ring_terms(ang.nodes.size());
    std::vector<double> radial_terms(rad.nodes.size());
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        from_x.evaluate(rad.nodes[i], gx);
        from_y.evaluate(rad.nodes[i], gy);
        for (std::size_t j = 0; j < gx.size(); ++j) ring_terms[j] = ang.weights[j] * gx[j] * gy[j];
        radial_terms[i] = rad.weights[i] * rad.nodes[i] * quad::compensated_sum(ring_terms);
    }
    return quad::compensated_sum(radial_terms);
}

double cell_average(const Wedge2D& domain, double tau, Point2 y, const PolarCell& cell, int order) {
    if (!(cell.r_hi > cell.r_lo && cell.r_lo >= 0.0 && cell.theta_hi > cell.theta_lo && cell.theta_lo >= 0.0 &&
          cell.theta_hi <= domain.kappa())) {
        throw InputError("BAD_CELL", "cell must be a nonempty polar rectangle inside the wedge");
    }
    const quad::Rule ang = quad::composite_gauss_legendre(cell.theta_lo, cell.theta_hi, 1, order);
    const quad::Rule rad = quad::composite_gauss_legendre(cell.r_lo, cell.r_hi, 1, order);
    const WedgeKernelSlice slice(domain, tau, y, ang.nodes);
    std::vector<double> ring(ang.nodes.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        slice.evaluate(rad.nodes[i], ring);
        double s = 0.0;
        for (std::size_t j = 0; j < ring.size(); ++j) s += ang.weights[j] * ring[j];
        total += rad.weights[i] * rad.nodes[i] * s;
    }
    return total / cell.area();
}

} // namespace conekernel
