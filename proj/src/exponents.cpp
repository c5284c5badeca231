#include "conekernel/exponents.hpp"

#include "conekernel/error.hpp"
#include "conekernel/quadrature.hpp"
#include "conekernel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace conekernel {

namespace {

constexpr double kPi = std::numbers::pi;

void check_opening(double kappa) {
    if (!(kappa > 0.0 && kappa < 2.0 * kPi)) {
        throw InputError("BAD_ANGLE", "kappa must lie in (0, 2pi), got " + std::to_string(kappa));
    }
}

void check_eigen_inputs(double Lambda, int d) {
    if (!(Lambda > 0.0) || !std::isfinite(Lambda)) throw InputError("BAD_ARGUMENT", "Lambda must be positive");
    if (d < 2) throw InputError("BAD_ARGUMENT", "dimension must be at least 2");
}

double shifted_root(double Lambda, int d) {
    const double h = 0.5 * (d - 2);
    return std::sqrt(Lambda + h * h);
}

} // namespace

ParabolicityBounds::ParabolicityBounds(double lower, double upper) : nu1(lower), nu2(upper) {
    if (!(lower > 0.0) || !(upper >= lower) || !std::isfinite(upper)) {
        throw InputError("BAD_BOUNDS", "parabolicity bounds need 0 < nu1 <= nu2");
    }
}

std::string_view to_string(ExponentKind kind) noexcept {
    return kind == ExponentKind::exact ? "exact" : "lower_bound";
}

std::string_view to_string(ExponentFormula formula) noexcept {
    switch (formula) {
    case ExponentFormula::heat_wedge: return "heat_wedge";
    case ExponentFormula::transformed_wedge: return "transformed_wedge";
    case ExponentFormula::laplace_beltrami: return "laplace_beltrami";
    case ExponentFormula::parabolicity_ratio: return "parabolicity_ratio";
    case ExponentFormula::uniform_parabolicity: return "uniform_parabolicity";
    }
    return "unknown";
}

RotatedCoefficients rotate_coefficients(const SpdMatrix2& A, double alpha) {
    return rotate(A.sym(), alpha);
}

double kappa_tilde_closed_form(const SpdMatrix2& A, double kappa, double alpha) {
    check_opening(kappa);
    const RotatedCoefficients bar = rotate_coefficients(A, alpha);
    const double half = 0.5 * kappa;
    const double cot_half = std::cos(half) / std::sin(half);
    const double root_det = std::sqrt(A.det());
    return kPi - std::atan((bar.c * cot_half + bar.b) / root_det) - std::atan((bar.c * cot_half - bar.b) / root_det);
}

double kappa_tilde_quadrature(const SpdMatrix2& A, double kappa, double alpha) {
    check_opening(kappa);
    const Sym2 inv = A.inverse();
    const double root_det = std::sqrt(A.det());
    auto integrand = [&inv, root_det](double theta) {
        return 1.0 / (root_det * inv.quadratic_form(unit_vector(theta)));
    };
    const double lo = alpha - 0.5 * kappa;
    const double hi = alpha + 0.5 * kappa;

    // The integrand peaks along the major axis of A with angular width
    // sqrt(lambda_min / lambda_max); panels are graded geometrically around each peak.
    const SymEigen2 e = eigen_decompose(A.sym());
    const double width = std::sqrt(e.lambda_min / e.lambda_max);
    const double major = std::atan2(e.v_min.x1, -e.v_min.x2);
    std::vector<double> breaks{lo, hi};
    for (int k = -4; k <= 4; ++k) {
        const double peak = major + k * kPi;
        if (peak < lo - kPi || peak > hi + kPi) continue;
        breaks.push_back(peak);
        for (double d = 0.25 * width; d < 0.5 * kPi; d *= 2.0) {
            breaks.push_back(peak - d);
            breaks.push_back(peak + d);
        }
    }
    std::erase_if(breaks, [lo, hi](double b) { return b < lo || b > hi; });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return b - a < 1e-14; }),
                 breaks.end());
    const quad::Rule rule = quad::gauss_legendre_on(breaks, 20);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = rule.weights[i] * integrand(rule.nodes[i]);
    return quad::compensated_sum(terms);
}

double kappa_tilde_geometric(const SpdMatrix2& A, double kappa, double alpha) {
    check_opening(kappa);
    const SymEigen2 e = eigen_decompose(A.sym());
    const Point2 q1 = e.v_min;
    const Point2 q2{-q1.x2, q1.x1};
    const double s1 = 1.0 / std::sqrt(e.lambda_min);
    const double s2 = 1.0 / std::sqrt(e.lambda_max);
    // B^{-1} v = Q diag(1/sqrt(lambda)) Q^T v
    auto inv_sqrt = [&](Point2 v) {
        const double c1 = s1 * dot(q1, v);
        const double c2 = s2 * dot(q2, v);
        return c1 * q1 + c2 * q2;
    };
    const Point2 lo = inv_sqrt(unit_vector(alpha - 0.5 * kappa));
    const Point2 mid = inv_sqrt(unit_vector(alpha));
    const Point2 hi = inv_sqrt(unit_vector(alpha + 0.5 * kappa));
    // B^{-1} preserves orientation, so each half-angle stays in (0, pi).
    const double first = std::atan2(cross(lo, mid), dot(lo, mid));
    const double second = std::atan2(cross(mid, hi), dot(mid, hi));
    return first + second;
}

ExponentResult lambda_c_constant(const SpdMatrix2& A, double kappa, double alpha) {
    return {kPi / kappa_tilde_closed_form(A, kappa, alpha), ExponentKind::exact, ExponentFormula::transformed_wedge};
}

ExponentResult lambda_c_heat_2d(double kappa) {
    check_opening(kappa);
    return {kPi / kappa, ExponentKind::exact, ExponentFormula::heat_wedge};
}

ExponentResult lambda_c_laplacian_general(double Lambda, int d) {
    check_eigen_inputs(Lambda, d);
    return {-0.5 * (d - 2) + shifted_root(Lambda, d), ExponentKind::exact, ExponentFormula::laplace_beltrami};
}

ExponentResult lambda_lb_improved(const ParabolicityBounds& bounds, double Lambda, int d) {
    check_eigen_inputs(Lambda, d);
    const double value = -0.5 * (d - 2) + std::sqrt(bounds.nu1 / bounds.nu2) * shifted_root(Lambda, d);
    return {value, ExponentKind::lower_bound, ExponentFormula::parabolicity_ratio};
}

ExponentResult lambda_lb_previous(double nu, double Lambda, int d) {
    check_eigen_inputs(Lambda, d);
    if (!(nu > 0.0 && nu <= 1.0)) throw InputError("BAD_BOUNDS", "parabolicity constant nu must lie in (0, 1]");
    return {-0.5 * d + nu * shifted_root(Lambda, d), ExponentKind::lower_bound, ExponentFormula::uniform_parabolicity};
}

double bound_gap(const ParabolicityBounds& bounds, double nu, double Lambda, int d) {
    if (!(nu > 0.0 && nu <= bounds.nu1 && bounds.nu1 <= bounds.nu2 && bounds.nu2 <= 1.0 / nu)) {
        std::ostringstream msg;
        msg << "need nu <= nu1 <= nu2 <= 1/nu, got nu=" << nu << ", nu1=" << bounds.nu1 << ", nu2=" << bounds.nu2;
        throw InputError("BAD_BOUNDS", msg.str());
    }
    return lambda_lb_improved(bounds, Lambda, d).value - lambda_lb_previous(nu, Lambda, d).value;
}

EigenvalueResult first_dirichlet_eigenvalue_arc(double kappa) {
    check_opening(kappa);
    const double Lambda = kPi * kPi / (kappa * kappa);
    return {Lambda, Lambda, Lambda, kPi / kappa};
}

EigenvalueBracket cap_eigenvalue_bounds(double kappa) {
    check_opening(kappa);
    static const double j0 = specfun::bessel_j0_first_zero();
    return {1.0 / (2.0 * std::abs(std::log(std::cos(0.25 * kappa)))), 4.0 * j0 * j0 / (kappa * kappa)};
}

EigenvalueResult first_dirichlet_eigenvalue_cap(double kappa) {
    check_opening(kappa);
    const double x0 = std::cos(0.5 * kappa);
    auto f = [x0](double nu) { return specfun::legendre_p(nu, x0); };

    // Geometric scan for the first sign change of P_nu(cos(kappa/2)).
    constexpr double kScanStart = 0.05;
    constexpr double kScanEnd = 200.0;
    constexpr double kStride = 1.02;
    double lo = kScanStart;
    double f_lo = f(lo);
    double hi = lo;
    bool bracketed = false;
    while (hi < kScanEnd) {
        hi = std::min(lo * kStride, kScanEnd);
        const double f_hi = f(hi);
        if (f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0)) {
            bracketed = true;
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    if (!bracketed) {
        std::ostringstream msg;
        msg << "no sign change of P_nu(cos(kappa/2)) for nu in [" << kScanStart << ", " << kScanEnd
            << "] (kappa=" << kappa << ")";
        throw NumericalError("ROOT_BRACKET", msg.str());
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((f_lo < 0.0) == (f_mid < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const double nu = 0.5 * (lo + hi);
    const EigenvalueBracket bracket = cap_eigenvalue_bounds(kappa);
    return {nu * (nu + 1.0), bracket.lower, bracket.upper, nu};
}

} // namespace conekernel
