#include "conekernel/specfun.hpp"

#include "conekernel/error.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace conekernel::specfun {

namespace {

constexpr double kDebyeMinOrder = 25.0;
constexpr double kSeriesMaxArg = 30.0;
constexpr int kDebyeTerms = 13;  // u_0 .. u_12

// Coefficients of the Debye polynomials u_k(p), k < kDebyeTerms, lowest degree first.
// u_{k+1}(p) = p^2 (1 - p^2) u_k'(p) / 2 + (1/8) int_0^p (1 - 5 t^2) u_k(t) dt.
using Poly = std::vector<double>;

std::vector<Poly> make_debye_polynomials() {
    std::vector<Poly> u(kDebyeTerms);
    u[0] = {1.0};
    for (int k = 0; k + 1 < kDebyeTerms; ++k) {
        const Poly& uk = u[k];
        Poly next(uk.size() + 3, 0.0);
        for (std::size_t j = 1; j < uk.size(); ++j) {
            const double d = static_cast<double>(j) * uk[j];  // coefficient of p^{j-1} in u_k'
            next[j + 1] += 0.5 * d;
            next[j + 3] -= 0.5 * d;
        }
        for (std::size_t j = 0; j < uk.size(); ++j) {
            next[j + 1] += 0.125 * uk[j] / static_cast<double>(j + 1);
            next[j + 3] -= 0.625 * uk[j] / static_cast<double>(j + 3);
        }
        u[k + 1] = std::move(next);
    }
    return u;
}

const std::vector<Poly>& debye_polynomials() {
    static const std::vector<Poly> polys = make_debye_polynomials();
    return polys;
}

double horner(const Poly& c, double p) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * p + *it;
    return acc;
}

double series_scaled(double nu, double z) {
    const double quarter_z2 = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 500; ++k) {
        term *= quarter_z2 / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::pow(0.5 * z, nu) / std::tgamma(nu + 1.0) * std::exp(-z) * sum;
}

double debye_scaled(double nu, double z) {
    const double x = z / nu;
    const double s = std::sqrt(1.0 + x * x);
    const double p = 1.0 / s;
    // log(x / (1 + s)) without cancellation at either end of the range.
    const double log_ratio = x < 1.0 ? std::log(x) - std::log1p(s)
                                     : std::log1p(-(1.0 + 1.0 / (s + x)) / (1.0 + s));
    const double exponent = nu * (1.0 / (s + x) + log_ratio);  // nu * eta - z

    const auto& u = debye_polynomials();
    double sum = 0.0;
    double inv_pow = 1.0;
    for (int k = 0; k < kDebyeTerms; ++k) {
        sum += horner(u[k], p) * inv_pow;
        inv_pow /= nu;
    }
    return std::exp(exponent) * sum / std::sqrt(2.0 * std::numbers::pi * nu * s);
}

void check_nonnegative(double nu, double z) {
    if (!(nu >= 0.0) || !std::isfinite(nu) || !(z >= 0.0) || std::isnan(z)) {
        throw InputError("BAD_ARGUMENT", "bessel_i_scaled requires nu >= 0 and z >= 0");
    }
}

} // namespace

double bessel_i_scaled(double nu, double z) {
    check_nonnegative(nu, z);
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (std::isinf(z)) return 0.0;
    if (nu >= kDebyeMinOrder) return debye_scaled(nu, z);
    if (z <= kSeriesMaxArg) return series_scaled(nu, z);

    // Start two orders above the Debye threshold and recur down:
    // I_{k-1} = (2k / z) I_k + I_{k+1}.
    const double shift = std::ceil(kDebyeMinOrder - nu);
    double order = nu + shift;
    double upper = debye_scaled(order + 1.0, z);
    double current = debye_scaled(order, z);
    for (int i = 0; i < static_cast<int>(shift); ++i) {
        const double lower = (2.0 * order / z) * current + upper;
        upper = current;
        current = lower;
        order -= 1.0;
    }
    return current;
}

double legendre_p(double nu, double x) {
    if (!(nu >= 0.0) || !std::isfinite(nu) || !(x > -1.0 && x <= 1.0)) {
        throw InputError("BAD_ARGUMENT", "legendre_p requires nu >= 0 and x in (-1, 1]");
    }
    const double w = 0.5 * (1.0 - x);
    double term = 1.0;
    double sum = 1.0;
    constexpr int kMaxTerms = 100000;
    for (int k = 0; k < kMaxTerms; ++k) {
        term *= (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0)) * w;
        sum += term;
        if (term == 0.0) return sum;
        // Past k > nu the terms no longer grow, so a small one bounds the tail.
        if (k > nu && std::abs(term) < 1e-14 * std::abs(sum)) return sum;
        if (k > nu && std::abs(term) < 1e-300) return sum;
    }
    throw NumericalError("NO_CONVERGENCE", "legendre_p series did not converge for nu=" + std::to_string(nu) +
                                               ", x=" + std::to_string(x));
}

double bessel_j0(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double bessel_j1(double x) {
    const double q = -0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double bessel_j0_first_zero() {
    double x = 2.4048;
    for (int it = 0; it < 50; ++it) {
        const double step = bessel_j0(x) / bessel_j1(x);  // J0' = -J1
        x += step;
        if (std::abs(step) < 1e-15 * x) break;
    }
    return x;
}

} // namespace conekernel::specfun
