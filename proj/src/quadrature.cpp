#include "conekernel/quadrature.hpp"

#include "conekernel/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <string>

namespace conekernel::quad {

namespace {

template <unsigned N>
void append_panel(Rule& rule, double lo, double hi) {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    // Boost stores the nonnegative half of a symmetric rule; odd N has a zero node first.
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            rule.nodes.push_back(mid);
            rule.weights.push_back(half * w[i]);
            continue;
        }
        rule.nodes.push_back(mid - half * x[i]);
        rule.weights.push_back(half * w[i]);
        rule.nodes.push_back(mid + half * x[i]);
        rule.weights.push_back(half * w[i]);
    }
}

void append(Rule& rule, double lo, double hi, int order) {
    switch (order) {
    case 4: append_panel<4>(rule, lo, hi); break;
    case 8: append_panel<8>(rule, lo, hi); break;
    case 16: append_panel<16>(rule, lo, hi); break;
    case 20: append_panel<20>(rule, lo, hi); break;
    default: throw InputError("BAD_QUADRATURE", "unsupported Gauss-Legendre order " + std::to_string(order));
    }
}

} // namespace

Rule composite_gauss_legendre(double a, double b, int panels, int order) {
    if (panels < 1 || !(b > a)) throw InputError("BAD_QUADRATURE", "need b > a and at least one panel");
    Rule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels * order));
    rule.weights.reserve(static_cast<std::size_t>(panels * order));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double hi = (p + 1 == panels) ? b : a + (p + 1) * h;
        append(rule, lo, hi, order);
    }
    return rule;
}

Rule gauss_legendre_on(std::span<const double> breakpoints, int order) {
    if (breakpoints.size() < 2) throw InputError("BAD_QUADRATURE", "need at least two breakpoints");
    Rule rule;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) {
            throw InputError("BAD_QUADRATURE", "breakpoints must be strictly increasing");
        }
        append(rule, breakpoints[i], breakpoints[i + 1], order);
    }
    return rule;
}

double compensated_sum(std::span<const double> values) noexcept {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

} // namespace conekernel::quad
