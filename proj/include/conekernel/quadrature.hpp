#pragma once

#include <span>
#include <vector>

namespace conekernel::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Composite Gauss–Legendre rule on [a, b] with `panels` equal panels of
/// `order` nodes each (order in {4, 8, 16, 20}).
Rule composite_gauss_legendre(double a, double b, int panels, int order);

/// Composite rule over consecutive breakpoints, `order` nodes per interval.
Rule gauss_legendre_on(std::span<const double> breakpoints, int order);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values) noexcept;

} // namespace conekernel::quad
