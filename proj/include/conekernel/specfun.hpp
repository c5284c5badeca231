#pragma once

namespace conekernel::specfun {

/// e^{-z} I_nu(z) for real order nu >= 0 and argument z >= 0.
///
/// Orders below 25 with z <= 30 use the ascending power series. Orders
/// from 25 upward use Debye's uniform asymptotic expansion (valid for every
/// z). Small orders with large z evaluate the uniform expansion at two
/// shifted orders and recur downward, which is stable for I_nu.
/// Relative accuracy is about 1e-12 across the supported range.
double bessel_i_scaled(double nu, double z);

/// Legendre function of the first kind P_nu(x), real degree nu >= 0,
/// x in (-1, 1], from the hypergeometric series 2F1(-nu, nu+1; 1; (1-x)/2).
/// Throws NumericalError("NO_CONVERGENCE") if 1e5 terms are not enough.
double legendre_p(double nu, double x);

/// J_0 and J_1 by their power series; accurate for |x| up to about 10.
double bessel_j0(double x);
double bessel_j1(double x);

/// First positive zero of J_0, Newton-refined from 2.4048.
double bessel_j0_first_zero();

} // namespace conekernel::specfun
