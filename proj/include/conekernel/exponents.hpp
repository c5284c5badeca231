#pragma once

#include "conekernel/spd.hpp"

#include <string_view>

namespace conekernel {

/// Rotated coefficient matrix for a wedge with center direction alpha.
using RotatedCoefficients = Sym2;

struct ParabolicityBounds {
    double nu1 = 1.0;
    double nu2 = 1.0;

    ParabolicityBounds() = default;
    ParabolicityBounds(double lower, double upper);
};

enum class ExponentKind { exact, lower_bound };

/// Which closed form produced an exponent.
enum class ExponentFormula {
    heat_wedge,            ///< pi / kappa for the Laplacian on a planar wedge
    transformed_wedge,     ///< pi / kappa-tilde for constant coefficients
    laplace_beltrami,      ///< -(d-2)/2 + sqrt(Lambda + (d-2)^2/4)
    parabolicity_ratio,    ///< lower bound scaled by sqrt(nu1/nu2)
    uniform_parabolicity,  ///< older lower bound -d/2 + nu sqrt(...)
};

std::string_view to_string(ExponentKind kind) noexcept;
std::string_view to_string(ExponentFormula formula) noexcept;

struct ExponentResult {
    double value = 0.0;
    ExponentKind kind = ExponentKind::exact;
    ExponentFormula formula = ExponentFormula::heat_wedge;
};

struct EigenvalueResult {
    double Lambda = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double degree = 0.0;  ///< nu with Lambda = nu (nu + 1) for caps; sqrt(Lambda) for arcs
};

struct EigenvalueBracket {
    double lower = 0.0;
    double upper = 0.0;
};

RotatedCoefficients rotate_coefficients(const SpdMatrix2& A, double alpha);

/// Opening angle of the image wedge B^{-1} D_{kappa,alpha}, B = sqrt(A).
/// Principal-branch arctan form; continuous through kappa = pi.
double kappa_tilde_closed_form(const SpdMatrix2& A, double kappa, double alpha);

/// Same angle as (1/sqrt(det A)) * integral of 1/(v^T A^{-1} v) over the opening,
/// by composite Gauss–Legendre panels graded around the peaks of the integrand.
double kappa_tilde_quadrature(const SpdMatrix2& A, double kappa, double alpha);

/// Same angle by mapping the edge and center directions through B^{-1}
/// (B from an explicit eigen-decomposition) and summing the two half-angles.
double kappa_tilde_geometric(const SpdMatrix2& A, double kappa, double alpha);

ExponentResult lambda_c_constant(const SpdMatrix2& A, double kappa, double alpha);
ExponentResult lambda_c_heat_2d(double kappa);
ExponentResult lambda_c_laplacian_general(double Lambda, int d);
ExponentResult lambda_lb_improved(const ParabolicityBounds& bounds, double Lambda, int d);
ExponentResult lambda_lb_previous(double nu, double Lambda, int d);

/// Improved minus previous lower bound. Requires nu <= nu1 <= nu2 <= 1/nu.
double bound_gap(const ParabolicityBounds& bounds, double nu, double Lambda, int d);

EigenvalueResult first_dirichlet_eigenvalue_arc(double kappa);
EigenvalueResult first_dirichlet_eigenvalue_cap(double kappa);
EigenvalueBracket cap_eigenvalue_bounds(double kappa);

} // namespace conekernel
