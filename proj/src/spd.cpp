#include "conekernel/spd.hpp"

#include "conekernel/error.hpp"

#include <cmath>
#include <sstream>

namespace conekernel {

SpdMatrix2::SpdMatrix2(double a, double b, double c) : m_{a, b, c} {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !(a > 0.0) || !(m_.det() > 0.0)) {
        std::ostringstream msg;
        msg << "matrix ((" << a << ", " << b << "), (" << b << ", " << c << ")) is not symmetric positive-definite";
        throw InputError("NOT_SPD", msg.str());
    }
}

Sym2 SpdMatrix2::inverse() const noexcept {
    const double d = m_.det();
    return {m_.c / d, -m_.b / d, m_.a / d};
}

SymEigen2 eigen_decompose(const Sym2& m) noexcept {
    const double half_tr = 0.5 * (m.a + m.c);
    const double half_diff = 0.5 * (m.a - m.c);
    const double radius = std::hypot(half_diff, m.b);
    SymEigen2 e;
    e.lambda_max = half_tr + radius;
    // det / lambda_max avoids cancellation when the eigenvalues are far apart.
    e.lambda_min = e.lambda_max > 0.0 ? m.det() / e.lambda_max : half_tr - radius;
    if (radius == 0.0) {
        e.v_min = {1.0, 0.0};
        return e;
    }
    // Eigenvector of lambda_min, direction angle phi with tan(2 phi) = 2b / (a - c), shifted by 90 degrees.
    const double phi_max = 0.5 * std::atan2(m.b, half_diff);
    e.v_min = {-std::sin(phi_max), std::cos(phi_max)};
    return e;
}

Sym2 spd_sqrt(const Sym2& m) noexcept {
    const double s = std::sqrt(m.det());
    const double t = std::sqrt(m.a + m.c + 2.0 * s);
    return {(m.a + s) / t, m.b / t, (m.c + s) / t};
}

Sym2 rotate(const Sym2& m, double alpha) noexcept {
    const double co = std::cos(alpha);
    const double si = std::sin(alpha);
    // R M with R = ((co, si), (-si, co))
    const double p11 = co * m.a + si * m.b;
    const double p12 = co * m.b + si * m.c;
    const double p21 = -si * m.a + co * m.b;
    const double p22 = -si * m.b + co * m.c;
    // (R M) R^T with R^T = ((co, -si), (si, co))
    Sym2 out;
    out.a = p11 * co + p12 * si;
    out.b = 0.5 * ((-p11 * si + p12 * co) + (p21 * co + p22 * si));
    out.c = -p21 * si + p22 * co;
    return out;
}

} // namespace conekernel
