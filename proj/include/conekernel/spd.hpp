#pragma once

#include "conekernel/geometry.hpp"

#include <array>

namespace conekernel {

/// Symmetric 2x2 matrix ((a, b), (b, c)).
struct Sym2 {
    double a = 1.0;
    double b = 0.0;
    double c = 1.0;

    double det() const noexcept { return a * c - b * b; }
    double trace() const noexcept { return a + c; }
    Point2 apply(Point2 v) const noexcept { return {a * v.x1 + b * v.x2, b * v.x1 + c * v.x2}; }
    double quadratic_form(Point2 v) const noexcept { return dot(v, apply(v)); }
    friend bool operator==(const Sym2&, const Sym2&) = default;
};

/// Sym2 with a > 0 and det > 0, checked on construction.
class SpdMatrix2 {
public:
    SpdMatrix2() = default;
    SpdMatrix2(double a, double b, double c);
    explicit SpdMatrix2(const Sym2& m) : SpdMatrix2(m.a, m.b, m.c) {}

    static SpdMatrix2 identity() { return {}; }

    double a() const noexcept { return m_.a; }
    double b() const noexcept { return m_.b; }
    double c() const noexcept { return m_.c; }
    const Sym2& sym() const noexcept { return m_; }

    double det() const noexcept { return m_.det(); }
    double trace() const noexcept { return m_.trace(); }
    Sym2 inverse() const noexcept;

    friend bool operator==(const SpdMatrix2&, const SpdMatrix2&) = default;

private:
    Sym2 m_{};
};

/// Eigenvalues (ascending) and the unit eigenvector of the smaller one.
struct SymEigen2 {
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    Point2 v_min{1.0, 0.0};  ///< v_max is v_min rotated by +90 degrees
};

SymEigen2 eigen_decompose(const Sym2& m) noexcept;

/// Symmetric square root via Cayley–Hamilton: (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
Sym2 spd_sqrt(const Sym2& m) noexcept;

/// R(alpha) M R(alpha)^T with R(alpha) = ((cos, sin), (-sin, cos)).
Sym2 rotate(const Sym2& m, double alpha) noexcept;

} // namespace conekernel
