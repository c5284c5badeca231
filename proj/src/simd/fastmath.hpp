#pragma once

// Polynomial log and sincos shared by the scalar and AVX2 kernels. The AVX2
// kernels replay exactly these operations lane-wise, so both tiers agree bit
// for bit. Requires -ffp-contract=off.

#include <bit>
#include <cmath>
#include <cstdint>

namespace conekernel::simd::detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kTwoPi = 6.28318530717958647693;

// 1/(2k+1), k = 1..11
inline constexpr double kLogCoef[11] = {
    1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0, 1.0 / 13.0,
    1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0,
};

// (-1)^k / (2k+1)!, k = 1..9
inline constexpr double kSinCoef[9] = {
    -1.66666666666666666667e-01, 8.33333333333333333333e-03, -1.98412698412698412698e-04,
    2.75573192239858906526e-06,  -2.50521083854417187751e-08, 1.60590438368216145994e-10,
    -7.64716373181981647590e-13, 2.81145725434552076320e-15, -8.22063524662432971696e-18,
};

// (-1)^k / (2k)!, k = 1..9
inline constexpr double kCosCoef[9] = {
    -5.00000000000000000000e-01, 4.16666666666666666667e-02, -1.38888888888888888889e-03,
    2.48015873015873015873e-05,  -2.75573192239858906526e-07, 2.08767569878680989792e-09,
    -1.14707455977297247139e-11, 4.77947733238738529744e-14, -1.56192069685862264622e-16,
};

/// Natural log for positive normal doubles.
inline double log_positive(double u) noexcept {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(u);
    double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52) - 1023);
    double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
    if (m > kSqrt2) {
        m = m * 0.5;
        e = e + 1.0;
    }
    const double f = m - 1.0;
    const double s = f / (2.0 + f);
    const double z = s * s;
    double p = kLogCoef[10];
    for (int k = 9; k >= 0; --k) p = kLogCoef[k] + z * p;
    const double two_s = s + s;
    return e * kLn2Hi + (e * kLn2Lo + (two_s + two_s * (z * p)));
}

/// sin(2 pi u) and cos(2 pi u) for u in [0, 1).
inline void sincos_turns(double u, double& sin_out, double& cos_out) noexcept {
    const double q = std::nearbyint(u * 4.0);
    const double y = u - q * 0.25;
    const double x = y * kTwoPi;
    const double x2 = x * x;
    double sp = kSinCoef[8];
    for (int k = 7; k >= 0; --k) sp = kSinCoef[k] + x2 * sp;
    double cp = kCosCoef[8];
    for (int k = 7; k >= 0; --k) cp = kCosCoef[k] + x2 * cp;
    const double s = x + x * (x2 * sp);
    const double c = 1.0 + x2 * cp;
    switch (static_cast<int>(q) & 3) {
    case 0: sin_out = s; cos_out = c; break;
    case 1: sin_out = c; cos_out = -s; break;
    case 2: sin_out = -s; cos_out = -c; break;
    default: sin_out = -c; cos_out = s; break;
    }
}

/// Box–Muller on two [0,1) uniforms; the first is mapped to (0,1].
inline void box_muller(double v1, double v2, double& xi1, double& xi2) noexcept {
    const double u1 = 1.0 - v1;
    const double r = std::sqrt(-2.0 * log_positive(u1));
    double s, c;
    sincos_turns(v2, s, c);
    xi1 = r * c;
    xi2 = r * s;
}

} // namespace conekernel::simd::detail
