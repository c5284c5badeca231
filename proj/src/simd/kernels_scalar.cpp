#include "kernels.hpp"

#include "fastmath.hpp"

namespace conekernel::simd::detail {

void sine_series_scalar(const double* coeffs, std::size_t n_coeffs, const double* two_cos, const double* sines,
                        double* out, std::size_t n_points) noexcept {
    for (std::size_t j = 0; j < n_points; ++j) {
        const double tc = two_cos[j];
        double b1 = 0.0;
        double b2 = 0.0;
        for (std::size_t k = n_coeffs; k-- > 0;) {
            const double b0 = (coeffs[k] + tc * b1) - b2;
            b2 = b1;
            b1 = b0;
        }
        out[j] = b1 * sines[j];
    }
}

void gaussian_pairs_scalar(rng::Key key, const std::uint64_t* paths, std::size_t n, std::uint32_t step,
                           std::uint32_t tag, double* xi1, double* xi2) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = rng::uniform_pair(key, paths[i], step, tag);
        box_muller(u[0], u[1], xi1[i], xi2[i]);
    }
}

void advance_paths_scalar(const StepParams& p, double* x1, double* x2, const double* xi1, const double* xi2,
                          std::uint8_t* alive, double* e_lo, double* e_hi, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const double a1 = x1[i];
        const double a2 = x2[i];
        const double b1 = a1 + (p.s11 * xi1[i] + p.s12 * xi2[i]);
        const double b2 = a2 + (p.s12 * xi1[i] + p.s22 * xi2[i]);
        const double dlo0 = p.n_lo1 * a1 + p.n_lo2 * a2;
        const double dlo1 = p.n_lo1 * b1 + p.n_lo2 * b2;
        const double dhi0 = p.n_hi1 * a1 + p.n_hi2 * a2;
        const double dhi1 = p.n_hi1 * b1 + p.n_hi2 * b2;
        bool inside;
        bool use_lo = dlo0 > 0.0 && dlo1 > 0.0;
        bool use_hi = dhi0 > 0.0 && dhi1 > 0.0;
        switch (p.mode) {
        case WedgeMode::halfplane:
            inside = dlo1 > 0.0;
            use_hi = false;
            break;
        case WedgeMode::convex:
            inside = dlo1 > 0.0 && dhi1 > 0.0;
            break;
        default: {
            inside = dlo1 > 0.0 || dhi1 > 0.0;
            const double m1 = a1 + b1;
            const double m2 = a2 + b2;
            use_lo = use_lo && (p.u_lo1 * m1 + p.u_lo2 * m2) >= 0.0;
            use_hi = use_hi && (p.u_hi1 * m1 + p.u_hi2 * m2) >= 0.0;
            break;
        }
        }
        x1[i] = b1;
        x2[i] = b2;
        alive[i] = inside ? 1 : 0;
        e_lo[i] = use_lo ? (dlo0 * dlo1) * p.inv_var_lo : kNoBridge;
        e_hi[i] = use_hi ? (dhi0 * dhi1) * p.inv_var_hi : kNoBridge;
    }
}

} // namespace conekernel::simd::detail
