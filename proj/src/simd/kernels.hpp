#pragma once

#include "conekernel/simd.hpp"

namespace conekernel::simd::detail {

void sine_series_scalar(const double* coeffs, std::size_t n_coeffs, const double* two_cos, const double* sines,
                        double* out, std::size_t n_points) noexcept;
void gaussian_pairs_scalar(rng::Key key, const std::uint64_t* paths, std::size_t n, std::uint32_t step,
                           std::uint32_t tag, double* xi1, double* xi2) noexcept;
void advance_paths_scalar(const StepParams& p, double* x1, double* x2, const double* xi1, const double* xi2,
                          std::uint8_t* alive, double* e_lo, double* e_hi, std::size_t n) noexcept;

#if defined(CONEKERNEL_HAVE_AVX2)
void sine_series_avx2(const double* coeffs, std::size_t n_coeffs, const double* two_cos, const double* sines,
                      double* out, std::size_t n_points) noexcept;
void gaussian_pairs_avx2(rng::Key key, const std::uint64_t* paths, std::size_t n, std::uint32_t step,
                         std::uint32_t tag, double* xi1, double* xi2) noexcept;
void advance_paths_avx2(const StepParams& p, double* x1, double* x2, const double* xi1, const double* xi2,
                        std::uint8_t* alive, double* e_lo, double* e_hi, std::size_t n) noexcept;
#endif

} // namespace conekernel::simd::detail
