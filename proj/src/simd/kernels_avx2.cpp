// Compiled with -mavx2 and without FMA; lane arithmetic mirrors kernels_scalar.cpp.

#include "kernels.hpp"

#include "fastmath.hpp"

#include <immintrin.h>

namespace conekernel::simd::detail {

namespace {

inline __m256d broadcast(double v) { return _mm256_set1_pd(v); }

inline __m256d negate(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

inline __m256d log_positive4(__m256d u) {
    const __m256i bits = _mm256_castpd_si256(u);
    const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
    const __m256d magic = broadcast(4503599627370496.0);  // 2^52
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(magic))), magic);
    e = _mm256_sub_pd(e, broadcast(1023.0));
    const __m256i mant = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                                         _mm256_set1_epi64x(0x3FF0000000000000ll));
    __m256d m = _mm256_castsi256_pd(mant);
    const __m256d big = _mm256_cmp_pd(m, broadcast(kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, broadcast(0.5)), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, broadcast(1.0)), big);
    const __m256d f = _mm256_sub_pd(m, broadcast(1.0));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(broadcast(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    __m256d p = broadcast(kLogCoef[10]);
    for (int k = 9; k >= 0; --k) p = _mm256_add_pd(broadcast(kLogCoef[k]), _mm256_mul_pd(z, p));
    const __m256d two_s = _mm256_add_pd(s, s);
    const __m256d tail = _mm256_add_pd(two_s, _mm256_mul_pd(two_s, _mm256_mul_pd(z, p)));
    return _mm256_add_pd(_mm256_mul_pd(e, broadcast(kLn2Hi)),
                         _mm256_add_pd(_mm256_mul_pd(e, broadcast(kLn2Lo)), tail));
}

inline void sincos_turns4(__m256d u, __m256d& sin_out, __m256d& cos_out) {
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(u, broadcast(4.0)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256d y = _mm256_sub_pd(u, _mm256_mul_pd(q, broadcast(0.25)));
    const __m256d x = _mm256_mul_pd(y, broadcast(kTwoPi));
    const __m256d x2 = _mm256_mul_pd(x, x);
    __m256d sp = broadcast(kSinCoef[8]);
    for (int k = 7; k >= 0; --k) sp = _mm256_add_pd(broadcast(kSinCoef[k]), _mm256_mul_pd(x2, sp));
    __m256d cp = broadcast(kCosCoef[8]);
    for (int k = 7; k >= 0; --k) cp = _mm256_add_pd(broadcast(kCosCoef[k]), _mm256_mul_pd(x2, cp));
    const __m256d s = _mm256_add_pd(x, _mm256_mul_pd(x, _mm256_mul_pd(x2, sp)));
    const __m256d c = _mm256_add_pd(broadcast(1.0), _mm256_mul_pd(x2, cp));
    const __m256d q1 = _mm256_cmp_pd(q, broadcast(1.0), _CMP_EQ_OQ);
    const __m256d q2 = _mm256_cmp_pd(q, broadcast(2.0), _CMP_EQ_OQ);
    const __m256d q3 = _mm256_cmp_pd(q, broadcast(3.0), _CMP_EQ_OQ);
    __m256d sv = s;
    __m256d cv = c;
    sv = _mm256_blendv_pd(sv, c, q1);
    cv = _mm256_blendv_pd(cv, negate(s), q1);
    sv = _mm256_blendv_pd(sv, negate(s), q2);
    cv = _mm256_blendv_pd(cv, negate(c), q2);
    sv = _mm256_blendv_pd(sv, negate(c), q3);
    cv = _mm256_blendv_pd(cv, s, q3);
    sin_out = sv;
    cos_out = cv;
}

inline __m256d unit_from_bits4(__m256i bits) {
    const __m256i v = _mm256_or_si256(_mm256_srli_epi64(bits, 12), _mm256_set1_epi64x(0x3FF0000000000000ll));
    return _mm256_sub_pd(_mm256_castsi256_pd(v), broadcast(1.0));
}

} // namespace

void sine_series_avx2(const double* coeffs, std::size_t n_coeffs, const double* two_cos, const double* sines,
                      double* out, std::size_t n_points) noexcept {
    std::size_t j = 0;
    for (; j + 4 <= n_points; j += 4) {
        const __m256d tc = _mm256_loadu_pd(two_cos + j);
        __m256d b1 = _mm256_setzero_pd();
        __m256d b2 = _mm256_setzero_pd();
        for (std::size_t k = n_coeffs; k-- > 0;) {
            const __m256d b0 = _mm256_sub_pd(_mm256_add_pd(broadcast(coeffs[k]), _mm256_mul_pd(tc, b1)), b2);
            b2 = b1;
            b1 = b0;
        }
        _mm256_storeu_pd(out + j, _mm256_mul_pd(b1, _mm256_loadu_pd(sines + j)));
    }
    sine_series_scalar(coeffs, n_coeffs, two_cos + j, sines + j, out + j, n_points - j);
}

void gaussian_pairs_avx2(rng::Key key, const std::uint64_t* paths, std::size_t n, std::uint32_t step,
                         std::uint32_t tag, double* xi1, double* xi2) noexcept {
    __m256i round_k0[rng::kPhiloxRounds];
    __m256i round_k1[rng::kPhiloxRounds];
    {
        rng::Key k = key;
        for (int r = 0; r < rng::kPhiloxRounds; ++r) {
            if (r > 0) {
                k[0] += rng::kPhiloxW0;
                k[1] += rng::kPhiloxW1;
            }
            round_k0[r] = _mm256_set1_epi64x(static_cast<long long>(k[0]));
            round_k1[r] = _mm256_set1_epi64x(static_cast<long long>(k[1]));
        }
    }
    const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
    const __m256i m0 = _mm256_set1_epi64x(rng::kPhiloxM0);
    const __m256i m1 = _mm256_set1_epi64x(rng::kPhiloxM1);
    const __m256i step_v = _mm256_set1_epi64x(step);
    const __m256i tag_v = _mm256_set1_epi64x(tag);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i p = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(paths + i));
        __m256i c0 = _mm256_and_si256(p, lo_mask);
        __m256i c1 = _mm256_srli_epi64(p, 32);
        __m256i c2 = step_v;
        __m256i c3 = tag_v;
        for (int r = 0; r < rng::kPhiloxRounds; ++r) {
            const __m256i p0 = _mm256_mul_epu32(c0, m0);
            const __m256i p1 = _mm256_mul_epu32(c2, m1);
            const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), round_k0[r]);
            const __m256i n1 = _mm256_and_si256(p1, lo_mask);
            const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), round_k1[r]);
            const __m256i n3 = _mm256_and_si256(p0, lo_mask);
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
        }
        const __m256d v1 = unit_from_bits4(_mm256_or_si256(_mm256_slli_epi64(c1, 32), c0));
        const __m256d v2 = unit_from_bits4(_mm256_or_si256(_mm256_slli_epi64(c3, 32), c2));
        const __m256d u1 = _mm256_sub_pd(broadcast(1.0), v1);
        const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(broadcast(-2.0), log_positive4(u1)));
        __m256d s, c;
        sincos_turns4(v2, s, c);
        _mm256_storeu_pd(xi1 + i, _mm256_mul_pd(r, c));
        _mm256_storeu_pd(xi2 + i, _mm256_mul_pd(r, s));
    }
    gaussian_pairs_scalar(key, paths + i, n - i, step, tag, xi1 + i, xi2 + i);
}

void advance_paths_avx2(const StepParams& p, double* x1, double* x2, const double* xi1, const double* xi2,
                        std::uint8_t* alive, double* e_lo, double* e_hi, std::size_t n) noexcept {
    const __m256d s11 = broadcast(p.s11), s12 = broadcast(p.s12), s22 = broadcast(p.s22);
    const __m256d nl1 = broadcast(p.n_lo1), nl2 = broadcast(p.n_lo2);
    const __m256d nh1 = broadcast(p.n_hi1), nh2 = broadcast(p.n_hi2);
    const __m256d ul1 = broadcast(p.u_lo1), ul2 = broadcast(p.u_lo2);
    const __m256d uh1 = broadcast(p.u_hi1), uh2 = broadcast(p.u_hi2);
    const __m256d ivl = broadcast(p.inv_var_lo), ivh = broadcast(p.inv_var_hi);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d none = broadcast(kNoBridge);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a1 = _mm256_loadu_pd(x1 + i);
        const __m256d a2 = _mm256_loadu_pd(x2 + i);
        const __m256d g1 = _mm256_loadu_pd(xi1 + i);
        const __m256d g2 = _mm256_loadu_pd(xi2 + i);
        const __m256d b1 = _mm256_add_pd(a1, _mm256_add_pd(_mm256_mul_pd(s11, g1), _mm256_mul_pd(s12, g2)));
        const __m256d b2 = _mm256_add_pd(a2, _mm256_add_pd(_mm256_mul_pd(s12, g1), _mm256_mul_pd(s22, g2)));
        const __m256d dlo0 = _mm256_add_pd(_mm256_mul_pd(nl1, a1), _mm256_mul_pd(nl2, a2));
        const __m256d dlo1 = _mm256_add_pd(_mm256_mul_pd(nl1, b1), _mm256_mul_pd(nl2, b2));
        const __m256d dhi0 = _mm256_add_pd(_mm256_mul_pd(nh1, a1), _mm256_mul_pd(nh2, a2));
        const __m256d dhi1 = _mm256_add_pd(_mm256_mul_pd(nh1, b1), _mm256_mul_pd(nh2, b2));
        const __m256d in_lo = _mm256_cmp_pd(dlo1, zero, _CMP_GT_OQ);
        const __m256d in_hi = _mm256_cmp_pd(dhi1, zero, _CMP_GT_OQ);
        __m256d use_lo = _mm256_and_pd(_mm256_cmp_pd(dlo0, zero, _CMP_GT_OQ), in_lo);
        __m256d use_hi = _mm256_and_pd(_mm256_cmp_pd(dhi0, zero, _CMP_GT_OQ), in_hi);
        __m256d inside;
        switch (p.mode) {
        case WedgeMode::halfplane:
            inside = in_lo;
            use_hi = zero;
            break;
        case WedgeMode::convex:
            inside = _mm256_and_pd(in_lo, in_hi);
            break;
        default: {
            inside = _mm256_or_pd(in_lo, in_hi);
            const __m256d m1 = _mm256_add_pd(a1, b1);
            const __m256d m2 = _mm256_add_pd(a2, b2);
            const __m256d pl = _mm256_add_pd(_mm256_mul_pd(ul1, m1), _mm256_mul_pd(ul2, m2));
            const __m256d ph = _mm256_add_pd(_mm256_mul_pd(uh1, m1), _mm256_mul_pd(uh2, m2));
            use_lo = _mm256_and_pd(use_lo, _mm256_cmp_pd(pl, zero, _CMP_GE_OQ));
            use_hi = _mm256_and_pd(use_hi, _mm256_cmp_pd(ph, zero, _CMP_GE_OQ));
            break;
        }
        }
        _mm256_storeu_pd(x1 + i, b1);
        _mm256_storeu_pd(x2 + i, b2);
        const int mask = _mm256_movemask_pd(inside);
        alive[i + 0] = static_cast<std::uint8_t>(mask & 1);
        alive[i + 1] = static_cast<std::uint8_t>((mask >> 1) & 1);
        alive[i + 2] = static_cast<std::uint8_t>((mask >> 2) & 1);
        alive[i + 3] = static_cast<std::uint8_t>((mask >> 3) & 1);
        _mm256_storeu_pd(e_lo + i, _mm256_blendv_pd(none, _mm256_mul_pd(_mm256_mul_pd(dlo0, dlo1), ivl), use_lo));
        _mm256_storeu_pd(e_hi + i, _mm256_blendv_pd(none, _mm256_mul_pd(_mm256_mul_pd(dhi0, dhi1), ivh), use_hi));
    }
    advance_paths_scalar(p, x1 + i, x2 + i, xi1 + i, xi2 + i, alive + i, e_lo + i, e_hi + i, n - i);
}

} // namespace conekernel::simd::detail
