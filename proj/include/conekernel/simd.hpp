#pragma once

#include "conekernel/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace conekernel::simd {

/// Instruction-set tier for the data-parallel kernels. Every tier produces
/// bit-identical results; the AVX2 tier only changes throughput.
enum class Level { scalar, avx2 };

std::string_view to_string(Level level) noexcept;
std::optional<Level> parse_level(std::string_view name) noexcept;

/// Highest tier the running CPU supports.
Level detected_level() noexcept;

/// Tier used by default: CONEKERNEL_SIMD if set and supported, else detected.
Level active_level() noexcept;

/// Pin the default tier (tests); std::nullopt restores automatic selection.
void force_level(std::optional<Level> level) noexcept;

bool supported(Level level) noexcept;

/// out[j] = sum_{k=1}^{n} coeffs[k-1] * sin(k * phi_j), by Clenshaw's recurrence.
/// two_cos[j] = 2 cos(phi_j), sines[j] = sin(phi_j).
void sine_series(std::span<const double> coeffs, std::span<const double> two_cos, std::span<const double> sines,
                 std::span<double> out, Level level = active_level());

/// Standard normal pairs by Box–Muller from Philox streams keyed by path index.
/// Each path draws one Philox block at (paths[i], step, tag).
void gaussian_pairs(rng::Key key, std::span<const std::uint64_t> paths, std::uint32_t step, std::uint32_t tag,
                    std::span<double> xi1, std::span<double> xi2, Level level = active_level());

/// How the two boundary rays combine into the wedge.
enum class WedgeMode : int {
    halfplane = 0,  ///< kappa == pi: a single boundary line
    convex = 1,     ///< kappa < pi: intersection of two half-planes
    reflex = 2,     ///< kappa > pi: union of two half-planes
};

/// Per-step constants for one Euler–Maruyama step of dX = sqrt(2A) dW.
struct StepParams {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;  ///< sqrt(2 A dt)
    double n_lo1 = 0.0, n_lo2 = 0.0;         ///< inward unit normal of the clockwise edge
    double n_hi1 = 0.0, n_hi2 = 0.0;         ///< inward unit normal of the counterclockwise edge
    double u_lo1 = 0.0, u_lo2 = 0.0;         ///< direction of the clockwise edge ray
    double u_hi1 = 0.0, u_hi2 = 0.0;
    double inv_var_lo = 0.0;                 ///< 1 / (n_lo^T A n_lo dt)
    double inv_var_hi = 0.0;
    WedgeMode mode = WedgeMode::convex;
};

/// Bridge exponent reported when no crossing test applies.
inline constexpr double kNoBridge = 1e300;

/// Advance paths one step: x += S xi, alive[i] = endpoint inside the wedge,
/// e_lo/e_hi = d_start d_end / (a_nn dt) for each applicable edge, else kNoBridge.
/// A crossing between the endpoints then has probability exp(-e).
void advance_paths(const StepParams& params, std::span<double> x1, std::span<double> x2, std::span<const double> xi1,
                   std::span<const double> xi2, std::span<std::uint8_t> alive, std::span<double> e_lo,
                   std::span<double> e_hi, Level level = active_level());

} // namespace conekernel::simd
