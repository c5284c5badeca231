#include "kernels.hpp"

#include "conekernel/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace conekernel::simd {

namespace {

// -1: automatic, otherwise static_cast<int>(Level)
std::atomic<int> g_forced{-1};

void require_sizes(bool ok) {
    if (!ok) throw InputError("SIZE_MISMATCH", "kernel arrays have inconsistent lengths");
}

} // namespace

std::string_view to_string(Level level) noexcept {
    return level == Level::avx2 ? "avx2" : "scalar";
}

std::optional<Level> parse_level(std::string_view name) noexcept {
    if (name == "scalar") return Level::scalar;
    if (name == "avx2") return Level::avx2;
    return std::nullopt;
}

Level detected_level() noexcept {
#if defined(CONEKERNEL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool has_avx2 = __builtin_cpu_supports("avx2");
    if (has_avx2) return Level::avx2;
#endif
    return Level::scalar;
}

bool supported(Level level) noexcept {
    return level == Level::scalar || detected_level() == Level::avx2;
}

Level active_level() noexcept {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Level>(forced);
    if (const char* env = std::getenv("CONEKERNEL_SIMD")) {
        if (auto level = parse_level(env); level && supported(*level)) return *level;
    }
    return detected_level();
}

void force_level(std::optional<Level> level) noexcept {
    if (level && !supported(*level)) level = Level::scalar;
    g_forced.store(level ? static_cast<int>(*level) : -1, std::memory_order_relaxed);
}

void sine_series(std::span<const double> coeffs, std::span<const double> two_cos, std::span<const double> sines,
                 std::span<double> out, Level level) {
    require_sizes(two_cos.size() == out.size() && sines.size() == out.size());
#if defined(CONEKERNEL_HAVE_AVX2)
    if (level == Level::avx2 && supported(level)) {
        detail::sine_series_avx2(coeffs.data(), coeffs.size(), two_cos.data(), sines.data(), out.data(), out.size());
        return;
    }
#endif
    detail::sine_series_scalar(coeffs.data(), coeffs.size(), two_cos.data(), sines.data(), out.data(), out.size());
}

void gaussian_pairs(rng::Key key, std::span<const std::uint64_t> paths, std::uint32_t step, std::uint32_t tag,
                    std::span<double> xi1, std::span<double> xi2, Level level) {
    require_sizes(xi1.size() == paths.size() && xi2.size() == paths.size());
#if defined(CONEKERNEL_HAVE_AVX2)
    if (level == Level::avx2 && supported(level)) {
        detail::gaussian_pairs_avx2(key, paths.data(), paths.size(), step, tag, xi1.data(), xi2.data());
        return;
    }
#endif
    detail::gaussian_pairs_scalar(key, paths.data(), paths.size(), step, tag, xi1.data(), xi2.data());
}

void advance_paths(const StepParams& params, std::span<double> x1, std::span<double> x2, std::span<const double> xi1,
                   std::span<const double> xi2, std::span<std::uint8_t> alive, std::span<double> e_lo,
                   std::span<double> e_hi, Level level) {
    const std::size_t n = x1.size();
    require_sizes(x2.size() == n && xi1.size() == n && xi2.size() == n && alive.size() == n && e_lo.size() == n &&
                  e_hi.size() == n);
#if defined(CONEKERNEL_HAVE_AVX2)
    if (level == Level::avx2 && supported(level)) {
        detail::advance_paths_avx2(params, x1.data(), x2.data(), xi1.data(), xi2.data(), alive.data(), e_lo.data(),
                                   e_hi.data(), n);
        return;
    }
#endif
    detail::advance_paths_scalar(params, x1.data(), x2.data(), xi1.data(), xi2.data(), alive.data(), e_lo.data(),
                                 e_hi.data(), n);
}

} // namespace conekernel::simd
