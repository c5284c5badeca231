#include "conekernel/error.hpp"
#include "conekernel/kernel_mc.hpp"
#include "conekernel/simd.hpp"
#include "conekernel/verify.hpp"
#include "conekernel/wedge_kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace conekernel;
using std::numbers::pi;

namespace {

struct Agreement {
    std::size_t tested = 0;
    std::size_t within = 0;
    double fraction() const { return tested ? static_cast<double>(within) / tested : 0.0; }
};

Agreement compare_with_exact(const DensityEstimate& est, const Wedge2D& w, double tau, Point2 y) {
    Agreement a;
    for (const auto& c : est.cells) {
        if (c.count < 50) continue;
        ++a.tested;
        if (std::abs(c.value - cell_average(w, tau, y, c.cell)) <= 3.0 * c.std_error) ++a.within;
    }
    return a;
}

McConfig base_config(const Wedge2D& w, std::uint64_t paths) {
    McConfig cfg;
    cfg.n_paths = paths;
    cfg.dt = 0.01;
    cfg.seed = 20240607;
    cfg.binning = PolarGrid::uniform(0.1, 3.1, 10, 0.0, w.kappa(), 10);
    return cfg;
}

std::string code_of(auto&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.code();
    } catch (const NumericalError& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("time-reversed coefficients") {
    const auto coeffs = TimeCoefficients::sinusoidal({2.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, 1.0);
    const auto hat = hat_coefficients(coeffs);
    const auto hat_hat = hat_coefficients(hat);
    for (double t = -5.0; t <= 5.0; t += 0.37) {
        CHECK(hat.at(t).a == doctest::Approx(2.0 - std::sin(t)).epsilon(1e-15));
        CHECK(hat.at(t).c == 1.0);
        CHECK(hat_hat.at(t) == coeffs.at(t));
    }
    CHECK(hat.nu1() == coeffs.nu1());
    CHECK(hat.nu2() == coeffs.nu2());
    const auto constant = TimeCoefficients::constant(SpdMatrix2(3.0, 0.5, 1.0));
    CHECK(hat_coefficients(constant).at(1.7) == constant.at(-4.0));
}

TEST_CASE("coefficient bounds and guards") {
    const auto coeffs = TimeCoefficients::sinusoidal({2.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, 1.0);
    CHECK(coeffs.nu1() == doctest::Approx(1.0));
    CHECK(coeffs.nu2() == doctest::Approx(3.0));
    CHECK(code_of([] { TimeCoefficients::sinusoidal({1.0, 0.0, 1.0}, {2.0, 0.0, 0.0}, 1.0); }) == "NOT_SPD");
    CHECK(code_of([] { TimeCoefficients([](double) { return Sym2{4.0, 0.0, 1.0}; }, 1.0, 2.0); }) == "PARABOLICITY");
    const TimeCoefficients jumpy([](double t) { return t < 30.0 ? Sym2{1.0, 0.0, 1.0} : Sym2{5.0, 0.0, 1.0}; }, 1.0,
                                 2.0);
    CHECK_NOTHROW(jumpy.check(1.0));
    CHECK(code_of([&] { jumpy.check(31.0); }) == "PARABOLICITY");
    // The guard also runs inside the simulation.
    const Wedge2D w(0.5 * pi);
    McConfig cfg = base_config(w, 100);
    CHECK(code_of([&] { simulate_killed_density(jumpy, w, 29.5, w.point_at(1.0, 0.7), 30.5, cfg); }) ==
          "PARABOLICITY");
}

TEST_CASE("simulation input validation") {
    const Wedge2D w(0.5 * pi);
    const auto id = TimeCoefficients::constant(SpdMatrix2::identity());
    const Point2 y = w.point_at(1.0, 0.7);
    McConfig cfg = base_config(w, 100);
    CHECK(code_of([&] { simulate_killed_density(id, w, 0.0, y, 0.0, cfg); }) == "BAD_TIME");
    cfg.dt = 0.02;
    CHECK(code_of([&] { simulate_killed_density(id, w, 0.0, y, 1.0, cfg); }) == "BAD_DT");
    cfg = base_config(w, 100);
    CHECK(code_of([&] { simulate_killed_density(id, w, 0.0, Point2{-1.0, 0.0}, 1.0, cfg); }) == "OUTSIDE_DOMAIN");
    cfg.binning.radial_edges = {0.5, 0.5, 1.0};
    CHECK(code_of([&] { simulate_killed_density(id, w, 0.0, y, 1.0, cfg); }) == "BAD_GRID");
    cfg = base_config(w, 100);
    cfg.binning.angular_edges = {0.0, 2.0};
    CHECK(code_of([&] { simulate_killed_density(id, w, 0.0, y, 1.0, cfg); }) == "BAD_GRID");
    cfg = base_config(w, 0);
    CHECK(code_of([&] { simulate_killed_density(id, w, 0.0, y, 1.0, cfg); }) == "BAD_PATHS");
}

TEST_CASE("step size and bookkeeping") {
    const Wedge2D w(0.5 * pi);
    const auto id = TimeCoefficients::constant(SpdMatrix2::identity());
    McConfig cfg = base_config(w, 2000);
    cfg.dt = 0.0099;
    const DensityEstimate est = simulate_killed_density(id, w, 0.0, w.point_at(1.0, 0.7), 1.0, cfg);
    CHECK(est.steps == 102);
    CHECK(est.dt == doctest::Approx(1.0 / 102.0));
    CHECK(est.total == 2000);
    CHECK(est.survivors <= est.total);
    CHECK(est.cells.size() == 100);
    std::uint64_t binned = 0;
    for (const auto& c : est.cells) {
        binned += c.count;
        CHECK(c.value == doctest::Approx(c.count / (2000.0 * c.area)));
    }
    CHECK(binned <= est.survivors);
}

TEST_CASE("half-plane: Monte Carlo matches the images kernel") {
    const Wedge2D w(pi);
    const Point2 y{1.0, 0.0};
    const auto est =
        simulate_killed_density(TimeCoefficients::constant(SpdMatrix2::identity()), w, 0.0, y, 1.0, base_config(w, 400000));
    const Agreement a = compare_with_exact(est, w, 1.0, y);
    CHECK(a.tested >= 50);
    CHECK(a.fraction() >= 0.95);
    const double survival = static_cast<double>(est.survivors) / est.total;
    const double se = std::sqrt(survival * (1.0 - survival) / est.total);
    CHECK(std::abs(survival - std::erf(0.5)) <= 3.0 * se);
}

TEST_CASE("quarter plane: Monte Carlo matches the series kernel") {
    const Wedge2D w(0.5 * pi, 0.3);
    const Point2 y = w.point_at(1.0, 0.6);
    const auto est =
        simulate_killed_density(TimeCoefficients::constant(SpdMatrix2::identity()), w, 0.0, y, 1.0, base_config(w, 400000));
    const Agreement a = compare_with_exact(est, w, 1.0, y);
    CHECK(a.tested >= 40);
    CHECK(a.fraction() >= 0.95);
    const double survival = static_cast<double>(est.survivors) / est.total;
    const double se = std::sqrt(survival * (1.0 - survival) / est.total);
    CHECK(std::abs(survival - kernel_mass(w, 1.0, y)) <= 3.0 * se);
}

TEST_CASE("standard error halves with four times the paths") {
    const Wedge2D w(0.5 * pi);
    const Point2 y = w.point_at(1.0, 0.25 * pi);
    const auto id = TimeCoefficients::constant(SpdMatrix2::identity());
    McConfig cfg = base_config(w, 100000);
    const auto small = simulate_killed_density(id, w, 0.0, y, 1.0, cfg);
    cfg.n_paths = 400000;
    const auto big = simulate_killed_density(id, w, 0.0, y, 1.0, cfg);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < small.cells.size(); ++i) {
        if (small.cells[i].count < 200) continue;
        ++checked;
        const double ratio = big.cells[i].std_error / small.cells[i].std_error;
        CHECK(ratio >= 0.4);
        CHECK(ratio <= 0.6);
    }
    CHECK(checked >= 15);
}

TEST_CASE("results do not depend on threads or the SIMD tier") {
    const Wedge2D w(1.5 * pi, 0.2);
    const Point2 y = w.point_at(0.8, 2.0);
    const auto coeffs = TimeCoefficients::sinusoidal({2.0, 0.3, 1.0}, {0.5, 0.0, 0.2}, 2.0);
    McConfig cfg = base_config(w, 30000);
    cfg.dt = 0.005;
    cfg.threads = 1;
    const auto one = simulate_killed_density(coeffs, w, 0.0, y, 0.5, cfg);
    cfg.threads = 3;
    const auto three = simulate_killed_density(coeffs, w, 0.0, y, 0.5, cfg);
    simd::force_level(simd::Level::scalar);
    const auto scalar = simulate_killed_density(coeffs, w, 0.0, y, 0.5, cfg);
    simd::force_level(std::nullopt);
    CHECK(one.survivors == three.survivors);
    CHECK(one.survivors == scalar.survivors);
    for (std::size_t i = 0; i < one.cells.size(); ++i) {
        CHECK(one.cells[i].count == three.cells[i].count);
        CHECK(one.cells[i].count == scalar.cells[i].count);
    }
    cfg.seed += 1;
    const auto other = simulate_killed_density(coeffs, w, 0.0, y, 0.5, cfg);
    CHECK(other.survivors != one.survivors);
}

TEST_CASE("dt refinement is within statistical error") {
    const Wedge2D w(0.5 * pi);
    const Point2 y = w.point_at(1.0, 0.25 * pi);
    const auto coeffs = TimeCoefficients::sinusoidal({2.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, 1.0);
    McConfig cfg = base_config(w, 200000);
    const auto coarse = simulate_killed_density(coeffs, w, 0.0, y, 1.0, cfg);
    cfg.dt = 0.005;
    const auto fine = simulate_killed_density(coeffs, w, 0.0, y, 1.0, cfg);
    std::size_t tested = 0, within = 0;
    for (std::size_t i = 0; i < coarse.cells.size(); ++i) {
        const auto& a = coarse.cells[i];
        const auto& b = fine.cells[i];
        if (a.count < 50 || b.count < 50) continue;
        ++tested;
        if (std::abs(a.value - b.value) < 3.0 * std::hypot(a.std_error, b.std_error)) ++within;
    }
    CHECK(tested >= 40);
    CHECK(within >= tested - tested / 20);
}

TEST_CASE("survival decreases with elapsed time") {
    const Wedge2D w(0.5 * pi);
    const Point2 y = w.point_at(1.0, 0.25 * pi);
    const auto id = TimeCoefficients::constant(SpdMatrix2::identity());
    double prev = 1.0;
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
        McConfig cfg = base_config(w, 50000);
        cfg.dt = 0.0025;
        const auto est = simulate_killed_density(id, w, 0.0, y, t, cfg);
        const double survival = static_cast<double>(est.survivors) / est.total;
        CHECK(survival <= 1.0);
        CHECK(survival < prev);
        prev = survival;
    }
}

TEST_CASE("duality") {
    const Wedge2D w(0.5 * pi);
    McConfig cfg = base_config(w, 300000);
    SUBCASE("constant coefficients, mirrored points") {
        const auto id = TimeCoefficients::constant(SpdMatrix2::identity());
        const PolarCell x_cell = PolarCell::centered_at(1.0, 0.6, 0.3, 0.3);
        const Point2 y = w.point_at(1.0, 0.5 * pi - 0.6);
        const DualityReport r = duality_report(id, w, 0.0, 1.0, x_cell, y, cfg);
        CHECK(std::abs(r.z) <= 3.0);
        CHECK(r.forward_count > 100);
        CHECK(r.reverse_count > 100);
    }
    SUBCASE("time-dependent coefficients") {
        const auto coeffs = TimeCoefficients::sinusoidal({2.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, 1.0);
        const PolarCell x_cell = PolarCell::centered_at(1.2, 0.5, 0.2, 0.2);
        const Point2 y = w.point_at(0.9, 1.0);
        const double z = duality_residual(coeffs, w, 0.3, 1.3, x_cell, y, cfg);
        CHECK(std::abs(z) <= 3.0);
    }
}

TEST_CASE("constant anisotropic coefficients against the transformed kernel") {
    const Wedge2D w(0.5 * pi);
    McConfig cfg = base_config(w, 300000);
    cfg.dt = 0.005;
    const PolarCell x_cell = PolarCell::centered_at(1.0, 0.6, 0.2, 0.2);
    const TransformCheck c = constant_coeff_transform_check(SpdMatrix2(4.0, 0.0, 1.0), w, 0.5, x_cell,
                                                            w.point_at(1.2, 0.9), cfg);
    CHECK(c.count > 100);
    CHECK(std::abs(c.z) <= 3.0);
}
