#include "conekernel/error.hpp"
#include "conekernel/wedge_kernel.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace conekernel;
using std::numbers::pi;

namespace {

constexpr double kHalfplaneRef = 0.050302555783788087539;  // (1 - e^-1) / (4 pi), mpmath
constexpr double kErfHalf = 0.52049987781304653768;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Point2 random_interior(std::mt19937_64& gen, const Wedge2D& w, double r_max) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double r = r_max * (0.02 + 0.98 * u01(gen));
    const double theta = w.kappa() * (0.01 + 0.98 * u01(gen));
    return w.point_at(r, theta);
}

} // namespace

TEST_CASE("free kernel") {
    const std::array<double, 2> x{0.3, -0.2};
    CHECK(heat_kernel_free(2, 1.0, x, x) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-15));
    const std::array<double, 2> y{2.3, -0.2};
    CHECK(heat_kernel_free(2, 1.0, x, y) == doctest::Approx(std::exp(-1.0) / (4.0 * pi)).epsilon(1e-15));
    const std::array<double, 3> z{1.0, 2.0, 3.0};
    CHECK(heat_kernel_free(3, 1.0 / (4.0 * pi), z, z) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(heat_kernel_free(1.0, Point2{0.3, -0.2}, Point2{2.3, -0.2}) == heat_kernel_free(2, 1.0, x, y));
}

TEST_CASE("half-plane kernel") {
    CHECK(heat_kernel_halfplane(1.0, {1.0, 0.0}, {1.0, 0.0}) == doctest::Approx(kHalfplaneRef).epsilon(1e-15));
    CHECK(heat_kernel_halfplane(1.0, {0.0, 0.4}, {1.0, 0.0}) == 0.0);
    const double tau = 1e-6;
    CHECK(heat_kernel_halfplane(tau, {1.0, 0.0}, {1.0, 0.0}) * 4.0 * pi * tau == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(heat_kernel_halfplane(1.0, {-0.1, 0.0}, {1.0, 0.0}), InputError);
}

TEST_CASE("wedge series equals images for the half-plane") {
    CHECK(rel(heat_kernel_wedge(pi, 1.0, {1.0, 0.0}, {1.0, 0.0}), kHalfplaneRef) < 1e-8);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Wedge2D w(pi);
    for (int i = 0; i < 150; ++i) {
        const double tau = std::exp(std::log(1e-2) + std::log(1e4) * u01(gen));
        const Point2 x = random_interior(gen, w, 4.0 * std::sqrt(tau));
        const Point2 y = random_interior(gen, w, 4.0 * std::sqrt(tau));
        const double images = heat_kernel_halfplane(tau, x, y);
        if (images < 1e-300) continue;
        CHECK(rel(heat_kernel_wedge(w, tau, x, y), images) < 1e-8);
    }
}

TEST_CASE("wedge kernel symmetry and positivity") {
    std::mt19937_64 gen(8);
    for (double kappa : {0.7, 0.5 * pi, 2.5, 1.5 * pi, 5.9}) {
        const Wedge2D w(kappa, 0.4);
        for (int i = 0; i < 40; ++i) {
            const Point2 x = random_interior(gen, w, 3.0);
            const Point2 y = random_interior(gen, w, 3.0);
            const double gxy = heat_kernel_wedge(w, 0.8, x, y);
            const double gyx = heat_kernel_wedge(w, 0.8, y, x);
            CHECK(gxy > 0.0);
            CHECK(rel(gxy, gyx) < 1e-9);
        }
    }
}

TEST_CASE("wedge kernel vanishes on the boundary") {
    for (double kappa : {0.5 * pi, pi, 1.5 * pi}) {
        const Wedge2D w(kappa);
        const Point2 y = w.point_at(1.0, 0.5 * kappa);
        const double interior = heat_kernel_wedge(w, 1.0, w.point_at(1.0, 0.5 * kappa), y);
        // Linear vanishing: G(theta) ~ c theta with c of order interior / kappa.
        const double g1 = heat_kernel_wedge(w, 1.0, w.point_at(1.0, 1e-6), y);
        const double g2 = heat_kernel_wedge(w, 1.0, w.point_at(1.0, 2e-6), y);
        CHECK(g1 <= 1e-5 * interior);
        CHECK(std::abs(g2 / g1 - 2.0) < 1e-6);
        CHECK(heat_kernel_wedge(w, 1.0, w.point_at(1.0, 1e-10), y) <= 1e-8 * interior);
        CHECK(heat_kernel_wedge(w, 1.0, w.point_at(1.0, kappa - 1e-6), y) <= 1e-5 * interior);
        CHECK(heat_kernel_wedge_polar(kappa, 1.0, 1.0, 0.0, 1.0, 0.5 * kappa) == 0.0);
        CHECK(heat_kernel_wedge_polar(kappa, 1.0, 0.0, 0.5, 1.0, 0.5 * kappa) == 0.0);
    }
    CHECK_THROWS_AS(heat_kernel_wedge(0.5 * pi, 1.0, {-1.0, 0.0}, {1.0, 0.0}), InputError);
}

TEST_CASE("Gaussian domination") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double kappa : {0.5 * pi, pi, 1.5 * pi}) {
        const Wedge2D w(kappa);
        for (int i = 0; i < 60; ++i) {
            const double tau = std::exp(std::log(0.05) + std::log(100.0) * u01(gen));
            const Point2 x = random_interior(gen, w, 5.0 * std::sqrt(tau));
            const Point2 y = random_interior(gen, w, 5.0 * std::sqrt(tau));
            const double d = norm(x - y);
            CHECK(heat_kernel_wedge(w, tau, x, y) <= 10.0 / tau * std::exp(-0.2 * d * d / tau));
        }
    }
}

TEST_CASE("series control") {
    const Wedge2D w(0.5 * pi);
    const Point2 x = w.point_at(3.0, 0.7);
    const Point2 y = w.point_at(3.2, 0.9);
    SeriesControl tight;
    tight.max_terms = 2;
    CHECK_THROWS_AS(heat_kernel_wedge(w, 0.01, x, y, tight), SeriesTruncationError);
    try {
        heat_kernel_wedge(w, 0.01, x, y, tight);
    } catch (const SeriesTruncationError& e) {
        CHECK(e.partial_sum() > 0.0);
        CHECK(e.last_term() > 0.0);
        CHECK(std::string(e.code()) == "SERIES_TRUNCATION");
    }
    const double loose = heat_kernel_wedge(w, 0.01, x, y, SeriesControl{1e-6, 100000});
    const double strict = heat_kernel_wedge(w, 0.01, x, y, SeriesControl{1e-13, 100000});
    CHECK(rel(loose, strict) < 1e-5);
}

TEST_CASE("slice evaluation matches pointwise evaluation") {
    for (double kappa : {0.5 * pi, 1.5 * pi}) {
        const Wedge2D w(kappa, 1.0);
        const Point2 src = w.point_at(1.3, 0.4 * kappa);
        std::vector<double> thetas;
        for (int j = 1; j < 12; ++j) thetas.push_back(kappa * j / 12.0);
        const WedgeKernelSlice slice(w, 0.6, src, thetas);
        std::vector<double> out(thetas.size());
        for (double r : {0.05, 0.7, 1.3, 2.9}) {
            slice.evaluate(r, out);
            for (std::size_t j = 0; j < thetas.size(); ++j) {
                const double ref = heat_kernel_wedge(w, 0.6, w.point_at(r, thetas[j]), src);
                CHECK(std::abs(out[j] - ref) <= 1e-9 * ref + 1e-300);
            }
        }
    }
}

TEST_CASE("kernel mass") {
    const double tau = 1.0;
    const double m = kernel_mass(pi, tau, {1.0, 0.0});
    CHECK(std::abs(m - kErfHalf) < 1e-8);
    CHECK(kernel_mass(pi, 0.01, {0.6, 0.3}) >= 0.999);
    for (double kappa : {0.5 * pi, pi, 1.5 * pi}) {
        const Wedge2D w(kappa, 0.2);
        for (double r : {0.2, 1.0, 3.0}) {
            const double mass = kernel_mass(w, 0.5, w.point_at(r, 0.3 * kappa));
            CHECK(mass >= 0.0);
            CHECK(mass <= 1.0 + 1e-6);
        }
    }
    // Survival decreases with time.
    const Wedge2D w(0.5 * pi);
    const Point2 y = w.point_at(1.0, 0.25 * pi);
    double prev = 1.0;
    for (double t : {0.05, 0.2, 0.8, 3.2}) {
        const double mass = kernel_mass(w, t, y);
        CHECK(mass < prev);
        prev = mass;
    }
}

TEST_CASE("Chapman-Kolmogorov") {
    for (double kappa : {0.5 * pi, 1.5 * pi}) {
        const Wedge2D w(kappa);
        const Point2 x = w.point_at(0.9, 0.3 * kappa);
        const Point2 y = w.point_at(1.4, 0.6 * kappa);
        const double lhs = chapman_kolmogorov(w, 0.3, 0.5, x, y);
        CHECK(rel(lhs, heat_kernel_wedge(w, 0.8, x, y)) < 1e-4);
    }
}

TEST_CASE("cell average approaches the point value") {
    const Wedge2D w(0.5 * pi);
    const Point2 y = w.point_at(1.0, 0.3);
    const PolarCell cell = PolarCell::centered_at(1.2, 0.8, 1e-3, 1e-3);
    const double avg = cell_average(w, 0.4, y, cell);
    const double point = heat_kernel_wedge(w, 0.4, w.point_at(cell.centroid_radius(), cell.centroid_angle()), y);
    CHECK(rel(avg, point) < 1e-5);
}
