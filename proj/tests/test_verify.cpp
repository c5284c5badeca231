#include "conekernel/error.hpp"
#include "conekernel/exponents.hpp"
#include "conekernel/quadrature.hpp"
#include "conekernel/verify.hpp"
#include "conekernel/wedge_kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace conekernel;
using std::numbers::pi;

namespace {

KernelSampler wedge_sampler(const Wedge2D& w) {
    return [w](double tau, Point2 x, Point2 y) { return heat_kernel_wedge(w, tau, x, y); };
}

Point2 random_interior(std::mt19937_64& gen, const Wedge2D& w, double r_max) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    return w.point_at(r_max * (0.001 + 0.999 * u01(gen)), w.kappa() * (0.001 + 0.998 * u01(gen)));
}

// Polar tensor Gauss–Legendre over the wedge up to r_max.
double integrate_over_wedge(const Wedge2D& w, double r_max, auto&& f) {
    std::vector<double> r_breaks, t_breaks;
    for (int i = 0; i <= 64; ++i) r_breaks.push_back(r_max * i / 64.0);
    for (int i = 0; i <= 16; ++i) t_breaks.push_back(w.kappa() * i / 16.0);
    const quad::Rule rr = quad::gauss_legendre_on(r_breaks, 16);
    const quad::Rule tr = quad::gauss_legendre_on(t_breaks, 16);
    std::vector<double> terms;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
        for (std::size_t j = 0; j < tr.nodes.size(); ++j) {
            terms.push_back(rr.weights[i] * tr.weights[j] * rr.nodes[i] * f(w.point_at(rr.nodes[i], tr.nodes[j])));
        }
    }
    return quad::compensated_sum(terms);
}

} // namespace

TEST_CASE("two-weight envelope") {
    const Wedge2D w(pi);
    const BoundSpec spec = BoundSpec::two_weight(0.9, 0.9, 0.125, 2.0);
    CHECK(spec.beta1 == doctest::Approx(-0.1));
    CHECK(spec.beta2 == doctest::Approx(-0.1));
    const Point2 y{2.0, 0.0};
    // Linear vanishing toward the boundary through J.
    const double a = bound_rhs(spec, w, 1.0, {1e-4, 0.5}, y);
    const double b = bound_rhs(spec, w, 1.0, {2e-4, 0.5}, y);
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-3));
    // lambda = 1 leaves only J_x J_y times the Gaussian.
    const BoundSpec unit = BoundSpec::two_weight(1.0, 1.0, 0.2, 1.0);
    const Point2 x{0.3, 0.4};
    const WeightPair wx = weights(0.5, w, x);
    const WeightPair wy = weights(0.5, w, y);
    const double d2 = 1.7 * 1.7 + 0.4 * 0.4;
    CHECK(bound_rhs(unit, w, 0.5, x, y) ==
          doctest::Approx(wx.J * wy.J * std::exp(-0.2 * d2 / 0.5) / 0.5).epsilon(1e-14));
    CHECK_THROWS_AS(BoundSpec::two_weight(1.0, 1.0, 0.0), InputError);
}

TEST_CASE("envelope ordering against the less rough form") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double kappa : {0.5 * pi, pi, 1.5 * pi}) {
        const Wedge2D w(kappa, 0.3);
        for (int i = 0; i < 300; ++i) {
            const double tau = 0.1 + 2.0 * u01(gen);
            const Point2 x = random_interior(gen, w, 3.0);
            const Point2 y = random_interior(gen, w, 3.0);
            const BoundSpec spec = BoundSpec::two_weight(3.0 * u01(gen), 3.0 * u01(gen), 0.05 + 0.3 * u01(gen),
                                                         0.5 + 4.0 * u01(gen));
            const double refined = bound_rhs(spec, w, tau, x, y);
            const double rough = less_rough_rhs(spec, w, tau, x, y);
            CHECK(refined <= rough);
            const WeightPair wx = weights(tau, w, x), wy = weights(tau, w, y);
            if (wx.J == wx.R && wy.J == wy.R) CHECK(refined == rough);
        }
    }
}

TEST_CASE("upper bound check") {
    const Wedge2D w(pi);
    CHECK_THROWS_AS(check_upper_bound({}, BoundSpec{}, w), InputError);
    std::vector<KernelSample> samples;
    for (double x1 : {0.2, 0.5, 1.0, 2.0}) samples.push_back({1.0, {x1, 0.1}, {1.0, 0.0}, 0.0});
    for (auto& s : samples) s.G = heat_kernel_halfplane(s.tau, s.x, s.y);
    const BoundSpec spec = BoundSpec::two_weight(0.9, 0.9, 0.125);
    const BoundCheckReport r = check_upper_bound(samples, spec, w);
    CHECK(r.n_evaluated == samples.size());
    double expect = 0.0;
    for (const auto& s : samples) expect = std::max(expect, s.G / bound_rhs(spec, w, s.tau, s.x, s.y));
    CHECK(r.feasible_N == doctest::Approx(expect).epsilon(1e-15));
    CHECK(r.max_ratio == r.feasible_N);
    CHECK(r.argmax_sample.G == samples[r.argmax].G);
    samples.push_back({1.0, {3.0, 0.0}, {1.0, 0.0}, 1e-300});
    CHECK(check_upper_bound(samples, spec, w).n_excluded == 1);
}

TEST_CASE("linear fit") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(1.5 - 0.75 * x);
    const FitReport f = linear_fit(xs, ys);
    CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.window_min == 0.0);
    CHECK(f.window_max == 5.0);
    CHECK(f.n_points == 6);
    const std::vector<double> four{1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(linear_fit(four, four), InputError);
}

TEST_CASE("Gaussian rate fits") {
    const Wedge2D half(pi);
    const double tau = 0.5;
    const Point2 y{6.0, 0.0};
    std::vector<KernelSample> free_samples, image_samples;
    for (int i = 0; i < 12; ++i) {
        const Point2 x{6.0 + 0.3 * i, 0.2 * i};
        free_samples.push_back({tau, x, y, heat_kernel_free(tau, x, y)});
        image_samples.push_back({tau, x, y, heat_kernel_halfplane(tau, x, y)});
    }
    CHECK(std::abs(fit_gaussian_sigma(free_samples, half).slope + 0.25) < 1e-10);
    const double s = fit_gaussian_sigma(image_samples, half).slope;
    CHECK(s >= -0.26);
    CHECK(s <= -0.24);
}

TEST_CASE("vertex exponents of the exact kernel") {
    for (double kappa : {pi, 0.5 * pi, 1.5 * pi}) {
        const Wedge2D w(kappa, 0.4);
        const FitReport f = fit_vertex_exponent(wedge_sampler(w), w, 1.0, w.point_at(5.0, 0.5 * kappa));
        CHECK(std::abs(f.slope - pi / kappa) <= 0.05 * pi / kappa);
        CHECK(f.r_squared >= 0.99);
        CHECK(f.n_points >= 12);
    }
    const Wedge2D w(0.5 * pi);
    CHECK_THROWS_AS(fit_vertex_exponent(wedge_sampler(w), w, 1.0, w.point_at(2.0, 0.7)), InputError);
}

TEST_CASE("boundary exponents of the exact kernel") {
    for (double kappa : {pi, 0.5 * pi, 1.5 * pi}) {
        const Wedge2D w(kappa);
        const FitReport f = fit_boundary_exponent(wedge_sampler(w), w, 1.0, w.point_at(5.0, 0.5 * kappa), 5.0);
        CHECK(std::abs(f.slope - 1.0) <= 0.05);
        CHECK(f.r_squared >= 0.99);
        if (kappa != pi) CHECK(std::abs(f.slope - pi / kappa) > 0.2);
    }
}

TEST_CASE("transformed kernel") {
    SUBCASE("identity reduces to the wedge kernel") {
        const Wedge2D w(1.2, 0.5);
        std::mt19937_64 gen(12);
        for (int i = 0; i < 30; ++i) {
            const Point2 x = random_interior(gen, w, 2.0);
            const Point2 y = random_interior(gen, w, 2.0);
            const double ref = heat_kernel_wedge(w, 0.7, x, y);
            CHECK(std::abs(transformed_kernel(SpdMatrix2::identity(), w, 0.7, x, y) - ref) <= 1e-12 * ref);
        }
    }
    SUBCASE("image wedge opening") {
        const SpdMatrix2 a(4.0, 0.0, 1.0);
        const Wedge2D w(0.5 * pi);
        const TransformedWedge tw = transform_wedge(a, w);
        CHECK(tw.image.kappa() == doctest::Approx(kappa_tilde_closed_form(a, 0.5 * pi, 0.0)).epsilon(1e-13));
        CHECK(tw.jacobian == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(contains(tw.image, tw.map(w.point_at(1.0, 0.01))));
        CHECK(contains(tw.image, tw.map(w.point_at(1.0, 0.5 * pi - 0.01))));
    }
    SUBCASE("mass is preserved") {
        const SpdMatrix2 a(2.0, 0.7, 1.0);
        const Wedge2D w(2.0, 0.3);
        const double tau = 0.3;
        const Point2 y = w.point_at(1.0, 1.1);
        const double mass = integrate_over_wedge(w, 1.0 + 12.0 * std::sqrt(2.5 * tau), [&](Point2 x) {
            return transformed_kernel(a, w, tau, x, y);
        });
        const TransformedWedge tw = transform_wedge(a, w);
        CHECK(std::abs(mass - kernel_mass(tw.image, tau, tw.map(y))) <= 1e-6);
    }
    SUBCASE("vertex exponent follows the image opening") {
        const SpdMatrix2 a(4.0, 0.0, 1.0);
        const Wedge2D w(0.5 * pi);
        const KernelSampler sampler = [&](double tau, Point2 x, Point2 y) { return transformed_kernel(a, w, tau, x, y); };
        const double expected = lambda_c_constant(a, 0.5 * pi, 0.0).value;
        const FitReport f = fit_vertex_exponent(sampler, w, 1.0, w.point_at(6.0, 0.25 * pi));
        CHECK(std::abs(f.slope - expected) <= 0.05 * expected);
        const FitReport b = fit_boundary_exponent(sampler, w, 1.0, w.point_at(6.0, 0.25 * pi), 6.0);
        CHECK(std::abs(b.slope - 1.0) <= 0.05);
    }
}

TEST_CASE("refinement: subcritical stable, supercritical growing") {
    for (double kappa : {0.5 * pi, pi, 1.5 * pi}) {
        const Wedge2D w(kappa);
        const double lc = pi / kappa;
        const auto sub = refinement_study(wedge_sampler(w), w, 1.0, BoundSpec::two_weight(0.9 * lc, 0.9 * lc, 0.125),
                                          lc, 3);
        REQUIRE(sub.size() == 3);
        for (std::size_t i = 1; i < sub.size(); ++i) {
            CHECK(std::isfinite(sub[i].report.feasible_N));
            CHECK(sub[i].report.feasible_N < 2.0 * sub[i - 1].report.feasible_N);
        }
        const auto super = refinement_study(wedge_sampler(w), w, 1.0,
                                            BoundSpec::two_weight(1.2 * lc, 0.9 * lc, 0.125), lc, 4);
        for (std::size_t i = 1; i < super.size(); ++i) {
            CHECK(super[i].report.feasible_N >= 2.0 * super[i - 1].report.feasible_N);
        }
    }
}
