#include <doctest.h>

#include <cmath>
#include <random>

#include "schroeder/series.hpp"

using namespace schroeder;

namespace {

SchroederSeries exp_map() {
    const RationalMap f = RationalMap::quadratic(0.0);
    return build_schroeder_series(f, nearest_periodic_point(f, 1.0, 1));
}

double factorial(int n) { return std::tgamma(n + 1.0); }

} // namespace

TEST_CASE("z^2 at 1 gives the exponential series") {
    const SchroederSeries s = exp_map();
    CHECK(s.lambda() == Cplx(2.0, 0.0));
    for (int n = 0; n <= 30; ++n) {
        CHECK(std::abs(s.coefficients()[static_cast<std::size_t>(n)] - 1.0 / factorial(n)) < 1e-15);
    }
    CHECK(std::abs(evaluate_h(s, std::log(4.0)).value() - 4.0) < 1e-12);
    for (Cplx w : {Cplx(3.0, 1.0), Cplx(-7.5, 20.0), Cplx(12.0, -0.3)}) {
        const Cplx h = evaluate_h(s, w).value();
        CHECK(std::abs(h - std::exp(w)) < 1e-10 * std::abs(std::exp(w)));
        CHECK(std::abs(h_derivative(s, w) - std::exp(w)) < 1e-9 * std::abs(std::exp(w)));
    }
}

TEST_CASE("quadratic coefficients match the direct convolution recursion") {
    // h(lambda w) = h(w)^2 + c  =>  a_n (lambda^n - lambda) = sum_{i=1}^{n-1} a_i a_{n-i}
    const Cplx c(-0.4, 0.6);
    const RationalMap f = RationalMap::quadratic(c);
    const Cplx z0 = (1.0 + std::sqrt(1.0 - 4.0 * c)) / 2.0;
    const SchroederSeries s = schroeder_coefficients(f, nearest_periodic_point(f, z0, 1), 40);
    const Cplx lam = 2.0 * z0;
    std::vector<Cplx> a{z0, 1.0};
    for (int n = 2; n <= 40; ++n) {
        Cplx sum = 0.0;
        for (int i = 1; i < n; ++i) {
            sum += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(n - i)];
        }
        a.push_back(sum / (std::pow(lam, n) - lam));
    }
    for (int n = 0; n <= 40; ++n) {
        const Cplx got = s.coefficients()[static_cast<std::size_t>(n)];
        CHECK(std::abs(got - a[static_cast<std::size_t>(n)]) < 1e-12 * (1.0 + std::abs(a[static_cast<std::size_t>(n)])));
    }
}

TEST_CASE("2 cosh sqrt(w) from z^2 - 2 at 2") {
    const RationalMap f = RationalMap::quadratic(-2.0);
    const SchroederSeries s = build_schroeder_series(f, nearest_periodic_point(f, 2.0, 1));
    for (int n = 1; n <= 15; ++n) {
        CHECK(std::abs(s.coefficients()[static_cast<std::size_t>(n)] - 2.0 / factorial(2 * n)) < 1e-15);
    }
    CHECK(std::abs(evaluate_h(s, 1.0).value() - 2.0 * std::cosh(1.0)) < 1e-12);
    const auto crit = critical_points_of_h(s, Box{-100.0, 5.0, -5.0, 5.0}, 128);
    // sinh(sqrt w) / sqrt w vanishes at w = -(k pi)^2
    REQUIRE(crit.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(crit[k].w + std::pow((k + 1) * M_PI, 2)) < 1e-8 * std::pow((k + 1) * M_PI, 2));
    }
}

TEST_CASE("normalisation and pullback consistency") {
    const RationalMap f(Coeffs{0.1, 0.0, -0.3, 1.0});
    const PeriodicPoint pt = [&] {
        for (const auto& p : periodic_points(f, 1)) {
            if (p.kind == PeriodicClass::Repelling && p.z.is_finite()) {
                return p;
            }
        }
        throw Error("no repelling point");
    }();
    const SchroederSeries s = build_schroeder_series(f, pt);
    CHECK(chordal_distance(evaluate_h(s, 0.0), pt.z) < 1e-15);
    CHECK(std::abs(s.coefficients()[1] - 1.0) < 1e-15);
    CHECK(std::abs(h_derivative(s, 0.0) - 1.0) < 1e-12);
    CHECK(circle_residual(s, s.safe_radius()) <= kSeriesResidualTolerance);
    const Cplx w(0.7 * s.safe_radius(), 0.2 * s.safe_radius());
    for (int k = 0; k < 4; ++k) {
        CHECK(chordal_distance(evaluate_h_at_depth(s, w, k), evaluate_h_at_depth(s, w, k + 1)) < 1e-12);
    }
    CHECK(pullback_depth(s, 0.5 * s.safe_radius()) == 0);
    CHECK(pullback_depth(s, 3.0 * s.safe_radius() * std::abs(s.lambda())) >= 2);
}

TEST_CASE("functional equation at random points of a cubic") {
    const RationalMap f(Coeffs{Cplx(0.2, -0.1), Cplx(0.5, 0.3), Cplx(-0.4, 0.0), Cplx(1.0, 0.0)});
    for (const auto& pt : periodic_points(f, 1)) {
        if (pt.kind != PeriodicClass::Repelling || pt.z.is_infinity()) {
            continue;
        }
        const SchroederSeries s = build_schroeder_series(f, pt);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const Cplx w = 5.0 * s.safe_radius() * Cplx(u(rng), u(rng));
            // evaluate f by hand so the check does not share code with the map class
            const SpherePoint h = evaluate_h(s, w);
            const Cplx z = h.value();
            const Cplx fz = Cplx(0.2, -0.1) + z * (Cplx(0.5, 0.3) + z * (-0.4 + z));
            CHECK(chordal_distance(fz, evaluate_h(s, s.lambda() * w)) < 1e-9);
        }
    }
}

TEST_CASE("log modulus continues past overflow") {
    const SchroederSeries s = exp_map();
    CHECK(log_abs_h(s, Cplx(1e6, 0.0)) == doctest::Approx(1e6).epsilon(1e-9));
    CHECK(log_abs_h(s, Cplx(800.0, 3.0)) == doctest::Approx(800.0).epsilon(1e-9));
    CHECK(log_abs_h(s, Cplx(-30.0, 1.0)) == doctest::Approx(-30.0).epsilon(1e-9));
}

TEST_CASE("preconditions") {
    const RationalMap f = RationalMap::quadratic(0.0);
    CHECK_THROWS_AS(schroeder_coefficients(f, nearest_periodic_point(f, 0.0, 1)), PreconditionError);
    const SchroederSeries s = schroeder_coefficients(f, nearest_periodic_point(f, 1.0, 1), 4);
    CHECK_THROWS_AS(estimate_safe_radius(s), PreconditionError);
}

TEST_CASE("json report") {
    const auto j = series_to_json(exp_map());
    CHECK(j["z0"][0] == 1.0);
    CHECK(j["lambda"][0] == 2.0);
    CHECK(j["p"] == 1);
    CHECK(j["coeffs"].size() == kDefaultSeriesOrder + 1);
    CHECK(j["r_safe"].get<double>() > 1.0);
}
