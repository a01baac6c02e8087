#include <doctest.h>

#include <cmath>

#include "schroeder/sphere.hpp"

using namespace schroeder;

TEST_CASE("non-finite input collapses to infinity") {
    CHECK(SpherePoint(Cplx(INFINITY, 0.0)).is_infinity());
    CHECK(SpherePoint(Cplx(NAN, 1.0)).is_infinity());
    CHECK(SpherePoint(2.0).is_finite());
    CHECK_THROWS_AS((void)SpherePoint::infinity().value(), Error);
}

TEST_CASE("chordal distance matches the stereographic embedding") {
    // independent check: embed on the unit sphere, halve the euclidean chord
    auto embed = [](Cplx z) {
        const double n = std::norm(z);
        return std::array<double, 3>{2 * z.real() / (1 + n), 2 * z.imag() / (1 + n), (n - 1) / (1 + n)};
    };
    const Cplx pts[] = {{0, 0}, {1, 0}, {0.3, -2.0}, {-5, 7}, {1e-3, 1e-3}};
    for (Cplx a : pts) {
        for (Cplx b : pts) {
            const auto x = embed(a);
            const auto y = embed(b);
            const double chord = std::sqrt(std::pow(x[0] - y[0], 2) + std::pow(x[1] - y[1], 2) + std::pow(x[2] - y[2], 2));
            CHECK(chordal_distance(a, b) == doctest::Approx(chord / 2).epsilon(1e-12));
        }
        const auto x = embed(a);
        const double to_north = std::sqrt(x[0] * x[0] + x[1] * x[1] + (x[2] - 1) * (x[2] - 1));
        CHECK(chordal_distance(a, SpherePoint::infinity()) == doctest::Approx(to_north / 2).epsilon(1e-12));
    }
    CHECK(chordal_distance(SpherePoint::infinity(), SpherePoint::infinity()) == 0.0);
    CHECK(chordal_distance(0.0, SpherePoint::infinity()) == doctest::Approx(1.0));
}

TEST_CASE("charts round-trip and pick the smaller coordinate") {
    for (Cplx z : {Cplx(0.2, 0.1), Cplx(3, -4), Cplx(-0.5, 0.5)}) {
        for (Chart c : {Chart::Zero, Chart::Infinity}) {
            const SpherePoint back = from_chart(chart_coordinate(z, c), c);
            CHECK(std::abs(back.value() - z) < 1e-14 * (1 + std::abs(z)));
        }
        CHECK(std::abs(chart_coordinate(z, natural_chart(z))) <= 1.0);
    }
    CHECK(natural_chart(SpherePoint::infinity()) == Chart::Infinity);
    CHECK(chart_coordinate(SpherePoint::infinity(), Chart::Infinity) == Cplx(0, 0));
    CHECK(from_chart(0.0, Chart::Infinity).is_infinity());
}
