#include <doctest.h>

#include <algorithm>

#include "schroeder/dynamics.hpp"

using namespace schroeder;

namespace {

bool has_point(const std::vector<PeriodicPoint>& pts, const SpherePoint& z, double tol = 1e-9) {
    return std::any_of(pts.begin(), pts.end(), [&](const PeriodicPoint& p) { return chordal_distance(p.z, z) < tol; });
}

} // namespace

TEST_CASE("map construction and evaluation") {
    const RationalMap f = RationalMap::quadratic({-1.0, 0.0});
    CHECK(f.degree() == 2);
    CHECK(f.is_polynomial());
    CHECK(f(0.0).value() == Cplx(-1.0, 0.0));
    CHECK(f(SpherePoint::infinity()).is_infinity());
    CHECK(evaluate(f, 0.0, 2).value() == Cplx(0.0, 0.0));
    CHECK_THROWS_AS(RationalMap(Coeffs{1.0, 1.0}), PreconditionError);             // degree 1
    CHECK_THROWS_AS(RationalMap(Coeffs{-1.0, 0.0, 1.0}, Coeffs{-1.0, 1.0}), PreconditionError); // common root 1
}

TEST_CASE("rational map poles and both charts agree") {
    // (z^2 + 1) / (z^2 - 4)
    const RationalMap f(Coeffs{1.0, 0.0, 1.0}, Coeffs{-4.0, 0.0, 1.0});
    CHECK(f(2.0).is_infinity());
    CHECK(std::abs(f(SpherePoint::infinity()).value() - 1.0) < 1e-15);
    for (Cplx z : {Cplx(0.3, 0.2), Cplx(5, -1), Cplx(1.9, 0.01)}) {
        const Cplx want = (z * z + 1.0) / (z * z - 4.0);
        CHECK(chordal_distance(f(z), want) < 1e-14);
        CHECK(chordal_distance(f.apply_in_chart(z, Chart::Zero), f.apply_in_chart(z, Chart::Infinity)) < 1e-13);
        const double h = 1e-6;
        const Cplx fd = (f(z + h).value() - f(z - h).value()) / (2 * h);
        CHECK(std::abs(f.derivative(z) - fd) < 1e-6 * (1 + std::abs(fd)));
    }
    const RationalMap g = RationalMap::from_json(f.to_json());
    CHECK(chordal_distance(g(0.7), f(0.7)) < 1e-15);
}

TEST_CASE("classification thresholds") {
    CHECK(classify({0.0, 0.0}) == PeriodicClass::Superattracting);
    CHECK(classify({0.5, 0.0}) == PeriodicClass::Attracting);
    CHECK(classify(std::polar(1.0, 2 * M_PI / 5)) == PeriodicClass::Parabolic);
    CHECK(classify(std::polar(1.0, 2 * M_PI * 0.6180339887498949)) == PeriodicClass::IndifferentUndetermined);
    CHECK(classify({2.0, 0.0}) == PeriodicClass::Repelling);
}

TEST_CASE("critical points carry multiplicity 2d - 2") {
    const auto cp = critical_points(RationalMap::quadratic({0.3, 0.0}));
    int total = 0;
    for (const auto& c : cp) {
        total += c.multiplicity;
    }
    CHECK(total == 2);
    const RationalMap f(Coeffs{0.0, 0.0, 0.0, 1.0}, Coeffs{1.0, 0.0, 2.0});
    int t3 = 0;
    for (const auto& c : critical_points(f)) {
        t3 += c.multiplicity;
    }
    CHECK(t3 == 4);
}

TEST_CASE("fixed points and multipliers of z^2 + c from the quadratic formula") {
    const Cplx c(-0.75, 0.2);
    const auto pts = periodic_points(RationalMap::quadratic(c), 1);
    const Cplx disc = std::sqrt(1.0 - 4.0 * c);
    for (Cplx z : {(1.0 + disc) / 2.0, (1.0 - disc) / 2.0}) {
        REQUIRE(has_point(pts, z));
        const auto& p = *std::find_if(pts.begin(), pts.end(), [&](auto& q) { return chordal_distance(q.z, z) < 1e-9; });
        CHECK(std::abs(p.multiplier - 2.0 * z) < 1e-9);
    }
    CHECK(has_point(pts, SpherePoint::infinity()));
}

TEST_CASE("period-2 cycle of z^2 + c solves z^2 + z + c + 1 = 0") {
    const Cplx c(0.1, 0.4);
    const auto pts = periodic_points(RationalMap::quadratic(c), 2);
    REQUIRE(pts.size() == 2);
    const Cplx disc = std::sqrt(1.0 - 4.0 * (c + 1.0));
    CHECK(has_point(pts, (-1.0 + disc) / 2.0));
    CHECK(has_point(pts, (-1.0 - disc) / 2.0));
    // multiplier 4 z1 z2 = 4 (c + 1)
    CHECK(std::abs(pts[0].multiplier - 4.0 * (c + 1.0)) < 1e-9);
    CHECK(pts[0].cycle == pts[1].cycle);
}

TEST_CASE("periodic point budget") {
    CHECK_THROWS_AS(periodic_points(RationalMap::quadratic(0.0), 13), BudgetError);
}

TEST_CASE("basilica has a superattracting 2-cycle") {
    const auto pts = periodic_points(RationalMap::quadratic(-1.0), 2);
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) {
        CHECK(p.kind == PeriodicClass::Superattracting);
    }
}

TEST_CASE("exceptional points of polynomials and z^-2") {
    CHECK(exceptional_set(RationalMap::quadratic(0.0)).contains(SpherePoint::infinity()));
    CHECK(exceptional_set(RationalMap::quadratic(0.0)).contains(0.0));
    CHECK(exceptional_set(RationalMap::quadratic(0.0)).points.size() == 2);
    CHECK(exceptional_set(RationalMap::quadratic(-1.0)).points.size() == 1);
    const RationalMap inv(Coeffs{1.0}, Coeffs{0.0, 0.0, 1.0});
    CHECK(exceptional_set(inv).points.size() == 2);
}

TEST_CASE("nearest periodic point polishes a rough guess") {
    const auto p = nearest_periodic_point(RationalMap::quadratic(0.0), Cplx(1.05, 0.02), 1);
    CHECK(std::abs(p.z.value() - 1.0) < 1e-14);
    CHECK(p.kind == PeriodicClass::Repelling);
}
