#include <doctest.h>

#include <cmath>

#include "schroeder/basin.hpp"

using namespace schroeder;

namespace {

SchroederSeries series_at(Cplx c, Cplx z0) {
    const RationalMap f = RationalMap::quadratic(c);
    return build_schroeder_series(f, nearest_periodic_point(f, z0, 1));
}

} // namespace

TEST_CASE("arc extension satisfies the translation identity exactly") {
    const Cplx ln = std::polar(3.0, 0.4);
    std::vector<Cplx> base;
    for (int i = 0; i <= 16; ++i) {
        const double t = i / 16.0;
        base.push_back(Cplx(1.0, 0.2) * std::pow(ln, t));
    }
    base.back() = ln * base.front();
    const ArcTrace arc = extend_arc(base, ln, 1, 50.0);
    const std::size_t m = arc.period_samples;
    REQUIRE(arc.points.size() > 3 * m);
    for (std::size_t i = 0; i + m < arc.points.size(); ++i) {
        CHECK(arc.points[i + m] == ln * arc.points[i]);
        CHECK(arc.t[i + m] == doctest::Approx(arc.t[i] + 1.0));
    }
    CHECK(std::log(std::abs(arc.points.back())) > 50.0);
}

TEST_CASE("spiral term of exp((1 + i) t) tends to 1") {
    const Cplx ln = std::exp(Cplx(1.0, 1.0));
    std::vector<Cplx> base;
    for (int i = 0; i <= 64; ++i) {
        base.push_back(std::exp(Cplx(1.0, 1.0) * (i / 64.0)));
    }
    base.back() = ln * base.front();
    const ArcTrace arc = extend_arc(base, ln, 1, 230.0);
    CHECK(spiral_term(arc) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("short arcs are rejected") {
    const std::vector<Cplx> base{1.0, 2.0};
    ArcTrace arc = extend_arc(base, 2.0, 1, 3.0);
    CHECK_THROWS_AS(spiral_term(arc), Error);
}

TEST_CASE("closed-form spiral ratio and branch choice") {
    CHECK(spiral_closed_form(1, 0, 2.0) == 0.0);
    CHECK(std::abs(spiral_closed_form(4, 1, Cplx(0.0, 2.0))) < 1e-15);
    // arg lambda near 2 pi: the branch 2 pi - 0.1 is closer to 2 pi * 1 / 1
    CHECK(closest_arg_branch(std::polar(2.0, -0.1), 1, 1) == doctest::Approx(2 * M_PI - 0.1));
    const double v = spiral_closed_form(3, 1, std::polar(5.0, 2.0));
    CHECK(v == doctest::Approx((3 * 2.0 - 2 * M_PI) / (3 * std::log(5.0))));
}

TEST_CASE("inequality bookkeeping") {
    const PlyReport a = ply_check(1, 0, 1, 2.0, 2);
    CHECK(a.lhs == doctest::Approx(1.0));
    CHECK(a.rhs == doctest::Approx(2.0));
    CHECK(a.slack == doctest::Approx(1.0));
    CHECK(!a.violation);
    const PlyReport b = ply_check(1, 1, 4, Cplx(0.0, 2.0), 2);
    CHECK(b.lhs == doctest::Approx(1.0));
    const PlyReport c = ply_check(3, 0, 1, 2.0, 2);
    CHECK(c.violation);
    CHECK_THROWS_AS(ply_check(0, 0, 1, 2.0, 2), PreconditionError);
    CHECK_THROWS_AS(ply_check(1, 0, 1, 0.5, 2), PreconditionError);
}

TEST_CASE("basin of infinity for z^2 at 1") {
    BasinOptions o;
    o.grid = 256;
    const BasinReport r = basin_components_of_infinity(series_at(0.0, 1.0), o);
    CHECK(r.q_inf == 1);
    CHECK(r.p == 0);
    CHECK(r.q == 1);
    CHECK(r.ply.lhs == doctest::Approx(1.0));
    CHECK(r.ply.rhs == doctest::Approx(2.0));
    CHECK(r.el_condition);
    CHECK(r.accepted());
    CHECK(r.spiral < 0.01);
    const auto j = ply_json(r.ply, r.accepted());
    CHECK(j["q_inf"] == 1);
    CHECK(j["accepted"] == true);
}

TEST_CASE("two components rotated by a half turn for z^2 - 2 at -1") {
    BasinOptions o;
    o.grid = 256;
    const BasinReport r = basin_components_of_infinity(series_at(-2.0, -1.0), o);
    CHECK(r.q_inf == 2);
    CHECK(r.p == 1);
    CHECK(r.q == 2);
    CHECK(r.ply.lhs == doctest::Approx(2.0));
    CHECK(r.ply.rhs == doctest::Approx(2.0));
    CHECK(!r.ply.violation);
    CHECK(r.accepted());
}

TEST_CASE("julia proximity reaching the edge") {
    const Grid g(Box::square(1.0), 9);
    std::vector<std::uint8_t> cls(g.size(), 2);
    CHECK(!el_heuristic(g, cls));
    cls[g.index(4, 4)] = 1;
    CHECK(!el_heuristic(g, cls));
    for (int c = 0; c <= 4; ++c) {
        cls[g.index(c, 4)] = 1;
    }
    CHECK(el_heuristic(g, cls));
}

TEST_CASE("cantor julia set fails the proximity test") {
    BasinOptions o;
    o.grid = 256;
    const BasinReport r = basin_components_of_infinity(series_at(0.26, 0.5), o);
    CHECK(!r.el_condition);
    CHECK(!r.accepted());
}
