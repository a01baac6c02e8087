#include <doctest.h>

#include "schroeder/grid.hpp"

using namespace schroeder;

TEST_CASE("pixel centres and lookup") {
    const Grid g(Box::square(2.0), 4);
    CHECK(g.center(0, 0) == Cplx(-1.5, 1.5));
    CHECK(g.center(3, 3) == Cplx(1.5, -1.5));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.locate(g.center(i)).value() == i);
    }
    CHECK(!g.locate(Cplx(3.0, 0.0)).has_value());
    CHECK_THROWS_AS(Grid(Box::square(1.0), 0), PreconditionError);
    CHECK_THROWS_AS(Box::square(-1.0), PreconditionError);
}

TEST_CASE("labelling separates squares and flags the edge") {
    const Grid g(Box::square(1.0), 10);
    std::vector<std::uint8_t> mask(g.size(), 0);
    auto fill = [&](int c0, int c1, int r0, int r1) {
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                mask[g.index(c, r)] = 1;
            }
        }
    };
    fill(0, 2, 0, 2); // touches the edge
    fill(5, 7, 5, 7); // interior
    mask[g.index(4, 4)] = 1; // diagonal neighbour only: separate under 4-connectivity
    const Labeling lab = label_components(g, mask, 4);
    REQUIRE(lab.components.size() == 3);
    CHECK(lab.components[0].pixels == 9);
    CHECK(lab.components[0].touches_boundary);
    CHECK(!lab.components[2].touches_boundary);
    CHECK(lab.components[2].pixels == 9);
    CHECK(lab.label_at(g.center(6, 6)) == lab.labels[g.index(5, 5)]);
    CHECK(lab.pixels_of(0).size() == 9);
    for (const auto& c : lab.components) {
        CHECK(!c.samples.empty());
        for (Cplx s : c.samples) {
            CHECK(lab.label_at(s) == c.id);
        }
    }
}

TEST_CASE("pgm export") {
    const Grid g(Box::square(1.0), 3, 2);
    std::vector<std::uint8_t> mask{1, 0, 1, 1, 0, 0};
    const std::string bytes = pgm_bytes(label_components(g, mask));
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.substr(0, header.size()) == header);
    CHECK(bytes.substr(header.size()) == std::string("\x01\x00\x02\x01\x00\x00", 6));
}

TEST_CASE("root search inside a component") {
    const SphereFunction f = [](Cplx w) { return SpherePoint(w * w - 1.0); };
    const Grid g(Box::square(2.0), 64);
    const auto values = sample(f, g);
    std::vector<std::uint8_t> all(g.size(), 1);
    const Labeling lab = label_components(g, all);
    const auto sols = find_solutions(f, 0.0, lab, 0, values);
    REQUIRE(sols.size() == 2);
    for (const auto& s : sols) {
        CHECK(std::abs(std::abs(s.w.real()) - 1.0) < 1e-9);
        CHECK(std::abs(s.w.imag()) < 1e-9);
    }
}

TEST_CASE("solutions over infinity") {
    const SphereFunction f = [](Cplx w) { return SpherePoint(1.0 / (w - Cplx(0.3, -0.2))); };
    const auto sol = refine_solution(f, SpherePoint::infinity(), Cplx(0.35, -0.1), 0.5);
    REQUIRE(sol.has_value());
    CHECK(std::abs(sol->w - Cplx(0.3, -0.2)) < 1e-8);
}
