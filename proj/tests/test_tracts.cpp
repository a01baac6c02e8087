#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "schroeder/series.hpp"
#include "schroeder/tracts.hpp"

using namespace schroeder;

namespace {

// closed form, independent of the series engine
const SphereFunction kExp = [](Cplx w) { return SpherePoint(std::exp(w)); };

TractOptions small_options() {
    TractOptions t;
    t.grid = 128;
    return t;
}

} // namespace

TEST_CASE("preimage mask") {
    const std::vector<SpherePoint> v{0.0, 0.1, 1.0, SpherePoint::infinity()};
    const auto m = preimage_mask(v, 0.0, 0.2);
    CHECK(m == std::vector<std::uint8_t>{1, 1, 0, 0});
}

TEST_CASE("exp has one direct tract over 0 and one over infinity") {
    for (SpherePoint a : {SpherePoint(0.0), SpherePoint::infinity()}) {
        const TractFamily fam = compute_tract_family(kExp, a, small_options());
        CHECK(fam.stable);
        REQUIRE(fam.chains.size() == 1);
        CHECK(fam.chains[0].verdict == Verdict::Direct);
        CHECK(fam.singular());
    }
}

TEST_CASE("exp over 1 has only bounded preimage components") {
    const TractFamily fam = compute_tract_family(kExp, 1.0, small_options());
    CHECK(fam.chains.empty());
    CHECK(!fam.singular());
}

TEST_CASE("verdicts survive doubling the grid and the box") {
    TractOptions t = small_options();
    const TractFamily coarse = compute_tract_family(kExp, 0.0, t);
    t.grid *= 2;
    t.half_width *= 2;
    const TractFamily fine = compute_tract_family(kExp, 0.0, t);
    REQUIRE(coarse.chains.size() == fine.chains.size());
    for (std::size_t i = 0; i < coarse.chains.size(); ++i) {
        CHECK(coarse.chains[i].verdict == fine.chains[i].verdict);
    }
}

TEST_CASE("multiplication by 2 fixes the tract over 0") {
    const TractFamily fam = compute_tract_family(kExp, 0.0, small_options());
    const LambdaAction act = lambda_action(fam, fam, 2.0);
    CHECK(act.injective);
    CHECK(act.permutation);
    REQUIRE(act.image.size() == 1);
    CHECK(act.image[0] == 0);
    REQUIRE(act.cycles.size() == 1);
    CHECK(act.cycles[0] == std::vector<int>{0});
}

TEST_CASE("covering probe on exp and on a polynomial") {
    CHECK(complete_covering_probe(kExp, 0.0, small_options()).verdict == CoverVerdict::UnboundedTractFound);
    CHECK(complete_covering_probe(kExp, 1.0, small_options()).verdict == CoverVerdict::CoversCompletely);
    const SphereFunction square = [](Cplx w) { return SpherePoint(w * w); };
    for (Cplx a : {Cplx(0.0, 0.0), Cplx(0.5, 0.5), Cplx(3.0, 0.0)}) {
        CHECK(complete_covering_probe(square, a, small_options()).verdict == CoverVerdict::CoversCompletely);
    }
}

TEST_CASE("indirect tract of z(1 - z^2)/4 at i sqrt 3") {
    const RationalMap f(Coeffs{0.0, 0.25, 0.0, -0.25});
    const PeriodicPoint pt = nearest_periodic_point(f, Cplx(0.0, std::sqrt(3.0)), 1);
    REQUIRE(std::abs(pt.multiplier - 2.5) < 1e-12);
    const SchroederSeries s = build_schroeder_series(f, pt);
    TractOptions t;
    t.half_width = 400.0;
    t.grid = 256;
    // 0 is a fixed point; the solutions of h = 0 march out along the tract by factors of lambda
    const TractFamily fam = compute_tract_family(as_function(s), 0.0, t);
    CHECK(fam.count(Verdict::Indirect) >= 1);
    for (const auto& c : fam.chains) {
        if (c.verdict != Verdict::Indirect) {
            continue;
        }
        for (std::size_t i = 1; i < c.innermost_solution.size(); ++i) {
            CHECK(c.innermost_solution[i] > c.innermost_solution[i - 1]);
        }
    }
}

TEST_CASE("orbit points next to an attracting point are absorbed") {
    const RationalMap f(Coeffs{0.0, 0.25, 0.0, -0.25});
    const auto values = census_candidates(f);
    for (const auto& v : values) {
        const double d = chordal_distance(v, 0.0);
        CHECK((d < 1e-12 || d >= 1.0 / 64.0));
    }
    CHECK(std::any_of(values.begin(), values.end(), [](const SpherePoint& v) { return chordal_distance(v, 0.0) < 1e-12; }));
}

TEST_CASE("one tract over infinity for the basilica at its beta point") {
    // the deepest rung only shows up as slivers on the edge of the smallest box
    const RationalMap f = RationalMap::quadratic(-1.0);
    const SchroederSeries s = build_schroeder_series(f, nearest_periodic_point(f, 1.6, 1));
    const Census census = singularity_census(as_function(s), f, 1, s.lambda(), census_candidates(f), small_options());
    CHECK(census.direct == 1);
    for (const auto& e : census.entries) {
        if (e.a.is_infinity()) {
            CHECK(e.family.chains.size() == 1);
            CHECK(e.action.permutation);
        } else {
            CHECK(e.family.chains.empty());
        }
    }
}

TEST_CASE("census of the exponential through the series engine") {
    const RationalMap f = RationalMap::quadratic(0.0);
    const SchroederSeries s = build_schroeder_series(f, nearest_periodic_point(f, 1.0, 1));
    const auto values = census_candidates(f);
    CHECK(values.size() == 2);
    const Census census = singularity_census(as_function(s), f, 1, s.lambda(), values, small_options());
    CHECK(census.direct == 2);
    CHECK(census.indirect == 0);
    CHECK(census.finite_singular == 1);
    for (const auto& e : census.entries) {
        CHECK(e.action.permutation);
        CHECK(e.periodic_chains == std::vector<int>{0});
    }
    DynamicsSummary dyn;
    dyn.attracting = {0.0, SpherePoint::infinity()};
    const CrossCheck ok = singular_value_crosscheck(census, dyn);
    CHECK(ok.passed());
    CHECK(ok.discrepancies.empty());

    DynamicsSummary wrong;
    wrong.attracting = {SpherePoint::infinity()};
    const CrossCheck bad = singular_value_crosscheck(census, wrong);
    CHECK(!bad.direct_in_attracting);
    CHECK(!bad.periodic_in_at_pb);
    CHECK(!bad.singular_in_unhyperbolic);
    CHECK(bad.discrepancies.size() == 3);

    const auto j = tract_family_json(census.entries[0].family);
    CHECK(j.contains("a"));
    CHECK(j["rungs"].size() == 4);
    CHECK(j["verdicts"][0]["verdict"] == "direct");
}

TEST_CASE("verdict names") {
    CHECK(to_string(Verdict::NotASingularity) == "not-a-singularity");
    CHECK(to_string(CoverVerdict::CoversCompletely) == "covers-completely");
}
