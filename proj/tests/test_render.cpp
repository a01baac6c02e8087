#include <doctest.h>

#include <cmath>

#include "schroeder/render.hpp"
#include "schroeder/series.hpp"

using namespace schroeder;

namespace {

// escape test written with separate real and imaginary parts
bool escapes_real(double cr, double ci, int max_iter) {
    double x = 0.0;
    double y = 0.0;
    for (int k = 0; k < max_iter; ++k) {
        const double nx = x * x - y * y + cr;
        y = 2.0 * x * y + ci;
        x = nx;
        if (x * x + y * y > 4.0) {
            return true;
        }
    }
    return false;
}

double hue_of(const std::uint8_t* p) {
    const double r = p[0] / 255.0, g = p[1] / 255.0, b = p[2] / 255.0;
    return std::atan2(std::sqrt(3.0) * (g - b), 2 * r - g - b);
}

} // namespace

TEST_CASE("image transform round trip") {
    const ImageBuffer img(40, 20, 3, Box{-2.0, 2.0, -1.0, 1.0});
    CHECK(img.pixels.size() == 40u * 20u * 3u);
    for (int row = 0; row < 20; row += 3) {
        for (int col = 0; col < 40; col += 7) {
            const auto px = img.world_to_pixel(img.pixel_to_world(col, row));
            REQUIRE(px.has_value());
            CHECK(px->first == col);
            CHECK(px->second == row);
        }
    }
    CHECK(!img.world_to_pixel(Cplx(5.0, 0.0)).has_value());
    CHECK_THROWS_AS(ImageBuffer(9000, 1, 3, Box::square(1.0)), PreconditionError);
}

TEST_CASE("netpbm headers") {
    ImageBuffer rgb(2, 1, 3, Box::square(1.0));
    CHECK(netpbm_bytes(rgb).rfind("P6\n2 1\n255\n", 0) == 0);
    CHECK(netpbm_bytes(rgb).size() == 11 + 6);
    ImageBuffer grey(2, 1, 1, Box::square(1.0));
    CHECK(netpbm_bytes(grey).rfind("P5\n2 1\n255\n", 0) == 0);
}

TEST_CASE("constant function gives a uniform image") {
    const ImageBuffer img = render_domain_coloring([](Cplx) { return SpherePoint(Cplx(0.3, -2.0)); }, Box::square(1.0), 16, 16);
    for (std::size_t i = 3; i < img.pixels.size(); ++i) {
        CHECK(img.pixels[i] == img.pixels[i % 3]);
    }
    CHECK(domain_color(SpherePoint::infinity()) == std::array<std::uint8_t, 3>{255, 255, 255});
}

TEST_CASE("exp renders horizontal hue bands") {
    const RationalMap f = RationalMap::quadratic(0.0);
    const SchroederSeries s = build_schroeder_series(f, nearest_periodic_point(f, 1.0, 1));
    ImageBuffer img = render_domain_coloring(as_function(s), Box::square(2.0), 64, 64);
    for (int row = 0; row < 64; row += 5) {
        const double im = img.pixel_to_world(0, row).imag();
        for (int col = 8; col < 56; col += 8) {
            const double d = std::remainder(hue_of(img.at(col, row)) - im, 2 * M_PI);
            CHECK(std::abs(d) < 0.05);
        }
    }
}

TEST_CASE("near-identity colouring at the centre") {
    const RationalMap f = RationalMap::quadratic(0.0);
    const SchroederSeries s = build_schroeder_series(f, nearest_periodic_point(f, 1.0, 1));
    ImageBuffer img = render_domain_coloring(as_function(s), Box::square(1e-3), 3, 3);
    const auto want = domain_color(SpherePoint(s.z0() + img.pixel_to_world(2, 0)));
    CHECK(std::equal(want.begin(), want.end(), img.at(2, 0)));
}

TEST_CASE("rendering is identical across thread counts") {
    const RationalMap f = RationalMap::quadratic(Cplx(-0.12, 0.74));
    const SchroederSeries s = build_schroeder_series(f, nearest_periodic_point(f, Cplx(-0.27, 0.48), 1));
    const auto a = render_domain_coloring(as_function(s), Box::square(3.0), 48, 48, 1);
    const auto b = render_domain_coloring(as_function(s), Box::square(3.0), 48, 48, 4);
    CHECK(a.pixels == b.pixels);
    CHECK(render_escape_time(f, Box::square(2.0), 64, 64, 200, 1).pixels ==
          render_escape_time(f, Box::square(2.0), 64, 64, 200, 3).pixels);
}

TEST_CASE("membership and attracting cycles") {
    int esc = 0;
    CHECK(mandelbrot_member(2, 0.0, 100));
    CHECK(!mandelbrot_member(2, 1.0, 100, &esc));
    CHECK(esc == 3);
    const auto c0 = find_attracting_cycle(2, 0.0);
    REQUIRE(c0.has_value());
    CHECK(c0->period == 1);
    const auto c1 = find_attracting_cycle(2, -1.0);
    REQUIRE(c1.has_value());
    CHECK(c1->period == 2);
    CHECK(std::abs(c1->multiplier) < 1e-12);
    const auto c3 = find_attracting_cycle(2, Cplx(-0.1226, 0.7449));
    REQUIRE(c3.has_value());
    CHECK(c3->period == 3);
    // slow rotation inside the main cardioid must still report period 1
    const Cplx lam = std::polar(0.97, 2 * M_PI * 0.4);
    const auto near = find_attracting_cycle(2, lam / 2.0 - lam * lam / 4.0);
    REQUIRE(near.has_value());
    CHECK(near->period == 1);
    CHECK(std::abs(near->multiplier - lam) < 1e-8);
    CHECK(!find_attracting_cycle(2, 1.0).has_value());
    CHECK(find_attracting_cycle(3, Cplx(0.0, 0.0))->period == 1);
}

TEST_CASE("sweep cells at known parameters") {
    SweepOptions o;
    o.nx = o.ny = 1;
    o.cover = true;
    o.box = Box::square(Cplx(0.0, 0.0), 1e-6);
    const SweepCell a = sweep_cell(o, 0, 0);
    CHECK(a.in_mandelbrot);
    CHECK(a.hyperbolic);
    CHECK(a.period == 1);
    CHECK(a.cover == "unbounded-tract-found");
    o.box = Box::square(Cplx(-1.0, 0.0), 1e-6);
    const SweepCell b = sweep_cell(o, 0, 0);
    CHECK(b.hyperbolic);
    CHECK(b.period == 2);
    CHECK(b.cover == "unbounded-tract-found");
    o.box = Box::square(Cplx(1.0, 0.0), 1e-6);
    const SweepCell c = sweep_cell(o, 0, 0);
    CHECK(!c.in_mandelbrot);
    CHECK(c.cover.empty());
}

TEST_CASE("sweep silhouette agrees with a separate escape test") {
    SweepOptions o;
    o.nx = o.ny = 128;
    o.max_iterations = 500;
    const auto cells = run_sweep(o);
    REQUIRE(cells.size() == 128u * 128u);
    std::size_t agree = 0;
    for (const auto& c : cells) {
        agree += c.in_mandelbrot != escapes_real(c.c.real(), c.c.imag(), 500);
    }
    CHECK(static_cast<double>(agree) / static_cast<double>(cells.size()) >= 0.99);
    o.threads = 4;
    CHECK(sweep_csv(run_sweep(o)) == sweep_csv(cells));
    const std::string csv = sweep_csv(cells);
    CHECK(csv.rfind("col,row,c_re,c_im,in_mandelbrot,escape_iteration,hyperbolic,period,multiplier,cover,error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 128 * 128 + 1);
    const ImageBuffer heat = sweep_heatmap(o, cells);
    CHECK(heat.width == 128);
}

TEST_CASE("sweep budget") {
    SweepOptions o;
    o.nx = 8192;
    o.ny = 8192;
    CHECK_THROWS_AS(run_sweep(o), BudgetError);
    o.nx = o.ny = 4;
    o.degree = 1;
    CHECK_THROWS_AS(run_sweep(o), PreconditionError);
}
