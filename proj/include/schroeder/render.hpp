#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schroeder/grid.hpp"
#include "schroeder/rational_map.hpp"

namespace schroeder {

/// Row-major image with row 0 at the top (largest imaginary part).
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 3; ///< 3 for RGB, 1 for grey or ids
    Box world{-1.0, 1.0, -1.0, 1.0};
    std::vector<std::uint8_t> pixels;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int ch, Box box);

    [[nodiscard]] Cplx pixel_to_world(int col, int row) const;
    [[nodiscard]] std::optional<std::pair<int, int>> world_to_pixel(Cplx w) const;
    [[nodiscard]] std::uint8_t* at(int col, int row) {
        return pixels.data() + (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)) *
                                   static_cast<std::size_t>(channels);
    }
};

/// P6 for three channels, P5 for one.
std::string netpbm_bytes(const ImageBuffer& img);
void write_netpbm(const ImageBuffer& img, const std::string& path);

inline constexpr int kMaxImageSide = 8192;

/// Hue from arg h, lightness from log(1 + |h|) squashed into (0.1, 0.9);
/// the point at infinity is white.
ImageBuffer render_domain_coloring(const SphereFunction& h, const Box& box, int nx, int ny, unsigned threads = 1);

std::array<std::uint8_t, 3> domain_color(const SpherePoint& v);

/// Grey levels from the escape time of f^k(z) for a polynomial map;
/// non-escaping pixels are black.
ImageBuffer render_escape_time(const RationalMap& f, const Box& box, int nx, int ny, int max_iterations,
                               unsigned threads = 1);

inline constexpr long long kMaxSweepCells = 10000000;

struct SweepOptions {
    int degree = 2;
    Box box{-2.5, 1.5, -2.0, 2.0};
    int nx = 512;
    int ny = 512;
    int max_iterations = 1000;
    int max_period = 64;
    bool cover = false;    ///< run the covering probe on cells with an attracting cycle
    int cover_grid = 96;
    double cover_box = 20.0;
    unsigned threads = 1;
};

struct SweepCell {
    int col = 0;
    int row = 0;
    Cplx c;
    bool in_mandelbrot = false;
    int escape_iteration = -1;
    bool hyperbolic = false;   ///< attracting cycle in the plane found
    int period = 0;
    double multiplier = 0.0;   ///< |lambda| of that cycle
    std::string cover;         ///< empty when not probed
    std::string error;
};

/// Membership of 0 under z^d + c in the bounded-orbit locus: |f^k(0)| <= 2
/// for k <= max_iterations.
bool mandelbrot_member(int degree, Cplx c, int max_iterations, int* escape_iteration = nullptr);

struct AttractingCycle {
    int period = 0;
    Cplx point;
    Cplx multiplier;
};

/// Attracting cycle of z^d + c found by following the critical orbit.
std::optional<AttractingCycle> find_attracting_cycle(int degree, Cplx c, int max_period = 64,
                                                     int max_iterations = 20000);

SweepCell sweep_cell(const SweepOptions& options, int col, int row);
std::vector<SweepCell> run_sweep(const SweepOptions& options);
std::string sweep_csv(const std::vector<SweepCell>& cells);

/// Black outside, grey in the bounded locus, coloured by period where an
/// attracting cycle was found.
ImageBuffer sweep_heatmap(const SweepOptions& options, const std::vector<SweepCell>& cells);

/// %.17g formatting used by every text report.
std::string format_double(double x);

} // namespace schroeder
