#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schroeder/sphere.hpp"

namespace schroeder {

struct Box {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = -1.0;
    double im_max = 1.0;

    /// [-R, R]^2.
    static Box square(double half_width);
    static Box square(Cplx center, double half_width);

    [[nodiscard]] double width() const { return re_max - re_min; }
    [[nodiscard]] double height() const { return im_max - im_min; }
    [[nodiscard]] bool contains(Cplx w) const {
        return w.real() >= re_min && w.real() <= re_max && w.imag() >= im_min && w.imag() <= im_max;
    }
};

/// Pixel-centred sampling of a box; row 0 is the top edge (largest imaginary part).
class Grid {
public:
    Grid(Box box, int nx, int ny);
    Grid(Box box, int n) : Grid(box, n, n) {}

    [[nodiscard]] const Box& box() const { return box_; }
    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int ny() const { return ny_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
    [[nodiscard]] double dx() const { return box_.width() / nx_; }
    [[nodiscard]] double dy() const { return box_.height() / ny_; }

    [[nodiscard]] Cplx center(int col, int row) const;
    [[nodiscard]] Cplx center(std::size_t index) const;
    [[nodiscard]] std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(col);
    }
    /// Pixel containing w, if inside the box.
    [[nodiscard]] std::optional<std::size_t> locate(Cplx w) const;

private:
    Box box_;
    int nx_;
    int ny_;
};

/// f at every pixel centre, evaluated in parallel.
std::vector<SpherePoint> sample(const SphereFunction& f, const Grid& grid, unsigned threads = 1);

struct Component {
    int id = 0;
    std::size_t pixels = 0;
    bool touches_boundary = false;
    /// A few pixel centres spread over the component, in raster order.
    std::vector<Cplx> samples;
    /// Raster index of the first pixel of the component.
    std::size_t seed = 0;
};

/// 4-connected components of a mask.
struct Labeling {
    Grid grid;
    std::vector<int> labels; ///< -1 outside the mask, else component id
    std::vector<Component> components;

    [[nodiscard]] int label_at(Cplx w) const;
    /// Pixel indices of one component, in raster order.
    [[nodiscard]] std::vector<std::size_t> pixels_of(int id) const;
};

/// `boundary` marks the pixels counted as box contact; by default the outer ring.
Labeling label_components(const Grid& grid, const std::vector<std::uint8_t>& mask, int samples_per_component = 16,
                          const std::vector<std::uint8_t>* boundary = nullptr);

/// Component id mod 256 as P5 bytes; background 0, ids start at 1.
std::string pgm_bytes(const Labeling& labeling);
void write_pgm(const Labeling& labeling, const std::string& path);

struct Solution {
    Cplx w;
    double residual = 0.0; ///< chordal distance from f(w) to the target
};

struct SolveOptions {
    double tolerance = 1e-9;
    int max_iterations = 60;
};

/// Solutions of f(w) = a inside one labeled component: strict local minima of
/// the chordal residual over the component's pixels, refined by damped Newton
/// iteration. `values` are f at the pixel centres.
std::vector<Solution> find_solutions(const SphereFunction& f, const SpherePoint& a, const Labeling& labeling, int id,
                                     const std::vector<SpherePoint>& values, const SolveOptions& options = {});

/// Damped Newton on z - a (or 1/z for a = infinity) starting at w0.
std::optional<Solution> refine_solution(const SphereFunction& f, const SpherePoint& a, Cplx w0, double step_limit,
                                        const SolveOptions& options = {});

} // namespace schroeder
