#include "schroeder/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "schroeder/parallel.hpp"

namespace schroeder {

Box Box::square(double half_width) { return square(Cplx{0.0, 0.0}, half_width); }

Box Box::square(Cplx center, double half_width) {
    if (!(half_width > 0.0)) {
        throw PreconditionError("box half-width must be positive");
    }
    return {center.real() - half_width, center.real() + half_width, center.imag() - half_width,
            center.imag() + half_width};
}

Grid::Grid(Box box, int nx, int ny) : box_(box), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) {
        throw PreconditionError("grid dimensions must be positive");
    }
    if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
        throw PreconditionError("grid box must have positive area");
    }
}

Cplx Grid::center(int col, int row) const {
    return {box_.re_min + (col + 0.5) * dx(), box_.im_max - (row + 0.5) * dy()};
}

Cplx Grid::center(std::size_t index) const {
    return center(static_cast<int>(index % static_cast<std::size_t>(nx_)),
                  static_cast<int>(index / static_cast<std::size_t>(nx_)));
}

std::optional<std::size_t> Grid::locate(Cplx w) const {
    if (!box_.contains(w)) {
        return std::nullopt;
    }
    const int col = std::clamp(static_cast<int>((w.real() - box_.re_min) / dx()), 0, nx_ - 1);
    const int row = std::clamp(static_cast<int>((box_.im_max - w.imag()) / dy()), 0, ny_ - 1);
    return index(col, row);
}

std::vector<SpherePoint> sample(const SphereFunction& f, const Grid& grid, unsigned threads) {
    std::vector<SpherePoint> out(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) { out[i] = f(grid.center(i)); });
    return out;
}

int Labeling::label_at(Cplx w) const {
    const auto idx = grid.locate(w);
    return idx ? labels[*idx] : -1;
}

std::vector<std::size_t> Labeling::pixels_of(int id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == id) {
            out.push_back(i);
        }
    }
    return out;
}

Labeling label_components(const Grid& grid, const std::vector<std::uint8_t>& mask, int samples_per_component,
                          const std::vector<std::uint8_t>* boundary) {
    if (mask.size() != grid.size()) {
        throw PreconditionError("mask size does not match grid");
    }
    const int nx = grid.nx();
    const int ny = grid.ny();
    Labeling out{grid, std::vector<int>(grid.size(), -1), {}};
    auto on_edge = [&](std::size_t i) {
        if (boundary != nullptr) {
            return (*boundary)[i] != 0;
        }
        const int col = static_cast<int>(i % static_cast<std::size_t>(nx));
        const int row = static_cast<int>(i / static_cast<std::size_t>(nx));
        return col == 0 || row == 0 || col == nx - 1 || row == ny - 1;
    };
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < grid.size(); ++start) {
        if (mask[start] == 0 || out.labels[start] >= 0) {
            continue;
        }
        Component comp;
        comp.id = static_cast<int>(out.components.size());
        comp.seed = start;
        out.labels[start] = comp.id;
        stack.assign(1, start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++comp.pixels;
            comp.touches_boundary = comp.touches_boundary || on_edge(i);
            const int col = static_cast<int>(i % static_cast<std::size_t>(nx));
            const int row = static_cast<int>(i / static_cast<std::size_t>(nx));
            const int nbr[4][2] = {{col - 1, row}, {col + 1, row}, {col, row - 1}, {col, row + 1}};
            for (const auto& n : nbr) {
                if (n[0] < 0 || n[1] < 0 || n[0] >= nx || n[1] >= ny) {
                    continue;
                }
                const std::size_t j = grid.index(n[0], n[1]);
                if (mask[j] != 0 && out.labels[j] < 0) {
                    out.labels[j] = comp.id;
                    stack.push_back(j);
                }
            }
        }
        out.components.push_back(std::move(comp));
    }
    // Evenly spaced samples in raster order, preferring pixels whose
    // 5 x 5 neighbourhood lies in the same component.
    auto interior = [&](std::size_t i) {
        const int col = static_cast<int>(i % static_cast<std::size_t>(nx));
        const int row = static_cast<int>(i / static_cast<std::size_t>(nx));
        if (col < 2 || row < 2 || col + 2 >= nx || row + 2 >= ny) {
            return false;
        }
        for (int dr = -2; dr <= 2; ++dr) {
            for (int dc = -2; dc <= 2; ++dc) {
                if (out.labels[grid.index(col + dc, row + dr)] != out.labels[i]) {
                    return false;
                }
            }
        }
        return true;
    };
    const auto per = static_cast<std::size_t>(std::max(1, samples_per_component));
    std::vector<std::uint8_t> inner(grid.size(), 0);
    std::vector<std::size_t> inner_count(out.components.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (out.labels[i] >= 0 && interior(i)) {
            inner[i] = 1;
            ++inner_count[static_cast<std::size_t>(out.labels[i])];
        }
    }
    std::vector<std::size_t> seen(out.components.size(), 0);
    std::vector<std::size_t> picked(out.components.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (out.labels[i] < 0) {
            continue;
        }
        const auto id = static_cast<std::size_t>(out.labels[i]);
        const bool use_inner = inner_count[id] > 0;
        if (use_inner && inner[i] == 0) {
            continue;
        }
        const std::size_t pool = use_inner ? inner_count[id] : out.components[id].pixels;
        const std::size_t limit = std::min(per, pool);
        const auto target = static_cast<std::size_t>((static_cast<double>(picked[id]) + 0.5) *
                                                     static_cast<double>(pool) / static_cast<double>(limit));
        if (picked[id] < limit && seen[id] == target) {
            out.components[id].samples.push_back(grid.center(i));
            ++picked[id];
        }
        ++seen[id];
    }
    return out;
}

std::string pgm_bytes(const Labeling& labeling) {
    std::string out = "P5\n" + std::to_string(labeling.grid.nx()) + " " + std::to_string(labeling.grid.ny()) + "\n255\n";
    out.reserve(out.size() + labeling.labels.size());
    for (int id : labeling.labels) {
        out.push_back(static_cast<char>(id < 0 ? 0 : ((id + 1) % 256)));
    }
    return out;
}

void write_pgm(const Labeling& labeling, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    const std::string bytes = pgm_bytes(labeling);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace {

// Local coordinate in which the target a sits at 0.
std::optional<Cplx> target_coordinate(const SpherePoint& z, const SpherePoint& a) {
    if (a.is_infinity()) {
        if (z.is_infinity()) {
            return Cplx{0.0, 0.0};
        }
        const Cplx v = z.value();
        if (v == Cplx(0.0, 0.0)) {
            return std::nullopt;
        }
        return 1.0 / v;
    }
    if (z.is_infinity()) {
        return std::nullopt;
    }
    return z.value() - a.value();
}

} // namespace

std::optional<Solution> refine_solution(const SphereFunction& f, const SpherePoint& a, Cplx w0, double step_limit,
                                        const SolveOptions& options) {
    Cplx w = w0;
    auto residual_at = [&](Cplx x) { return chordal_distance(f(x), a); };
    double res = residual_at(w);
    for (int it = 0; it < options.max_iterations; ++it) {
        const auto phi = target_coordinate(f(w), a);
        if (!phi) {
            return std::nullopt;
        }
        const double delta = 1e-7 * (1.0 + std::abs(w));
        const auto plus = target_coordinate(f(w + delta), a);
        const auto minus = target_coordinate(f(w - delta), a);
        if (!plus || !minus) {
            return std::nullopt;
        }
        const Cplx dphi = (*plus - *minus) / (2.0 * delta);
        if (dphi == Cplx(0.0, 0.0) || !std::isfinite(std::abs(dphi))) {
            return std::nullopt;
        }
        Cplx step = -*phi / dphi;
        if (std::abs(step) > step_limit) {
            step *= step_limit / std::abs(step);
        }
        double trial = residual_at(w + step);
        int halvings = 0;
        while (!(trial < res) && halvings < 12) {
            step *= 0.5;
            trial = residual_at(w + step);
            ++halvings;
        }
        if (!(trial <= res)) {
            break;
        }
        w += step;
        res = trial;
        if (std::abs(step) < 1e-7 * (1.0 + std::abs(w)) && res < options.tolerance) {
            return Solution{w, res};
        }
    }
    return std::nullopt;
}

std::vector<Solution> find_solutions(const SphereFunction& f, const SpherePoint& a, const Labeling& labeling, int id,
                                     const std::vector<SpherePoint>& values, const SolveOptions& options) {
    const Grid& grid = labeling.grid;
    const int nx = grid.nx();
    const int ny = grid.ny();
    std::vector<double> chi(grid.size(), 2.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (labeling.labels[i] == id) {
            chi[i] = chordal_distance(values[i], a);
        }
    }
    const double pixel = std::max(grid.dx(), grid.dy());
    std::vector<Solution> out;
    for (int row = 1; row + 1 < ny; ++row) {
        for (int col = 1; col + 1 < nx; ++col) {
            const std::size_t i = grid.index(col, row);
            if (labeling.labels[i] != id) {
                continue;
            }
            bool minimum = true;
            for (int dr = -1; dr <= 1 && minimum; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) {
                        continue;
                    }
                    const std::size_t j = grid.index(col + dc, row + dr);
                    if (chi[j] < chi[i] || (chi[j] == chi[i] && j < i)) {
                        minimum = false;
                        break;
                    }
                }
            }
            if (!minimum) {
                continue;
            }
            const auto sol = refine_solution(f, a, grid.center(i), 2.0 * pixel, options);
            if (!sol) {
                continue;
            }
            const auto at = grid.locate(sol->w);
            if (!at || labeling.labels[*at] != id) {
                continue;
            }
            const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Solution& s) {
                return std::abs(s.w - sol->w) < 1e-6 * (1.0 + std::abs(s.w));
            });
            if (!duplicate) {
                out.push_back(*sol);
            }
        }
    }
    return out;
}

} // namespace schroeder
