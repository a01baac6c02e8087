#include "schroeder/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "schroeder/dynamics.hpp"
#include "schroeder/parallel.hpp"
#include "schroeder/series.hpp"
#include "schroeder/tracts.hpp"

namespace schroeder {

ImageBuffer::ImageBuffer(int w, int h, int ch, Box box) : width(w), height(h), channels(ch), world(box) {
    if (w < 1 || h < 1 || w > kMaxImageSide || h > kMaxImageSide) {
        throw PreconditionError("image side must lie in [1, " + std::to_string(kMaxImageSide) + "]");
    }
    if (ch != 1 && ch != 3) {
        throw PreconditionError("image must have 1 or 3 channels");
    }
    if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
        throw PreconditionError("image box must have positive area");
    }
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(ch), 0);
}

Cplx ImageBuffer::pixel_to_world(int col, int row) const {
    return Grid(world, width, height).center(col, row);
}

std::optional<std::pair<int, int>> ImageBuffer::world_to_pixel(Cplx w) const {
    const Grid g(world, width, height);
    const auto idx = g.locate(w);
    if (!idx) {
        return std::nullopt;
    }
    return std::pair<int, int>{static_cast<int>(*idx % static_cast<std::size_t>(width)),
                               static_cast<int>(*idx / static_cast<std::size_t>(width))};
}

std::string netpbm_bytes(const ImageBuffer& img) {
    std::string out = (img.channels == 3 ? "P6\n" : "P5\n") + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    out.append(img.pixels.begin(), img.pixels.end());
    return out;
}

void write_netpbm(const ImageBuffer& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    const std::string bytes = netpbm_bytes(img);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace {

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

double hue_channel(double p, double q, double t) {
    t -= std::floor(t);
    if (t < 1.0 / 6.0) {
        return p + (q - p) * 6.0 * t;
    }
    if (t < 0.5) {
        return q;
    }
    if (t < 2.0 / 3.0) {
        return p + (q - p) * (2.0 / 3.0 - t) * 6.0;
    }
    return p;
}

} // namespace

std::array<std::uint8_t, 3> domain_color(const SpherePoint& v) {
    if (v.is_infinity() || !std::isfinite(std::abs(v.value()))) {
        return {255, 255, 255};
    }
    const Cplx z = v.value();
    const double hue = std::arg(z) / (2.0 * M_PI);
    const double light = 0.1 + 0.8 * (2.0 / M_PI) * std::atan(std::log1p(std::abs(z)));
    // full saturation HSL
    const double q = light < 0.5 ? light * 2.0 : 1.0;
    const double p = 2.0 * light - q;
    return {to_byte(hue_channel(p, q, hue + 1.0 / 3.0)), to_byte(hue_channel(p, q, hue)),
            to_byte(hue_channel(p, q, hue - 1.0 / 3.0))};
}

ImageBuffer render_domain_coloring(const SphereFunction& h, const Box& box, int nx, int ny, unsigned threads) {
    ImageBuffer img(nx, ny, 3, box);
    const Grid grid(box, nx, ny);
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const auto rgb = domain_color(h(grid.center(i)));
        std::copy(rgb.begin(), rgb.end(), img.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
    });
    return img;
}

ImageBuffer render_escape_time(const RationalMap& f, const Box& box, int nx, int ny, int max_iterations,
                               unsigned threads) {
    if (!f.is_polynomial()) {
        throw PreconditionError("escape-time rendering needs a polynomial map");
    }
    if (max_iterations < 1) {
        throw PreconditionError("iteration count must be positive");
    }
    ImageBuffer img(nx, ny, 1, box);
    const Grid grid(box, nx, ny);
    const double escape = f.escape_radius();
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        SpherePoint z = grid.center(i);
        int k = 0;
        for (; k < max_iterations; ++k) {
            if (z.is_infinity() || std::abs(z.value()) > escape) {
                break;
            }
            z = f(z);
        }
        img.pixels[i] = k == max_iterations
                            ? 0
                            : static_cast<std::uint8_t>(
                                  255 - std::min(254, static_cast<int>(254.0 * std::sqrt(static_cast<double>(k) / max_iterations))));
    });
    return img;
}

bool mandelbrot_member(int degree, Cplx c, int max_iterations, int* escape_iteration) {
    Cplx z{0.0, 0.0};
    for (int k = 1; k <= max_iterations; ++k) {
        Cplx zd = z;
        for (int j = 1; j < degree; ++j) {
            zd *= z;
        }
        z = zd + c;
        if (std::norm(z) > 4.0) {
            if (escape_iteration != nullptr) {
                *escape_iteration = k;
            }
            return false;
        }
    }
    if (escape_iteration != nullptr) {
        *escape_iteration = -1;
    }
    return true;
}

std::optional<AttractingCycle> find_attracting_cycle(int degree, Cplx c, int max_period, int max_iterations) {
    auto step = [&](Cplx z) {
        Cplx zd = z;
        for (int j = 1; j < degree; ++j) {
            zd *= z;
        }
        return zd + c;
    };
    Cplx z{0.0, 0.0};
    for (int done = 0; done < max_iterations; done += 64) {
        for (int k = 0; k < 64; ++k) {
            z = step(z);
            if (std::norm(z) > 4.0) {
                return std::nullopt;
            }
        }
        const Cplx ref = z;
        Cplx w = ref;
        for (int p = 1; p <= max_period; ++p) {
            w = step(w);
            if (std::abs(w - ref) >= 1e-10 * (1.0 + std::abs(ref))) {
                continue;
            }
            // slow rotation near a fixed point can mimic a longer cycle:
            // polish f^p(u) = u and read off the minimal period
            Cplx u = ref;
            for (int it = 0; it < 30; ++it) {
                Cplx v = u;
                Cplx dv{1.0, 0.0};
                for (int i = 0; i < p; ++i) {
                    dv *= static_cast<double>(degree) * std::pow(v, degree - 1);
                    v = step(v);
                }
                if (dv == Cplx(1.0, 0.0)) {
                    break;
                }
                const Cplx delta = (v - u) / (dv - 1.0);
                u -= delta;
                if (std::abs(delta) < 1e-15 * (1.0 + std::abs(u))) {
                    break;
                }
            }
            int q = p;
            Cplx v = u;
            for (int i = 1; i <= p; ++i) {
                v = step(v);
                if (p % i == 0 && std::abs(v - u) < 1e-9 * (1.0 + std::abs(u))) {
                    q = i;
                    break;
                }
            }
            Cplx mult{1.0, 0.0};
            v = u;
            for (int i = 0; i < q; ++i) {
                mult *= static_cast<double>(degree) * std::pow(v, degree - 1);
                v = step(v);
            }
            if (std::abs(mult) < 1.0) {
                return AttractingCycle{q, u, mult};
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

namespace {

RationalMap unicritical(int degree, Cplx c) {
    Coeffs coeffs(static_cast<std::size_t>(degree) + 1, Cplx{0.0, 0.0});
    coeffs[0] = c;
    coeffs.back() = 1.0;
    return RationalMap::polynomial(coeffs);
}

std::string cover_cell(const SweepOptions& o, Cplx c, const AttractingCycle& cycle) {
    const RationalMap f = unicritical(o.degree, c);
    std::vector<SpherePoint> targets;
    SpherePoint a = cycle.point;
    for (int i = 0; i < cycle.period; ++i) {
        targets.push_back(a);
        a = f(a);
    }
    TractOptions t;
    t.grid = o.cover_grid;
    t.half_width = o.cover_box;
    bool all_cover = true;
    for (const auto& pt : periodic_points(f, 1)) {
        if (pt.z.is_infinity() || pt.kind != PeriodicClass::Repelling) {
            continue;
        }
        const SchroederSeries s = build_schroeder_series(f, pt);
        const SphereFunction h = as_function(s);
        for (const auto& target : targets) {
            const CoverVerdict v = complete_covering_probe(h, target, t).verdict;
            if (v == CoverVerdict::UnboundedTractFound) {
                return std::string(to_string(v));
            }
            all_cover = all_cover && v == CoverVerdict::CoversCompletely;
        }
    }
    return std::string(to_string(all_cover ? CoverVerdict::CoversCompletely : CoverVerdict::Inconclusive));
}

} // namespace

SweepCell sweep_cell(const SweepOptions& o, int col, int row) {
    SweepCell cell;
    cell.col = col;
    cell.row = row;
    cell.c = Grid(o.box, o.nx, o.ny).center(col, row);
    try {
        cell.in_mandelbrot = mandelbrot_member(o.degree, cell.c, o.max_iterations, &cell.escape_iteration);
        if (cell.in_mandelbrot) {
            if (const auto cyc = find_attracting_cycle(o.degree, cell.c, o.max_period)) {
                cell.hyperbolic = true;
                cell.period = cyc->period;
                cell.multiplier = std::abs(cyc->multiplier);
                if (o.cover) {
                    cell.cover = cover_cell(o, cell.c, *cyc);
                }
            }
        }
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

std::vector<SweepCell> run_sweep(const SweepOptions& o) {
    if (o.degree < 2) {
        throw PreconditionError("sweep degree must be at least 2");
    }
    if (o.nx < 1 || o.ny < 1 || o.nx > kMaxImageSide || o.ny > kMaxImageSide) {
        throw PreconditionError("sweep grid sides must lie in [1, " + std::to_string(kMaxImageSide) + "]");
    }
    if (static_cast<long long>(o.nx) * o.ny > kMaxSweepCells) {
        throw BudgetError("sweep cell count exceeds budget");
    }
    if (o.max_iterations < 1 || o.max_period < 1) {
        throw PreconditionError("iteration count and period bound must be positive");
    }
    std::vector<SweepCell> cells(static_cast<std::size_t>(o.nx) * static_cast<std::size_t>(o.ny));
    parallel_for(cells.size(), o.threads, [&](std::size_t i) {
        cells[i] = sweep_cell(o, static_cast<int>(i % static_cast<std::size_t>(o.nx)),
                              static_cast<int>(i / static_cast<std::size_t>(o.nx)));
    });
    return cells;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::string out = "col,row,c_re,c_im,in_mandelbrot,escape_iteration,hyperbolic,period,multiplier,cover,error\n";
    for (const auto& c : cells) {
        std::string err = c.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += std::to_string(c.col) + "," + std::to_string(c.row) + "," + format_double(c.c.real()) + "," +
               format_double(c.c.imag()) + "," + (c.in_mandelbrot ? "1" : "0") + "," +
               std::to_string(c.escape_iteration) + "," + (c.hyperbolic ? "1" : "0") + "," + std::to_string(c.period) +
               "," + format_double(c.multiplier) + "," + c.cover + "," + err + "\n";
    }
    return out;
}

ImageBuffer sweep_heatmap(const SweepOptions& o, const std::vector<SweepCell>& cells) {
    ImageBuffer img(o.nx, o.ny, 3, o.box);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        std::array<std::uint8_t, 3> rgb{0, 0, 0};
        if (c.hyperbolic) {
            const double hue = std::fmod(0.61803398874989485 * (c.period - 1), 1.0);
            rgb = domain_color(SpherePoint(std::polar(1.0, 2.0 * M_PI * hue)));
        } else if (c.in_mandelbrot) {
            rgb = {200, 200, 200};
        }
        std::copy(rgb.begin(), rgb.end(), img.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
    }
    return img;
}

} // namespace schroeder
