#include "schroeder/basin.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <numeric>

#include "schroeder/growth.hpp"
#include "schroeder/parallel.hpp"

namespace schroeder {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double t) { return std::remainder(t, kTwoPi); }

} // namespace

ArcTrace extend_arc(const std::vector<Cplx>& base, Cplx lambda_n, int n, double max_log_modulus) {
    if (base.size() < 2) {
        throw PreconditionError("arc needs at least two points");
    }
    if (!(std::abs(lambda_n) > 1.0)) {
        throw PreconditionError("arc translation needs |lambda^N| > 1");
    }
    ArcTrace arc;
    arc.lambda_n = lambda_n;
    arc.n = n;
    const std::size_t m = base.size() - 1;
    arc.period_samples = m;
    std::vector<Cplx> period(base.begin(), base.end() - 1);
    for (int k = 0;; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            arc.t.push_back(k + static_cast<double>(i) / static_cast<double>(m));
            arc.points.push_back(period[i]);
        }
        if (std::log(std::abs(period[0])) > max_log_modulus || k > 100000) {
            break;
        }
        for (auto& z : period) {
            z *= lambda_n;
        }
    }
    arc.arg.resize(arc.points.size());
    arc.arg[0] = std::arg(arc.points[0]);
    for (std::size_t i = 1; i < arc.points.size(); ++i) {
        arc.arg[i] = arc.arg[i - 1] + wrap(std::arg(arc.points[i]) - std::arg(arc.points[i - 1]));
    }
    return arc;
}

ArcTrace trace_asymptotic_arc(const Labeling& mask, int id, Cplx w0, Cplx lambda, int n, double max_log_modulus) {
    if (n < 1) {
        throw PreconditionError("arc period N must be positive");
    }
    Cplx lambda_n{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        lambda_n *= lambda;
    }
    const Cplx w1 = lambda_n * w0;
    const auto start = mask.grid.locate(w0);
    const auto goal = mask.grid.locate(w1);
    if (!start || !goal || mask.labels[*start] != id || mask.labels[*goal] != id) {
        throw PreconditionError("w0 and lambda^N w0 must lie in the same component");
    }
    const Grid& g = mask.grid;
    std::vector<long long> prev(g.size(), -1);
    std::deque<std::size_t> queue{*start};
    prev[*start] = static_cast<long long>(*start);
    while (!queue.empty() && prev[*goal] < 0) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const int col = static_cast<int>(i % static_cast<std::size_t>(g.nx()));
        const int row = static_cast<int>(i / static_cast<std::size_t>(g.nx()));
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const int c = col + dc;
                const int r = row + dr;
                if ((dr == 0 && dc == 0) || c < 0 || r < 0 || c >= g.nx() || r >= g.ny()) {
                    continue;
                }
                const std::size_t j = g.index(c, r);
                if (mask.labels[j] == id && prev[j] < 0) {
                    prev[j] = static_cast<long long>(i);
                    queue.push_back(j);
                }
            }
        }
    }
    if (prev[*goal] < 0) {
        throw PreconditionError("no grid path joins w0 and lambda^N w0");
    }
    std::vector<Cplx> path;
    for (std::size_t i = *goal; i != *start; i = static_cast<std::size_t>(prev[i])) {
        path.push_back(g.center(i));
    }
    path.push_back(g.center(*start));
    std::reverse(path.begin(), path.end());
    path.front() = w0;
    if (path.size() == 1) {
        path.push_back(w1);
    } else {
        path.back() = w1;
    }
    return extend_arc(path, lambda_n, n, max_log_modulus);
}

double spiral_term(const ArcTrace& arc) {
    if (arc.points.empty() || std::abs(arc.points.back()) < 1e4) {
        throw PreconditionError("arc too short: spiral term needs |gamma| >= 1e4");
    }
    double best = 0.0;
    for (std::size_t i = arc.points.size() / 2; i < arc.points.size(); ++i) {
        const double lm = std::log(std::abs(arc.points[i]));
        if (lm > 0.0) {
            const double ratio = arc.arg[i] / lm;
            best = std::max(best, ratio * ratio);
        }
    }
    return best;
}

double closest_arg_branch(Cplx lambda, int p, int q) {
    if (q < 1) {
        throw PreconditionError("q must be positive");
    }
    const double target = kTwoPi * p / q;
    const double theta = std::arg(lambda);
    return theta + kTwoPi * std::round((target - theta) / kTwoPi);
}

double spiral_closed_form(int q, int p, Cplx lambda) {
    const double theta = closest_arg_branch(lambda, p, q);
    return (q * theta - kTwoPi * p) / (q * std::log(std::abs(lambda)));
}

PlyReport ply_check(int q_inf, int p, int q, Cplx lambda, int d, int period) {
    if (q_inf < 1 || q < 1) {
        throw PreconditionError("inequality check needs q_inf >= 1 and q >= 1");
    }
    if (!(std::abs(lambda) > 1.0)) {
        throw PreconditionError("inequality check needs |lambda| > 1");
    }
    PlyReport r;
    r.q_inf = q_inf;
    r.q = q;
    r.p = p;
    r.m_inf = q_inf / q;
    r.p_inf = p * r.m_inf;
    r.arg_branch = closest_arg_branch(lambda, p, q);
    const double log_mod = std::log(std::abs(lambda));
    const double term = (r.arg_branch - kTwoPi * p / q) / log_mod;
    r.lhs = q_inf * (1.0 + term * term);
    r.rhs = 2.0 * period * std::log(static_cast<double>(d)) / log_mod;
    r.slack = r.rhs - r.lhs;
    r.violation = r.lhs > r.rhs * (1.0 + 1e-12);
    return r;
}

std::vector<std::uint8_t> escape_mask(const RationalMap& f, const std::vector<SpherePoint>& values, int max_iterations,
                                      unsigned threads) {
    const double radius = f.escape_radius();
    std::vector<std::uint8_t> out(values.size(), 0);
    parallel_for(values.size(), threads, [&](std::size_t i) {
        SpherePoint z = values[i];
        for (int k = 0; k <= max_iterations; ++k) {
            if (z.is_infinity() || std::abs(z.value()) > radius) {
                out[i] = 1;
                return;
            }
            z = f(z);
        }
    });
    return out;
}

std::vector<std::uint8_t> julia_classes(const SchroederSeries& s, const Grid& grid, int max_iterations,
                                        unsigned threads) {
    const RationalMap& f = s.map();
    const double radius = f.escape_radius();
    const double threshold = std::max(grid.dx(), grid.dy());
    std::vector<std::uint8_t> out(grid.size(), 0);
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const Cplx w = grid.center(i);
        const SpherePoint hz = evaluate_h(s, w);
        if (hz.is_infinity()) {
            out[i] = 2;
            return;
        }
        Cplx z = hz.value();
        Cplx dz = h_derivative(s, w);
        bool escaped = false;
        for (int k = 0; k <= max_iterations + 64; ++k) {
            const double m = std::abs(z);
            if (m > 1e8 || !std::isfinite(m)) {
                escaped = true;
                break;
            }
            if (k > max_iterations && m <= radius) {
                break;
            }
            dz *= f.derivative(z);
            z = f(SpherePoint(z)).value();
        }
        if (!escaped) {
            out[i] = 0;
            return;
        }
        const double m = std::abs(z);
        const double dm = std::abs(dz);
        const double distance = std::isfinite(m) && std::isfinite(dm) && dm > 0.0 ? m * std::log(m) / dm : 0.0;
        out[i] = distance > threshold ? 2 : 1;
    });
    return out;
}

bool el_heuristic(const Grid& grid, const std::vector<std::uint8_t>& classes) {
    std::vector<std::uint8_t> near_julia(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        near_julia[i] = classes[i] < 2 ? 1 : 0;
    }
    const auto origin = grid.locate({0.0, 0.0});
    if (!origin) {
        return false;
    }
    const Labeling lab = label_components(grid, near_julia, 1);
    const int col = static_cast<int>(*origin % static_cast<std::size_t>(grid.nx()));
    const int row = static_cast<int>(*origin / static_cast<std::size_t>(grid.nx()));
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            const int c = col + dc;
            const int r = row + dr;
            if (c < 0 || r < 0 || c >= grid.nx() || r >= grid.ny()) {
                continue;
            }
            const int id = lab.labels[grid.index(c, r)];
            if (id >= 0 && lab.components[static_cast<std::size_t>(id)].touches_boundary) {
                return true;
            }
        }
    }
    return false;
}

namespace {

struct AnnulusLevel {
    Grid grid;
    Labeling labels;
    double outer = 0.0;
    double hole = 0.0;
    std::vector<bool> touches_hole;
};

AnnulusLevel annulus_level(const Grid& grid, const std::vector<std::uint8_t>& classes, double outer, double hole) {
    std::vector<std::uint8_t> mask(grid.size(), 0);
    std::vector<std::uint8_t> rim(grid.size(), 0);
    const double pad = 1.5 * grid.dx();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = std::abs(grid.center(i));
        if (classes[i] == 2 && m > hole && m <= outer) {
            mask[i] = 1;
            rim[i] = m > outer - pad ? 1 : 0;
        }
    }
    AnnulusLevel out{grid, label_components(grid, mask, 64, &rim), outer, hole, {}};
    out.touches_hole.assign(out.labels.components.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (out.labels.labels[i] >= 0 && std::abs(grid.center(i)) < hole + pad) {
            out.touches_hole[static_cast<std::size_t>(out.labels.labels[i])] = true;
        }
    }
    return out;
}

int majority_container(const Labeling& level, const std::vector<Cplx>& samples) {
    std::map<int, int> votes;
    for (const auto& w : samples) {
        const int id = level.label_at(w);
        if (id >= 0) {
            ++votes[id];
        }
    }
    int best = -1;
    int most = 0;
    for (const auto& [id, v] : votes) {
        if (v > most) {
            best = id;
            most = v;
        }
    }
    return best;
}

bool interior_pixel(const Labeling& lab, std::size_t i, int id, int margin) {
    const Grid& g = lab.grid;
    const int col = static_cast<int>(i % static_cast<std::size_t>(g.nx()));
    const int row = static_cast<int>(i / static_cast<std::size_t>(g.nx()));
    for (int dr = -margin; dr <= margin; ++dr) {
        for (int dc = -margin; dc <= margin; ++dc) {
            const int c = col + dc;
            const int r = row + dr;
            if (c < 0 || r < 0 || c >= g.nx() || r >= g.ny() || lab.labels[g.index(c, r)] != id) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

BasinReport basin_components_of_infinity(const SchroederSeries& s, const BasinOptions& options) {
    const RationalMap& f = s.map();
    if (!f.is_polynomial()) {
        throw PreconditionError("basin of infinity analysis needs a polynomial map");
    }
    if (options.grid < 64 || options.grid > 8192) {
        throw PreconditionError("basin grid must lie in [64, 8192]");
    }
    BasinReport rep;
    const Cplx lambda = s.lambda();
    const double rho = valiron_order(f.degree(), s.period(), lambda);
    rep.cap = dca_budget(rho, true).direct;
    const double R = options.half_width > 0.0 ? options.half_width : 2.0 * s.safe_radius();
    rep.half_width = R;
    std::vector<AnnulusLevel> levels;
    for (int L = 0; L < 3; ++L) {
        const double half = R * std::ldexp(1.0, L);
        const Grid grid(Box::square(half), options.grid);
        const auto classes = julia_classes(s, grid, options.max_iterations, options.threads);
        if (L == 0) {
            rep.el_condition = el_heuristic(grid, classes);
        }
        levels.push_back(annulus_level(grid, classes, half, half * options.hole_fraction));
    }

    // Components reaching from the hole to the rim at every scale.
    std::vector<int> ws;
    const auto& base = levels[0];
    for (const auto& c : base.labels.components) {
        if (!c.touches_boundary || !base.touches_hole[static_cast<std::size_t>(c.id)]) {
            continue;
        }
        int top = -1;
        bool persistent = true;
        for (std::size_t L = 1; L < levels.size() && persistent; ++L) {
            top = majority_container(levels[L].labels, c.samples);
            persistent = top >= 0 && levels[L].labels.components[static_cast<std::size_t>(top)].touches_boundary;
        }
        if (persistent && std::find(ws.begin(), ws.end(), top) == ws.end()) {
            ws.push_back(top);
        }
    }
    std::sort(ws.begin(), ws.end());
    rep.q_inf = static_cast<int>(ws.size());
    rep.artifact = rep.q_inf > rep.cap;
    if (rep.q_inf == 0) {
        rep.diagnostics.push_back("no persistent component of the escaping set was found");
        return rep;
    }

    // Lambda action on the largest box.
    const AnnulusLevel& big = levels.back();
    const double lam = std::abs(lambda);
    const double lo = big.hole * 1.05;
    const double hi = big.outer * 0.95 / lam;
    std::vector<int> sigma(ws.size(), -1);
    for (std::size_t k = 0; k < ws.size(); ++k) {
        std::map<int, int> votes;
        for (std::size_t i : big.labels.pixels_of(ws[k])) {
            const Cplx w = big.grid.center(i);
            const double m = std::abs(w);
            if (m < lo || m > hi) {
                continue;
            }
            const int id = big.labels.label_at(lambda * w);
            const auto it = std::find(ws.begin(), ws.end(), id);
            if (it != ws.end()) {
                ++votes[static_cast<int>(it - ws.begin())];
            }
        }
        int most = 0;
        for (const auto& [j, v] : votes) {
            if (v > most) {
                most = v;
                sigma[k] = j;
            }
        }
    }
    std::vector<int> hit(ws.size(), 0);
    bool bijective = true;
    for (int j : sigma) {
        if (j < 0 || ++hit[static_cast<std::size_t>(j)] > 1) {
            bijective = false;
        }
    }
    if (!bijective) {
        rep.diagnostics.push_back("lambda does not permute the components");
        return rep;
    }
    std::vector<int> cycle_length(ws.size(), 0);
    for (std::size_t k = 0; k < ws.size(); ++k) {
        int len = 1;
        for (int j = sigma[k]; j != static_cast<int>(k); j = sigma[static_cast<std::size_t>(j)]) {
            ++len;
        }
        cycle_length[k] = len;
    }
    rep.q = cycle_length[0];
    if (std::any_of(cycle_length.begin(), cycle_length.end(), [&](int l) { return l != rep.q; })) {
        rep.diagnostics.push_back("lambda cycles of components have different lengths");
        return rep;
    }
    rep.m_inf = rep.q_inf / rep.q;

    // Asymptotic arcs and first crossings of the reference circle.
    const double lam_q = std::pow(lam, rep.q);
    rep.reference_radius = std::sqrt(lo * big.outer * 0.95);
    const double w_lo = std::max(lo, rep.reference_radius / lam_q);
    const double w_hi = std::min(rep.reference_radius, big.outer * 0.95 / lam_q);
    Cplx lambda_q{1.0, 0.0};
    for (int i = 0; i < rep.q; ++i) {
        lambda_q *= lambda;
    }
    std::vector<BasinComponent> comps(ws.size());
    for (std::size_t k = 0; k < ws.size(); ++k) {
        comps[k].id = ws[k];
        if (!(w_lo < w_hi)) {
            continue;
        }
        const double aim = std::sqrt(w_lo * w_hi);
        double best_gap = std::numeric_limits<double>::infinity();
        std::optional<std::size_t> start;
        for (int margin : {2, 1, 0}) {
            for (std::size_t i : big.labels.pixels_of(ws[k])) {
                const Cplx w = big.grid.center(i);
                const double m = std::abs(w);
                if (m < w_lo || m > w_hi || !interior_pixel(big.labels, i, ws[k], margin)) {
                    continue;
                }
                const auto j = big.grid.locate(lambda_q * w);
                if (!j || !interior_pixel(big.labels, *j, ws[k], margin)) {
                    continue;
                }
                const double gap = std::abs(std::log(m / aim));
                if (gap < best_gap) {
                    best_gap = gap;
                    start = i;
                }
            }
            if (start) {
                break;
            }
        }
        if (!start) {
            continue;
        }
        const ArcTrace arc =
            trace_asymptotic_arc(big.labels, ws[k], big.grid.center(*start), lambda, rep.q, options.max_log_modulus);
        for (std::size_t i = 1; i <= arc.period_samples && i < arc.points.size(); ++i) {
            const double m0 = std::abs(arc.points[i - 1]);
            const double m1 = std::abs(arc.points[i]);
            if (m0 < rep.reference_radius && m1 >= rep.reference_radius) {
                const double u = (rep.reference_radius - m0) / (m1 - m0);
                comps[k].crossing = arc.points[i - 1] + u * (arc.points[i] - arc.points[i - 1]);
                comps[k].crossing_t = arc.t[i - 1] + u * (arc.t[i] - arc.t[i - 1]);
                comps[k].crossing_angle = std::arg(comps[k].crossing);
                if (comps[k].crossing_angle < 0.0) {
                    comps[k].crossing_angle += kTwoPi;
                }
                comps[k].traced = true;
                break;
            }
        }
        if (k == 0) {
            rep.arc = arc;
        }
    }
    if (!std::all_of(comps.begin(), comps.end(), [](const BasinComponent& c) { return c.traced; })) {
        rep.diagnostics.push_back("could not trace an asymptotic arc in every component");
        return rep;
    }

    // Cyclic order by first crossing angle, ties broken by crossing parameter.
    std::vector<std::size_t> order(ws.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (comps[a].crossing_angle != comps[b].crossing_angle) {
            return comps[a].crossing_angle < comps[b].crossing_angle;
        }
        return std::abs(comps[a].crossing_t) < std::abs(comps[b].crossing_t);
    });
    std::vector<std::size_t> position(ws.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        position[order[j]] = j;
    }
    const int qi = rep.q_inf;
    rep.p_inf = static_cast<int>((position[static_cast<std::size_t>(sigma[order[0]])] + ws.size() - 0) % ws.size());
    rep.consistent = true;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto image = position[static_cast<std::size_t>(sigma[order[j]])];
        if (static_cast<int>(image) != static_cast<int>((j + static_cast<std::size_t>(rep.p_inf)) % ws.size())) {
            rep.consistent = false;
        }
    }
    if (!rep.consistent) {
        rep.diagnostics.push_back("lambda does not act as a rotation of the cyclic order");
    }
    for (std::size_t j = 0; j < order.size(); ++j) {
        BasinComponent c = comps[order[j]];
        c.image = static_cast<int>(position[static_cast<std::size_t>(sigma[order[j]])]);
        rep.components.push_back(c);
    }
    if (rep.p_inf % rep.m_inf != 0) {
        rep.consistent = false;
        rep.diagnostics.push_back("p_inf is not divisible by m_inf");
    }
    rep.p = rep.p_inf / rep.m_inf;

    // The arc's own argument increment over one period.
    const auto& arc = rep.arc;
    const double delta = arc.arg[arc.period_samples] - arc.arg[0];
    const double principal = std::arg(lambda);
    const long p_arc = std::lround((rep.q * principal - delta) / kTwoPi);
    rep.p_arc = static_cast<int>(((p_arc % rep.q) + rep.q) % rep.q);
    if (rep.p_arc != rep.p % rep.q) {
        rep.diagnostics.push_back("arc winding disagrees with the lambda action");
    }
    rep.spiral = spiral_term(rep.arc);
    rep.spiral_closed = spiral_closed_form(rep.q, rep.p, lambda);
    rep.ply = ply_check(qi, rep.p, rep.q, lambda, f.degree(), s.period());
    rep.ply.p_inf = rep.p_inf;
    rep.ply.m_inf = rep.m_inf;
    rep.ply.el_condition = rep.el_condition;
    return rep;
}

nlohmann::ordered_json ply_json(const PlyReport& r, bool accepted) {
    nlohmann::ordered_json j;
    j["q_inf"] = r.q_inf;
    j["p_inf"] = r.p_inf;
    j["m_inf"] = r.m_inf;
    j["q"] = r.q;
    j["p"] = r.p;
    j["arg_branch"] = r.arg_branch;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["violation"] = r.violation;
    j["el_condition"] = r.el_condition;
    j["accepted"] = accepted;
    return j;
}

} // namespace schroeder
