#include "schroeder/unhyp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "schroeder/grid.hpp"
#include "schroeder/parallel.hpp"

namespace schroeder {

OrbitData critical_orbit(const RationalMap& f, const SpherePoint& c, std::size_t k_max, double tail_fraction) {
    if (k_max > kOrbitBudget) {
        throw BudgetError("orbit length " + std::to_string(k_max) + " exceeds budget");
    }
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
        throw PreconditionError("tail fraction must lie in (0, 1]");
    }
    OrbitData out;
    out.c = c;
    out.samples.reserve(k_max + 1);
    out.samples.push_back(c);
    const double escape = f.is_polynomial() ? f.escape_radius() : 0.0;
    SpherePoint z = c;
    for (std::size_t k = 1; k <= k_max; ++k) {
        z = f(z);
        out.samples.push_back(z);
        if (f.is_polynomial() && c.is_finite() && (z.is_infinity() || std::abs(z.value()) > escape)) {
            out.escaped = true;
            out.escape_step = k;
            break;
        }
    }
    const auto n = out.samples.size();
    out.tail_begin = std::min(n - 1, static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - tail_fraction))));
    return out;
}

OmegaLimitApprox omega_limit(const OrbitData& orbit, double epsilon, std::size_t min_count) {
    OmegaLimitApprox out;
    out.owner = orbit.c;
    if (orbit.escaped) {
        out.clusters.push_back({SpherePoint::infinity(), 0.0, 1});
        out.recurrent = orbit.c.is_infinity();
        return out;
    }
    std::vector<Cluster> all;
    for (std::size_t k = orbit.tail_begin; k < orbit.samples.size(); ++k) {
        const SpherePoint& z = orbit.samples[k];
        bool placed = false;
        for (auto& cl : all) {
            const double d = chordal_distance(cl.center, z);
            if (d < epsilon) {
                cl.radius = std::max(cl.radius, d);
                ++cl.count;
                placed = true;
                break;
            }
        }
        if (!placed) {
            all.push_back({z, 0.0, 1});
        }
    }
    for (auto& cl : all) {
        if (cl.count >= min_count) {
            out.clusters.push_back(cl);
        }
    }
    for (const auto& cl : out.clusters) {
        if (chordal_distance(cl.center, orbit.c) < epsilon) {
            out.recurrent = true;
        }
    }
    return out;
}

namespace {

std::vector<SpherePoint> disk_samples(const SpherePoint& z, const JuliaTestOptions& o) {
    std::vector<SpherePoint> pts{z};
    const Chart chart = natural_chart(z);
    const Cplx t = chart_coordinate(z, chart);
    // chordal epsilon ~ euclidean epsilon (1 + |t|^2) in the chart
    const double rad = o.epsilon * (1.0 + std::norm(t));
    for (double scale : {1.0, 0.5}) {
        for (int i = 0; i < o.ring; ++i) {
            const double th = 2.0 * M_PI * (i + 0.5 * (scale < 1.0)) / o.ring;
            pts.push_back(from_chart(t + scale * rad * Cplx(std::cos(th), std::sin(th)), chart));
        }
    }
    return pts;
}

} // namespace

bool in_julia_set(const RationalMap& f, const SpherePoint& z, const JuliaTestOptions& options) {
    const auto pts = disk_samples(z, options);
    if (f.is_polynomial()) {
        if (z.is_infinity()) {
            return false;
        }
        const double escape = f.escape_radius();
        bool any_escape = false;
        bool any_bounded = false;
        for (const auto& p0 : pts) {
            SpherePoint w = p0;
            bool escaped = false;
            for (int k = 0; k < options.max_iterations; ++k) {
                if (w.is_infinity() || std::abs(w.value()) > escape) {
                    escaped = true;
                    break;
                }
                w = f(w);
            }
            any_escape = any_escape || escaped;
            any_bounded = any_bounded || !escaped;
            if (any_escape && any_bounded) {
                return true;
            }
        }
        return false;
    }
    const double limit = std::log(10.0 / options.epsilon);
    const int steps = std::min(options.max_iterations, 500);
    for (const auto& p0 : pts) {
        SpherePoint w = p0;
        double log_growth = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double s = f.spherical_derivative(w);
            if (!(s > 0.0)) {
                break;
            }
            log_growth += std::log(s);
            if (log_growth > limit) {
                return true;
            }
            w = f(w);
        }
    }
    return false;
}

ManeSetApprox mane_set_approx(const RationalMap& f, std::size_t k_max, double epsilon, unsigned threads) {
    std::vector<SpherePoint> crit;
    for (const auto& c : critical_points(f)) {
        const bool seen = std::any_of(crit.begin(), crit.end(),
                                      [&](const SpherePoint& q) { return chordal_distance(q, c.point) < 1e-9; });
        if (!seen) {
            crit.push_back(c.point);
        }
    }
    ManeSetApprox out;
    out.critical.resize(crit.size());
    JuliaTestOptions jt;
    jt.epsilon = epsilon;
    parallel_for(crit.size(), threads, [&](std::size_t i) {
        ManeContribution m;
        m.critical = crit[i];
        m.omega = omega_limit(critical_orbit(f, crit[i], k_max), epsilon);
        m.in_julia = in_julia_set(f, crit[i], jt);
        out.critical[i] = std::move(m);
    });
    for (const auto& m : out.critical) {
        if (!m.in_julia || !m.omega.recurrent) {
            continue;
        }
        for (const auto& cl : m.omega.clusters) {
            const bool dup = std::any_of(out.points.begin(), out.points.end(), [&](const Cluster& q) {
                return chordal_distance(q.center, cl.center) < epsilon;
            });
            if (!dup) {
                out.points.push_back(cl);
            }
        }
    }
    return out;
}

namespace {

constexpr double kSeamInner = 0.85;
constexpr double kSeamOuter = 1.0 / kSeamInner;

struct CriticalSite {
    SpherePoint z;
    int multiplicity;
};

int local_degree(const std::vector<CriticalSite>& crit, const SpherePoint& z) {
    for (const auto& c : crit) {
        if (chordal_distance(c.z, z) < 1e-6) {
            return c.multiplicity + 1;
        }
    }
    return 1;
}

void add_distinct(std::vector<SpherePoint>& set, const SpherePoint& z, double tol) {
    for (const auto& q : set) {
        if (chordal_distance(q, z) < tol) {
            return;
        }
    }
    set.push_back(z);
}

// Solutions of f(w) = y, snapping near-multiple roots onto the critical
// point they split from.
std::vector<SpherePoint> distinct_preimages(const RationalMap& f, const std::vector<CriticalSite>& crit,
                                            const SpherePoint& y) {
    std::vector<SpherePoint> out;
    for (auto w : f.preimages(y)) {
        for (const auto& c : crit) {
            if (chordal_distance(f(c.z), y) < 1e-9 && chordal_distance(c.z, w) < 1e-3) {
                w = c.z;
                break;
            }
        }
        add_distinct(out, w, 1e-7);
    }
    return out;
}

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }
};

} // namespace

ProbeReport semihyperbolicity_probe(const RationalMap& f, const SpherePoint& a, const ProbeOptions& options) {
    if (!(options.r > 0.0) || options.r >= 1.0) {
        throw PreconditionError("probe radius must lie in (0, 1)");
    }
    if (options.k_max < 1) {
        throw PreconditionError("probe depth must be positive");
    }
    if (options.grid < 8 || options.grid > 8192) {
        throw PreconditionError("probe grid must lie in [8, 8192]");
    }
    ProbeReport out;
    out.a = a;
    out.r = options.r;

    std::vector<CriticalSite> crit;
    for (const auto& c : critical_points(f)) {
        crit.push_back({c.point, c.multiplicity});
    }
    // layers[j]: distinct points of f^{-j}(C(f))
    std::vector<std::vector<SpherePoint>> layers(1);
    for (const auto& c : crit) {
        add_distinct(layers[0], c.z, 1e-9);
    }
    std::size_t total = layers[0].size();

    const Grid grid(Box::square(1.25), options.grid); // charts overlap on 0.8 < |t| < 1.25
    const Chart charts[2] = {Chart::Zero, Chart::Infinity};
    std::vector<SpherePoint> values[2];
    for (int ch = 0; ch < 2; ++ch) {
        values[ch].resize(grid.size());
        parallel_for(grid.size(), options.threads,
                     [&](std::size_t i) { values[ch][i] = from_chart(grid.center(i), charts[ch]); });
    }

    for (int k = 1; k <= options.k_max; ++k) {
        for (int ch = 0; ch < 2; ++ch) {
            parallel_for(grid.size(), options.threads, [&](std::size_t i) { values[ch][i] = f(values[ch][i]); });
        }
        if (k >= 2) {
            std::vector<SpherePoint> next;
            for (const auto& y : layers.back()) {
                for (const auto& w : distinct_preimages(f, crit, y)) {
                    add_distinct(next, w, 1e-7);
                }
            }
            total += next.size();
            if (total > options.preimage_budget) {
                throw BudgetError("critical preimage count exceeds budget at depth " + std::to_string(k));
            }
            layers.push_back(std::move(next));
        }
        // critical points of f^k lying over U_r(a), with local degree of f^k
        std::vector<SpherePoint> sites;
        for (const auto& layer : layers) {
            for (const auto& z : layer) {
                add_distinct(sites, z, 1e-7);
            }
        }
        std::vector<std::pair<SpherePoint, int>> over;
        for (const auto& z : sites) {
            SpherePoint w = z;
            int deg = 1;
            for (int i = 0; i < k; ++i) {
                deg *= local_degree(crit, w);
                w = f(w);
            }
            if (deg > 1 && chordal_distance(w, a) < options.r) {
                over.emplace_back(z, deg);
            }
        }

        std::vector<std::uint8_t> masks[2] = {preimage_mask(values[0], a, options.r),
                                              preimage_mask(values[1], a, options.r)};
        for (auto& m : masks) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(grid.center(i)) > kSeamOuter) {
                    m[i] = 0;
                }
            }
        }
        Labeling labs[2] = {label_components(grid, masks[0], 1), label_components(grid, masks[1], 1)};
        const int offset = static_cast<int>(labs[0].components.size());
        Dsu dsu(labs[0].components.size() + labs[1].components.size());
        for (int ch = 0; ch < 2; ++ch) {
            const Labeling& here = labs[ch];
            const Labeling& there = labs[1 - ch];
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const int id = here.labels[i];
                if (id < 0) {
                    continue;
                }
                const Cplx t = grid.center(i);
                if (std::abs(t) < kSeamInner) {
                    continue;
                }
                const int other = there.label_at(1.0 / t);
                if (other >= 0) {
                    dsu.unite(ch == 0 ? id : id + offset, ch == 0 ? other + offset : other);
                }
            }
        }
        std::vector<int> roots;
        for (int g = 0; g < static_cast<int>(dsu.parent.size()); ++g) {
            if (dsu.find(g) == g) {
                roots.push_back(g);
            }
        }

        std::vector<int> extra(dsu.parent.size(), 0);
        bool resolved = true;
        for (const auto& [z, deg] : over) {
            const int ch = natural_chart(z) == Chart::Zero ? 0 : 1;
            const int id = labs[ch].label_at(chart_coordinate(z, charts[ch]));
            if (id < 0) {
                resolved = false;
                break;
            }
            extra[static_cast<std::size_t>(dsu.find(ch == 0 ? id : id + offset))] += deg - 1;
        }
        // f^{-k}(U) is never empty, so an empty mask means every component fell below pixel size
        if (!resolved || roots.empty()) {
            out.partial = true;
            break;
        }
        const int degree = 1 + *std::max_element(extra.begin(), extra.end());
        out.degrees.push_back(degree);
        out.components.push_back(roots.size());
        out.critical_points.push_back(over.size());
        out.depth = k;
        out.max_degree = std::max(out.max_degree, degree);
    }
    if (out.degrees.size() >= 2) {
        out.grows = out.degrees.back() > out.degrees[(out.degrees.size() - 1) / 2];
    }
    return out;
}

DynamicsSummary summarize_dynamics(const RationalMap& f, int max_period, std::size_t k_max, double epsilon,
                                   unsigned threads) {
    DynamicsSummary out;
    long long dp = 1;
    for (int p = 1; p <= max_period; ++p) {
        dp *= f.degree();
        if (dp > kPeriodicBudget) {
            break;
        }
        for (const auto& pt : periodic_points(f, p)) {
            switch (pt.kind) {
            case PeriodicClass::Superattracting:
            case PeriodicClass::Attracting:
                out.attracting.push_back(pt.z);
                break;
            case PeriodicClass::Parabolic:
                out.parabolic.push_back(pt.z);
                break;
            case PeriodicClass::IndifferentUndetermined:
                out.indifferent.push_back(pt.z);
                break;
            case PeriodicClass::Repelling:
                break;
            }
        }
    }
    for (const auto& cl : mane_set_approx(f, k_max, epsilon, threads).points) {
        out.mane.push_back(cl.center);
    }
    return out;
}

nlohmann::ordered_json unhyp_json(const ManeSetApprox& mane, const ProbeReport* probe) {
    nlohmann::ordered_json j;
    auto cluster_json = [](const Cluster& c) {
        nlohmann::ordered_json x;
        x["point"] = sphere_point_json(c.center);
        x["radius"] = c.radius;
        x["count"] = c.count;
        return x;
    };
    nlohmann::ordered_json crit = nlohmann::ordered_json::array();
    nlohmann::ordered_json omega = nlohmann::ordered_json::array();
    for (const auto& m : mane.critical) {
        nlohmann::ordered_json c;
        c["point"] = sphere_point_json(m.critical);
        c["in_julia"] = m.in_julia;
        c["recurrent"] = m.omega.recurrent;
        crit.push_back(c);
        nlohmann::ordered_json o = nlohmann::ordered_json::array();
        for (const auto& cl : m.omega.clusters) {
            o.push_back(cluster_json(cl));
        }
        omega.push_back(o);
    }
    j["critical_points"] = crit;
    j["omega"] = omega;
    nlohmann::ordered_json m = nlohmann::ordered_json::array();
    for (const auto& cl : mane.points) {
        m.push_back(cluster_json(cl));
    }
    j["mane"] = m;
    if (probe != nullptr) {
        nlohmann::ordered_json p;
        p["a"] = sphere_point_json(probe->a);
        p["r"] = probe->r;
        p["degrees"] = probe->degrees;
        p["components"] = probe->components;
        p["depth"] = probe->depth;
        p["partial"] = probe->partial;
        p["grows"] = probe->grows;
        p["max_degree"] = probe->max_degree;
        j["probe"] = p;
    }
    return j;
}

} // namespace schroeder
