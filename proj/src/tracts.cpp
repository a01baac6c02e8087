#include "schroeder/tracts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace schroeder {

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Direct:
        return "direct";
    case Verdict::Indirect:
        return "indirect";
    case Verdict::NotASingularity:
        return "not-a-singularity";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

std::string_view to_string(CoverVerdict v) {
    switch (v) {
    case CoverVerdict::CoversCompletely:
        return "covers-completely";
    case CoverVerdict::UnboundedTractFound:
        return "unbounded-tract-found";
    case CoverVerdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

std::vector<std::uint8_t> preimage_mask(const std::vector<SpherePoint>& values, const SpherePoint& a, double r) {
    std::vector<std::uint8_t> mask(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        mask[i] = chordal_distance(values[i], a) < r ? 1 : 0;
    }
    return mask;
}

Labeling preimage_components(const SphereFunction& h, const SpherePoint& a, double r, double half_width, int n,
                             unsigned threads) {
    const Grid grid(Box::square(half_width), n);
    return label_components(grid, preimage_mask(sample(h, grid, threads), a, r));
}

std::size_t TractFamily::count(Verdict v) const {
    return static_cast<std::size_t>(
        std::count_if(chains.begin(), chains.end(), [v](const TractChain& c) { return c.verdict == v; }));
}

namespace {

// Component of `level` containing most of the samples, or -1.
int container(const Labeling& level, const std::vector<Cplx>& samples) {
    std::map<int, int> votes;
    for (const auto& w : samples) {
        const int id = level.label_at(w);
        if (id >= 0) {
            ++votes[id];
        }
    }
    int best = -1;
    int best_votes = 0;
    for (const auto& [id, v] : votes) {
        if (v > best_votes) {
            best = id;
            best_votes = v;
        }
    }
    return best;
}

bool persistent_contact(const std::vector<Labeling>& levels, int id) {
    const Component& c = levels[0].components[static_cast<std::size_t>(id)];
    if (!c.touches_boundary) {
        return false;
    }
    for (std::size_t L = 1; L < levels.size(); ++L) {
        const int up = container(levels[L], c.samples);
        if (up < 0 || !levels[L].components[static_cast<std::size_t>(up)].touches_boundary) {
            return false;
        }
    }
    return true;
}

struct LevelData {
    std::vector<Grid> grids;
    std::vector<std::vector<SpherePoint>> values;
};

LevelData sample_levels(const SphereFunction& h, const TractOptions& o) {
    if (o.grid < 16 || o.grid > 8192) {
        throw PreconditionError("tract grid must lie in [16, 8192]");
    }
    if (o.box_levels < 1 || !(o.half_width > 0.0)) {
        throw PreconditionError("tract boxes need a positive half-width and at least one level");
    }
    LevelData out;
    for (int L = 0; L < o.box_levels; ++L) {
        out.grids.emplace_back(Box::square(o.half_width * std::ldexp(1.0, L)), o.grid);
        out.values.push_back(sample(h, out.grids.back(), o.threads));
    }
    return out;
}

} // namespace

TractFamily compute_tract_family(const SphereFunction& h, const SpherePoint& a, const TractOptions& options) {
    if (options.radii.size() < 3) {
        throw PreconditionError("tract family needs at least three rungs");
    }
    for (std::size_t i = 0; i < options.radii.size(); ++i) {
        if (!(options.radii[i] > 0.0) || (i > 0 && !(options.radii[i] < options.radii[i - 1]))) {
            throw PreconditionError("rung radii must be positive and strictly decreasing");
        }
    }
    TractFamily fam;
    fam.a = a;
    fam.options = options;
    LevelData levels = sample_levels(h, options);
    const std::size_t rungs = options.radii.size();
    for (std::size_t i = 0; i < rungs; ++i) {
        std::vector<Labeling> per_level;
        for (std::size_t L = 0; L < levels.grids.size(); ++L) {
            per_level.push_back(label_components(levels.grids[L], preimage_mask(levels.values[L], a, options.radii[i])));
        }
        std::vector<bool> unbounded(per_level[0].components.size());
        for (std::size_t c = 0; c < unbounded.size(); ++c) {
            unbounded[c] = persistent_contact(per_level, static_cast<int>(c));
        }
        std::vector<int> parent(per_level[0].components.size(), -1);
        if (i > 0) {
            for (std::size_t c = 0; c < parent.size(); ++c) {
                parent[c] = fam.masks[i - 1][0].labels[per_level[0].components[c].seed];
            }
        }
        fam.masks.push_back(std::move(per_level));
        fam.unbounded.push_back(std::move(unbounded));
        fam.nesting.push_back(std::move(parent));
    }
    fam.values = std::move(levels.values[0]);
    const std::size_t deep = rungs - 1;
    // pieces of one tract that only join outside the smallest box
    const Labeling& widest = fam.masks[deep].back();
    std::vector<int> joined;
    for (std::size_t c = 0; c < fam.unbounded[deep].size(); ++c) {
        if (!fam.unbounded[deep][c]) {
            continue;
        }
        const int top = container(widest, fam.masks[deep][0].components[c].samples);
        if (top >= 0 && std::find(joined.begin(), joined.end(), top) != joined.end()) {
            continue;
        }
        joined.push_back(top);
        TractChain chain;
        chain.components.assign(rungs, -1);
        int id = static_cast<int>(c);
        for (std::size_t i = deep + 1; i-- > 0;) {
            chain.components[i] = id;
            if (id < 0 || !fam.unbounded[i][static_cast<std::size_t>(id)]) {
                chain.verdict = Verdict::Inconclusive;
                chain.diagnostics = "nesting unstable: rung " + std::to_string(i) + " component is not unbounded";
                fam.stable = false;
            }
            if (i > 0 && id >= 0) {
                id = fam.nesting[i][static_cast<std::size_t>(id)];
            }
        }
        fam.chains.push_back(std::move(chain));
    }
    classify_singularity(fam, h);
    return fam;
}

void classify_singularity(TractFamily& family, const SphereFunction& h) {
    const std::size_t rungs = family.masks.size();
    for (auto& chain : family.chains) {
        if (!chain.diagnostics.empty()) {
            continue;
        }
        chain.solution_counts.assign(rungs, 0);
        chain.innermost_solution.assign(rungs, std::numeric_limits<double>::infinity());
        for (std::size_t i = rungs; i-- > 0;) {
            const auto sols = find_solutions(h, family.a, family.masks[i][0], chain.components[i], family.values,
                                             family.options.solve);
            chain.solution_counts[i] = sols.size();
            for (const auto& s : sols) {
                chain.innermost_solution[i] = std::min(chain.innermost_solution[i], std::abs(s.w));
            }
            if (i + 1 == rungs && sols.empty()) {
                break;
            }
        }
        const double deepest = chain.innermost_solution[rungs - 1];
        const double top = chain.innermost_solution[0];
        if (chain.solution_counts[rungs - 1] == 0) {
            chain.verdict = Verdict::Direct;
        } else if (deepest > top * (1.0 + 1e-9)) {
            chain.verdict = Verdict::Indirect;
        } else {
            chain.verdict = Verdict::NotASingularity;
            chain.diagnostics = "a solution of h(w) = a stays trapped in every rung";
        }
    }
}

LambdaAction lambda_action(const TractFamily& source, const TractFamily& target, Cplx lambda) {
    LambdaAction out;
    const std::size_t rungs_t = target.masks.size();
    const Box& target_box = target.masks[0][0].grid.box();
    bool any_in_box = false;
    for (const auto& chain : source.chains) {
        std::vector<int> votes(target.chains.size(), 0);
        // deepest rung first; climb when lambda pushes it out of the box
        for (std::size_t rung = source.masks.size(); rung-- > 0;) {
            const Labeling& lab = source.masks[rung][0];
            const auto pixels = lab.pixels_of(chain.components[rung]);
            const std::size_t stride = std::max<std::size_t>(1, pixels.size() / 4096);
            bool landed = false;
            for (std::size_t k = 0; k < pixels.size(); k += stride) {
                const Cplx w = lambda * lab.grid.center(pixels[k]);
                if (!target_box.contains(w)) {
                    continue;
                }
                landed = true;
                for (std::size_t j = rungs_t; j-- > 0;) {
                    const int id = target.masks[j][0].label_at(w);
                    if (id < 0) {
                        continue;
                    }
                    const auto hit = std::find_if(target.chains.begin(), target.chains.end(),
                                                  [&](const TractChain& t) { return t.components[j] == id; });
                    if (hit != target.chains.end()) {
                        ++votes[static_cast<std::size_t>(hit - target.chains.begin())];
                        break;
                    }
                }
            }
            if (landed) {
                any_in_box = true;
                break;
            }
        }
        int best = -1;
        for (std::size_t t = 0; t < votes.size(); ++t) {
            if (votes[t] > 0 && (best < 0 || votes[t] > votes[static_cast<std::size_t>(best)])) {
                best = static_cast<int>(t);
            }
        }
        out.image.push_back(best);
    }
    if (!source.chains.empty() && !any_in_box) {
        throw PreconditionError("lambda moves every deepest-rung pixel out of the box; enlarge the box");
    }
    std::vector<int> hits(target.chains.size(), 0);
    bool total = true;
    for (int t : out.image) {
        if (t < 0) {
            total = false;
            continue;
        }
        if (++hits[static_cast<std::size_t>(t)] > 1) {
            out.injective = false;
        }
    }
    out.permutation = &source == &target && out.injective && total;
    if (out.permutation) {
        std::vector<bool> seen(out.image.size(), false);
        for (std::size_t i = 0; i < out.image.size(); ++i) {
            if (seen[i]) {
                continue;
            }
            std::vector<int> cycle;
            for (auto j = i; !seen[j]; j = static_cast<std::size_t>(out.image[j])) {
                seen[j] = true;
                cycle.push_back(static_cast<int>(j));
            }
            out.cycles.push_back(std::move(cycle));
        }
    }
    return out;
}

CoverReport complete_covering_probe(const SphereFunction& h, const SpherePoint& a, const TractOptions& options) {
    if (options.radii.empty()) {
        throw PreconditionError("covering probe needs at least one radius");
    }
    const LevelData levels = sample_levels(h, options);
    CoverReport report;
    bool all_unbounded = true;
    bool some_bounded = false;
    for (double r : options.radii) {
        std::vector<Labeling> per_level;
        for (std::size_t L = 0; L < levels.grids.size(); ++L) {
            per_level.push_back(label_components(levels.grids[L], preimage_mask(levels.values[L], a, r)));
        }
        CoverRung rung;
        rung.r = r;
        rung.components = per_level[0].components.size();
        std::vector<bool> explained(per_level.back().components.size(), false);
        for (std::size_t c = 0; c < per_level[0].components.size(); ++c) {
            if (persistent_contact(per_level, static_cast<int>(c))) {
                ++rung.persistent;
                const int top = container(per_level.back(), per_level[0].components[c].samples);
                if (top >= 0) {
                    explained[static_cast<std::size_t>(top)] = true;
                }
            }
        }
        for (std::size_t c = 0; c < per_level.back().components.size(); ++c) {
            if (per_level.back().components[c].touches_boundary && !explained[c]) {
                ++rung.marginal;
            }
        }
        all_unbounded = all_unbounded && rung.persistent > 0;
        some_bounded = some_bounded || (rung.persistent == 0 && rung.marginal == 0);
        report.rungs.push_back(rung);
    }
    if (some_bounded) {
        report.verdict = CoverVerdict::CoversCompletely;
    } else if (all_unbounded) {
        report.verdict = CoverVerdict::UnboundedTractFound;
    }
    return report;
}

namespace {

void add_unique(std::vector<SpherePoint>& out, const SpherePoint& p, double tol = 1e-6) {
    for (const auto& q : out) {
        if (chordal_distance(p, q) < tol) {
            return;
        }
    }
    out.push_back(p);
}

std::optional<std::size_t> find_entry(const std::vector<CensusEntry>& entries, const SpherePoint& a) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (chordal_distance(entries[i].a, a) < 1e-6) {
            return i;
        }
    }
    return std::nullopt;
}

bool contains_point(const std::vector<SpherePoint>& set, const SpherePoint& a, double tol) {
    return std::any_of(set.begin(), set.end(), [&](const SpherePoint& s) { return chordal_distance(s, a) < tol; });
}

} // namespace

std::vector<SpherePoint> census_candidates(const RationalMap& f, int orbit_length, int max_period, double absorb) {
    std::vector<SpherePoint> cycles;
    for (int p = 1; p <= max_period; ++p) {
        long long dp = 1;
        for (int i = 0; i < p; ++i) {
            dp *= f.degree();
        }
        if (dp > kPeriodicBudget) {
            break;
        }
        for (const auto& pt : periodic_points(f, p)) {
            if (pt.kind == PeriodicClass::Superattracting || pt.kind == PeriodicClass::Attracting ||
                pt.kind == PeriodicClass::Parabolic) {
                add_unique(cycles, pt.z);
            }
        }
    }
    std::vector<SpherePoint> out;
    for (const auto& c : critical_points(f)) {
        SpherePoint z = c.point;
        for (int k = 0; k < orbit_length; ++k) {
            const bool swallowed = std::any_of(cycles.begin(), cycles.end(), [&](const SpherePoint& q) {
                const double d = chordal_distance(q, z);
                return d >= 1e-6 && d < absorb;
            });
            if (!swallowed) {
                add_unique(out, z);
            }
            z = f(z);
        }
    }
    for (const auto& q : cycles) {
        add_unique(out, q);
    }
    return out;
}

Census singularity_census(const SphereFunction& h, const RationalMap& f, int period, Cplx lambda,
                          const std::vector<SpherePoint>& values, const TractOptions& options) {
    Census census;
    for (const auto& a : values) {
        CensusEntry e;
        e.a = a;
        e.family = compute_tract_family(h, a, options);
        census.entries.push_back(std::move(e));
    }
    for (auto& e : census.entries) {
        e.image_entry = find_entry(census.entries, evaluate(f, e.a, period));
        if (e.image_entry && !e.family.chains.empty()) {
            const auto& target = census.entries[*e.image_entry].family;
            e.action = lambda_action(e.family, target, lambda);
        }
    }
    // A chain is periodic when following the action returns to it.
    std::size_t total = 0;
    for (const auto& e : census.entries) {
        total += e.family.chains.size();
    }
    for (std::size_t i = 0; i < census.entries.size(); ++i) {
        for (std::size_t c = 0; c < census.entries[i].family.chains.size(); ++c) {
            std::size_t ei = i;
            int ci = static_cast<int>(c);
            bool periodic = false;
            for (std::size_t step = 0; step <= total; ++step) {
                const auto& e = census.entries[ei];
                if (!e.image_entry || static_cast<std::size_t>(ci) >= e.action.image.size()) {
                    break;
                }
                const int next = e.action.image[static_cast<std::size_t>(ci)];
                if (next < 0) {
                    break;
                }
                ei = *e.image_entry;
                ci = next;
                if (ei == i && ci == static_cast<int>(c)) {
                    periodic = true;
                    break;
                }
            }
            if (periodic) {
                census.entries[i].periodic_chains.push_back(static_cast<int>(c));
            }
        }
    }
    for (const auto& e : census.entries) {
        const std::size_t direct = e.family.count(Verdict::Direct);
        const std::size_t indirect = e.family.count(Verdict::Indirect);
        census.direct += direct;
        census.indirect += indirect;
        if (e.a.is_finite()) {
            census.finite_singular += direct + indirect;
        }
    }
    return census;
}

CrossCheck singular_value_crosscheck(const Census& census, const DynamicsSummary& dyn, double tol) {
    CrossCheck out;
    std::vector<SpherePoint> at_pb = dyn.attracting;
    at_pb.insert(at_pb.end(), dyn.parabolic.begin(), dyn.parabolic.end());
    at_pb.insert(at_pb.end(), dyn.indifferent.begin(), dyn.indifferent.end());
    std::vector<SpherePoint> unhyp = at_pb;
    unhyp.insert(unhyp.end(), dyn.mane.begin(), dyn.mane.end());
    for (const auto& e : census.entries) {
        for (std::size_t c = 0; c < e.family.chains.size(); ++c) {
            const Verdict v = e.family.chains[c].verdict;
            if (v != Verdict::Direct && v != Verdict::Indirect) {
                continue;
            }
            const std::string where = to_string(e.a);
            if (v == Verdict::Direct && !contains_point(dyn.attracting, e.a, tol)) {
                out.direct_in_attracting = false;
                out.discrepancies.push_back("direct singular value " + where + " is not attracting");
            }
            const bool periodic = std::find(e.periodic_chains.begin(), e.periodic_chains.end(), static_cast<int>(c)) !=
                                  e.periodic_chains.end();
            if (periodic && !contains_point(at_pb, e.a, tol)) {
                out.periodic_in_at_pb = false;
                out.discrepancies.push_back("periodic singular value " + where + " is not attracting or parabolic");
            }
            if (!contains_point(unhyp, e.a, tol)) {
                out.singular_in_unhyperbolic = false;
                out.discrepancies.push_back("singular value " + where + " lies outside the unhyperbolic set");
            }
        }
    }
    return out;
}

nlohmann::ordered_json sphere_point_json(const SpherePoint& a) {
    if (a.is_infinity()) {
        return "inf";
    }
    return {a.value().real(), a.value().imag()};
}

nlohmann::ordered_json tract_family_json(const TractFamily& family) {
    nlohmann::ordered_json j;
    j["a"] = sphere_point_json(family.a);
    nlohmann::ordered_json rungs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < family.masks.size(); ++i) {
        nlohmann::ordered_json r;
        r["r"] = family.options.radii[i];
        r["components"] = family.masks[i][0].components.size();
        r["unbounded"] = std::count(family.unbounded[i].begin(), family.unbounded[i].end(), true);
        rungs.push_back(r);
    }
    j["rungs"] = rungs;
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
    for (const auto& c : family.chains) {
        nlohmann::ordered_json v;
        v["verdict"] = std::string(to_string(c.verdict));
        v["components"] = c.components;
        v["solutions"] = c.solution_counts;
        nlohmann::ordered_json inner = nlohmann::ordered_json::array();
        for (double m : c.innermost_solution) {
            if (std::isfinite(m)) {
                inner.push_back(m);
            } else {
                inner.push_back(nullptr);
            }
        }
        v["innermost_solution"] = inner;
        if (!c.diagnostics.empty()) {
            v["diagnostics"] = c.diagnostics;
        }
        verdicts.push_back(v);
    }
    j["verdicts"] = verdicts;
    j["stable"] = family.stable;
    return j;
}

} // namespace schroeder
