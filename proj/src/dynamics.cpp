#include "schroeder/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace schroeder {

std::string_view to_string(PeriodicClass c) {
    switch (c) {
    case PeriodicClass::Superattracting:
        return "superattracting";
    case PeriodicClass::Attracting:
        return "attracting";
    case PeriodicClass::Parabolic:
        return "parabolic";
    case PeriodicClass::IndifferentUndetermined:
        return "indifferent-undetermined";
    case PeriodicClass::Repelling:
        return "repelling";
    }
    return "unknown";
}

PeriodicClass classify(Cplx multiplier, const ClassifyThresholds& t) {
    const double m = std::abs(multiplier);
    if (m <= t.superattracting) {
        return PeriodicClass::Superattracting;
    }
    if (m < 1.0 - t.epsilon) {
        return PeriodicClass::Attracting;
    }
    if (m > 1.0 + t.epsilon) {
        return PeriodicClass::Repelling;
    }
    Cplx power{1.0, 0.0};
    for (int n = 1; n <= t.max_root_order; ++n) {
        power *= multiplier;
        if (std::abs(power - 1.0) < t.root_of_unity_tol) {
            return PeriodicClass::Parabolic;
        }
    }
    return PeriodicClass::IndifferentUndetermined;
}

std::vector<CriticalPoint> critical_points(const RationalMap& f) {
    const Coeffs& n = f.numerator();
    const Coeffs& d = f.denominator();
    const Coeffs w = poly::trimmed(
        poly::add(poly::multiply(poly::derivative(n), d), poly::scale(poly::multiply(n, poly::derivative(d)), -1.0)),
        1e-12);
    const int finite = std::max(poly::degree(w), 0);
    std::vector<SpherePoint> pts;
    for (const auto& r : polynomial_roots(w)) {
        pts.emplace_back(r);
    }
    for (int k = finite; k < 2 * f.degree() - 2; ++k) {
        pts.push_back(SpherePoint::infinity());
    }
    std::vector<CriticalPoint> out;
    for (const auto& c : cluster_points(pts, 1e-6)) {
        out.push_back({c.point, c.multiplicity});
    }
    return out;
}

namespace {

// Newton ratio of H(z) = A_p(z) - z B_p(z), where (A_p, B_p) is the
// homogeneous p-th iterate at (z, 1). Common rescaling of the pair and its
// derivative leaves the ratio unchanged, so no overflow for large p.
Cplx fixed_point_ratio(const RationalMap& f, int p, Cplx z) {
    Cplx x = z;
    Cplx y{1.0, 0.0};
    Cplx dx{1.0, 0.0};
    Cplx dy{0.0, 0.0};
    for (int i = 0; i < p; ++i) {
        const auto j = f.homogeneous_jet(x, y, dx, dy);
        const double s = std::max(std::abs(j.f), std::abs(j.g));
        const double inv = s > 0.0 ? 1.0 / s : 1.0;
        x = j.f * inv;
        y = j.g * inv;
        dx = j.df * inv;
        dy = j.dg * inv;
    }
    const Cplx h = x - z * y;
    if (h == Cplx(0.0, 0.0)) {
        return {0.0, 0.0};
    }
    return h / (dx - y - z * dy);
}

// Coefficients of A_p and B_p in the chart (z, 1).
std::pair<Coeffs, Coeffs> iterate_coefficients(const RationalMap& f, int p) {
    Coeffs a{{0.0, 0.0}, {1.0, 0.0}};
    Coeffs b{{1.0, 0.0}};
    const int d = f.degree();
    for (int it = 0; it < p; ++it) {
        std::vector<Coeffs> apow{Coeffs{{1.0, 0.0}}};
        std::vector<Coeffs> bpow{Coeffs{{1.0, 0.0}}};
        for (int j = 1; j <= d; ++j) {
            apow.push_back(poly::multiply(apow.back(), a));
            bpow.push_back(poly::multiply(bpow.back(), b));
        }
        Coeffs na;
        Coeffs nb;
        for (int j = 0; j <= d; ++j) {
            const Coeffs term = poly::multiply(apow[static_cast<std::size_t>(j)], bpow[static_cast<std::size_t>(d - j)]);
            const auto& num = f.numerator();
            const auto& den = f.denominator();
            if (static_cast<std::size_t>(j) < num.size()) {
                na = poly::add(na, poly::scale(term, num[static_cast<std::size_t>(j)]));
            }
            if (static_cast<std::size_t>(j) < den.size()) {
                nb = poly::add(nb, poly::scale(term, den[static_cast<std::size_t>(j)]));
            }
        }
        a = std::move(na);
        b = std::move(nb);
    }
    return {a, b};
}

long long checked_power(int d, int p) {
    long long v = 1;
    for (int i = 0; i < p; ++i) {
        v *= d;
        if (v > kPeriodicBudget) {
            throw BudgetError("d^p = " + std::to_string(d) + "^" + std::to_string(p) +
                              " exceeds the periodic point budget of " + std::to_string(kPeriodicBudget));
        }
    }
    return v;
}

double fixed_residual(const RationalMap& f, const SpherePoint& z, int p) {
    return chordal_distance(evaluate(f, z, p), z);
}

} // namespace

std::vector<SpherePoint> fixed_points_of_iterate(const RationalMap& f, int p) {
    if (p < 1) {
        throw PreconditionError("period must be at least 1");
    }
    const long long dp = checked_power(f.degree(), p);
    auto [a, b] = iterate_coefficients(f, p);
    Coeffs h = poly::add(a, poly::scale(poly::multiply(Coeffs{{0.0, 0.0}, {1.0, 0.0}}, b), -1.0));
    h.resize(static_cast<std::size_t>(dp) + 2, Cplx{0.0, 0.0});
    h = poly::trimmed(std::move(h), 1e-12);
    const int n = poly::degree(h);

    std::vector<SpherePoint> out;
    std::size_t zeros = 0;
    while (zeros + 1 < h.size() && h[zeros] == Cplx(0.0, 0.0)) {
        out.emplace_back(Cplx{0.0, 0.0});
        ++zeros;
    }
    Coeffs reduced(h.begin() + static_cast<std::ptrdiff_t>(zeros), h.end());
    if (reduced.size() > 1) {
        auto res = aberth_ehrlich(newton_polygon_start(reduced), [&f, p](Cplx z) { return fixed_point_ratio(f, p, z); });
        std::vector<double> residuals;
        bool ok = true;
        for (auto z : res.roots) {
            SpherePoint sp(z);
            double r = fixed_residual(f, sp, p);
            if (!(r < 1e-7)) {
                // One more Newton pass before giving up on this root.
                for (int k = 0; k < 20 && !(r < 1e-7); ++k) {
                    z -= fixed_point_ratio(f, p, z);
                    sp = SpherePoint(z);
                    r = fixed_residual(f, sp, p);
                }
            }
            residuals.push_back(r);
            if (!(r < 1e-7)) {
                ok = false;
            }
            out.push_back(sp);
        }
        if (!ok) {
            throw SolverError("periodic point solve did not converge", residuals);
        }
    }
    for (long long k = n; k < dp + 1; ++k) {
        out.push_back(SpherePoint::infinity());
    }
    return out;
}

Cplx cycle_multiplier(const RationalMap& f, const SpherePoint& z, int p) {
    SpherePoint cur = z;
    Cplx lambda{1.0, 0.0};
    for (int i = 0; i < p; ++i) {
        const SpherePoint next = f(cur);
        const Chart in = natural_chart(cur);
        const Chart out = i == p - 1 ? natural_chart(z) : natural_chart(next);
        lambda *= f.chart_derivative(cur, in, out);
        cur = next;
    }
    return lambda;
}

SpherePoint refine_periodic_point(const RationalMap& f, const SpherePoint& z, int p) {
    if (z.is_infinity() || std::abs(z.value()) > 1e8) {
        return z;
    }
    Cplx w = z.value();
    double best = fixed_residual(f, z, p);
    for (int k = 0; k < 30 && best > 0.0; ++k) {
        const Cplx step = fixed_point_ratio(f, p, w);
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
            break;
        }
        const Cplx cand = w - step;
        const double r = fixed_residual(f, SpherePoint(cand), p);
        if (!(r < best) && std::abs(step) > 1e-15 * (1.0 + std::abs(w))) {
            break;
        }
        if (r <= best) {
            best = r;
            w = cand;
        }
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) {
            break;
        }
    }
    return {w};
}

std::vector<PeriodicPoint> periodic_points(const RationalMap& f, int p) {
    const auto all = fixed_points_of_iterate(f, p);
    auto clusters = cluster_points(all, 1e-6);

    std::vector<PeriodicPoint> candidates;
    for (auto& c : clusters) {
        PeriodicPoint pp;
        pp.z = c.multiplicity == 1 ? refine_periodic_point(f, c.point, p) : c.point;
        pp.period = p;
        pp.multiplicity = c.multiplicity;
        pp.clustered = c.multiplicity > 1;
        bool lower = false;
        for (int q = 1; q < p && !lower; ++q) {
            if (p % q != 0) {
                continue;
            }
            const SpherePoint w = evaluate(f, pp.z, q);
            if (pp.z.is_finite() && w.is_finite()) {
                lower = std::abs(w.value() - pp.z.value()) < 1e-8 * (1.0 + std::abs(pp.z.value()));
            } else {
                lower = chordal_distance(w, pp.z) < 1e-8;
            }
        }
        if (!lower) {
            candidates.push_back(pp);
        }
    }

    std::vector<int> cycle_of(candidates.size(), -1);
    int cycles = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (cycle_of[i] >= 0) {
            continue;
        }
        cycle_of[i] = cycles;
        SpherePoint cur = candidates[i].z;
        for (int k = 1; k < p; ++k) {
            cur = f(cur);
            std::size_t best = candidates.size();
            double bestd = 1e-6;
            for (std::size_t j = 0; j < candidates.size(); ++j) {
                const double dist = chordal_distance(candidates[j].z, cur);
                if (cycle_of[j] < 0 && dist < bestd) {
                    best = j;
                    bestd = dist;
                }
            }
            if (best < candidates.size()) {
                cycle_of[best] = cycles;
            }
        }
        ++cycles;
    }

    std::vector<PeriodicPoint> out;
    for (int c = 0; c < cycles; ++c) {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (cycle_of[i] != c) {
                continue;
            }
            PeriodicPoint pp = candidates[i];
            pp.cycle = c;
            pp.multiplier = cycle_multiplier(f, pp.z, p);
            pp.kind = classify(pp.multiplier);
            out.push_back(pp);
        }
    }
    return out;
}

PeriodicPoint nearest_periodic_point(const RationalMap& f, const SpherePoint& guess, int p) {
    const auto pts = periodic_points(f, p);
    if (pts.empty()) {
        throw PreconditionError("no points of exact period " + std::to_string(p));
    }
    const auto it = std::min_element(pts.begin(), pts.end(), [&guess](const auto& a, const auto& b) {
        return chordal_distance(a.z, guess) < chordal_distance(b.z, guess);
    });
    return *it;
}

bool ExceptionalSet::contains(const SpherePoint& a, double tol) const {
    return std::any_of(points.begin(), points.end(), [&](const auto& p) { return chordal_distance(p, a) < tol; });
}

ExceptionalSet exceptional_set(const RationalMap& f) {
    ExceptionalSet e;
    const int d = f.degree();
    auto single_preimage = [&f](const SpherePoint& a) -> std::optional<SpherePoint> {
        const auto pre = f.preimages(a);
        const auto cl = cluster_points(pre, 1e-6);
        if (cl.size() == 1) {
            return cl.front().point;
        }
        return std::nullopt;
    };
    for (const auto& c : critical_points(f)) {
        if (c.multiplicity != d - 1) {
            continue;
        }
        const auto b = single_preimage(c.point);
        if (!b) {
            continue;
        }
        const auto a2 = single_preimage(*b);
        if (a2 && chordal_distance(*a2, c.point) < 1e-6 && !e.contains(c.point)) {
            e.points.push_back(c.point);
        }
    }
    return e;
}

} // namespace schroeder
