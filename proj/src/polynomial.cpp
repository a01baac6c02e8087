#include "schroeder/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace schroeder {

namespace poly {

Cplx evaluate(std::span<const Cplx> c, Cplx z) {
    Cplx acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

std::pair<Cplx, Cplx> evaluate_with_derivative(std::span<const Cplx> c, Cplx z) {
    Cplx p{0.0, 0.0};
    Cplx dp{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    return {p, dp};
}

Coeffs derivative(std::span<const Cplx> c) {
    if (c.size() <= 1) {
        return {Cplx{0.0, 0.0}};
    }
    Coeffs d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) {
        d[k - 1] = c[k] * static_cast<double>(k);
    }
    return d;
}

Coeffs multiply(std::span<const Cplx> a, std::span<const Cplx> b) {
    if (a.empty() || b.empty()) {
        return {};
    }
    Coeffs out(a.size() + b.size() - 1, Cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == Cplx(0.0, 0.0)) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

Coeffs add(std::span<const Cplx> a, std::span<const Cplx> b) {
    Coeffs out(std::max(a.size(), b.size()), Cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[i] += b[i];
    }
    return out;
}

Coeffs scale(std::span<const Cplx> a, Cplx s) {
    Coeffs out(a.begin(), a.end());
    for (auto& v : out) {
        v *= s;
    }
    return out;
}

int degree(std::span<const Cplx> c, double rel_tol) {
    double mx = 0.0;
    for (const auto& v : c) {
        mx = std::max(mx, std::abs(v));
    }
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
        const double a = std::abs(c[static_cast<std::size_t>(k)]);
        if (a > rel_tol * mx && a > 0.0) {
            return k;
        }
    }
    return -1;
}

Coeffs trimmed(Coeffs c, double rel_tol) {
    const int d = degree(c, rel_tol);
    c.resize(static_cast<std::size_t>(std::max(d, 0) + 1));
    if (d < 0) {
        c[0] = Cplx{0.0, 0.0};
    }
    return c;
}

double absolute_scale(std::span<const Cplx> c, Cplx z) {
    const double r = std::abs(z);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * r + std::abs(*it);
    }
    return acc;
}

} // namespace poly

AberthResult aberth_ehrlich(std::vector<Cplx> start, const NewtonRatio& ratio,
                            const AberthOptions& options) {
    const std::size_t n = start.size();
    AberthResult result;
    result.roots = std::move(start);
    result.converged.assign(n, false);
    std::vector<double> last_step(n, std::numeric_limits<double>::infinity());
    std::vector<int> stalls(n, 0);

    for (int it = 0; it < options.max_iterations; ++it) {
        result.iterations = it + 1;
        bool all = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (result.converged[i]) {
                continue;
            }
            Cplx& zi = result.roots[i];
            const Cplx nr = ratio(zi);
            if (nr == Cplx(0.0, 0.0)) {
                result.converged[i] = true;
                continue;
            }
            Cplx sum{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                Cplx diff = zi - result.roots[j];
                if (diff == Cplx(0.0, 0.0)) {
                    diff = Cplx(1e-12 * (1.0 + std::abs(zi)), 0.0);
                }
                sum += 1.0 / diff;
            }
            Cplx step = nr / (1.0 - nr * sum);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                step = nr;
            }
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                // Derivative vanished exactly; nudge off the critical point.
                step = Cplx(1e-8 * (1.0 + std::abs(zi)), 1e-8 * (1.0 + std::abs(zi)));
            }
            zi -= step;
            const double s = std::abs(step);
            if (s <= options.relative_step * std::max(std::abs(zi), 1e-300)) {
                result.converged[i] = true;
                continue;
            }
            // Clustered roots converge linearly down to a noise floor; once the
            // step keeps growing there is nothing left to gain.
            if (it > 30 && s >= last_step[i]) {
                if (++stalls[i] >= 4) {
                    result.converged[i] = true;
                    continue;
                }
            } else {
                stalls[i] = 0;
            }
            last_step[i] = s;
            all = false;
        }
        if (all) {
            break;
        }
    }
    return result;
}

std::vector<Cplx> newton_polygon_start(std::span<const Cplx> c) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<std::pair<int, double>> pts;
    for (int k = 0; k <= n; ++k) {
        const double a = std::abs(c[static_cast<std::size_t>(k)]);
        if (a > 0.0) {
            pts.emplace_back(k, std::log(a));
        }
    }
    // Upper convex hull (monotone chain) of (k, log|c_k|).
    std::vector<std::pair<int, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.first - a.first) * (p.second - a.second) -
                                 (b.second - a.second) * (p.first - a.first);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    std::vector<Cplx> start;
    start.reserve(static_cast<std::size_t>(n));
    constexpr double sigma = 0.7;
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        const int k0 = hull[e].first;
        const int k1 = hull[e + 1].first;
        const int m = k1 - k0;
        const double radius = std::exp((hull[e].second - hull[e + 1].second) / m);
        for (int j = 0; j < m; ++j) {
            const double angle = 2.0 * std::numbers::pi * j / m + 2.0 * std::numbers::pi * k0 / n + sigma;
            start.push_back(std::polar(radius, angle));
        }
    }
    return start;
}

namespace {

// Newton ratio with the reversed polynomial for |z| > 1, which keeps the
// evaluation well scaled for large roots.
Cplx horner_ratio(std::span<const Cplx> c, Cplx z) {
    const int n = static_cast<int>(c.size()) - 1;
    if (std::abs(z) <= 1.0) {
        const auto [p, dp] = poly::evaluate_with_derivative(c, z);
        if (p == Cplx(0.0, 0.0)) {
            return {0.0, 0.0};
        }
        return p / dp;
    }
    const Cplx u = 1.0 / z;
    Cplx q{0.0, 0.0};
    Cplx dq{0.0, 0.0};
    for (int k = 0; k <= n; ++k) {
        dq = dq * u + q;
        q = q * u + c[static_cast<std::size_t>(k)];
    }
    if (q == Cplx(0.0, 0.0)) {
        return {0.0, 0.0};
    }
    return z * q / (static_cast<double>(n) * q - u * dq);
}

} // namespace

std::vector<Cplx> polynomial_roots(std::span<const Cplx> coeffs) {
    Coeffs c = poly::trimmed(Coeffs(coeffs.begin(), coeffs.end()));
    if (poly::degree(c) < 0) {
        throw PreconditionError("the zero polynomial has no finite root set");
    }
    std::vector<Cplx> roots;
    std::size_t lead_zeros = 0;
    while (lead_zeros + 1 < c.size() && c[lead_zeros] == Cplx(0.0, 0.0)) {
        ++lead_zeros;
    }
    roots.assign(lead_zeros, Cplx{0.0, 0.0});
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead_zeros));
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) {
        return roots;
    }
    if (n == 1) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    auto res = aberth_ehrlich(newton_polygon_start(c), [&c](Cplx z) { return horner_ratio(c, z); });
    std::vector<double> residuals;
    bool ok = true;
    for (const auto& z : res.roots) {
        const double r = std::abs(poly::evaluate(c, z)) / std::max(poly::absolute_scale(c, z), 1e-300);
        residuals.push_back(r);
        if (!(r < 1e-8)) {
            ok = false;
        }
    }
    if (!ok) {
        throw SolverError("polynomial root solve did not converge", residuals);
    }
    roots.insert(roots.end(), res.roots.begin(), res.roots.end());
    return roots;
}

std::vector<ClusteredRoot> cluster_points(std::span<const SpherePoint> points, double tol) {
    const std::size_t n = points.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (chordal_distance(points[i], points[j]) < tol) {
                parent[find(j)] = find(i);
            }
        }
    }
    std::vector<ClusteredRoot> out;
    std::vector<std::size_t> rep_index;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        auto it = std::find(rep_index.begin(), rep_index.end(), r);
        if (it != rep_index.end()) {
            continue;
        }
        rep_index.push_back(r);
        std::vector<std::size_t> members;
        for (std::size_t j = 0; j < n; ++j) {
            if (find(j) == r) {
                members.push_back(j);
            }
        }
        const Chart chart = natural_chart(points[members.front()]);
        Cplx mean{0.0, 0.0};
        for (auto j : members) {
            mean += chart_coordinate(points[j], chart);
        }
        mean /= static_cast<double>(members.size());
        ClusteredRoot cr;
        cr.point = from_chart(mean, chart);
        cr.multiplicity = static_cast<int>(members.size());
        for (auto j : members) {
            cr.spread = std::max(cr.spread, chordal_distance(points[j], cr.point));
        }
        out.push_back(cr);
    }
    return out;
}

} // namespace schroeder
