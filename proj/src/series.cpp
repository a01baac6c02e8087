#include "schroeder/series.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "schroeder/parallel.hpp"

namespace schroeder {

namespace {

// Truncated power series in u, coefficients 0..n.
using Series = std::vector<Cplx>;

Series series_mul(const Series& a, const Series& b) {
    Series out(a.size(), Cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == Cplx(0.0, 0.0)) {
            continue;
        }
        for (std::size_t j = 0; i + j < out.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

Series series_div(const Series& a, const Series& b) {
    if (b[0] == Cplx(0.0, 0.0)) {
        throw Error("orbit of the periodic point passes through a pole");
    }
    Series out(a.size(), Cplx{0.0, 0.0});
    for (std::size_t n = 0; n < a.size(); ++n) {
        Cplx acc = a[n];
        for (std::size_t j = 1; j <= n; ++j) {
            acc -= b[j] * out[n - j];
        }
        out[n] = acc / b[0];
    }
    return out;
}

Series series_poly(const Coeffs& c, const Series& s) {
    Series acc(s.size(), Cplx{0.0, 0.0});
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = series_mul(acc, s);
        acc[0] += *it;
    }
    return acc;
}

// Taylor coefficients of f^p at z0, orders 0..n.
Series iterate_taylor(const RationalMap& f, Cplx z0, int p, int n) {
    Series s(static_cast<std::size_t>(n) + 1, Cplx{0.0, 0.0});
    s[0] = z0;
    if (n >= 1) {
        s[1] = 1.0;
    }
    for (int i = 0; i < p; ++i) {
        s = series_div(series_poly(f.numerator(), s), series_poly(f.denominator(), s));
    }
    return s;
}

double wrap_angle(double t) {
    return std::remainder(t, 2.0 * std::numbers::pi);
}

Cplx lambda_power(Cplx lambda, int k) {
    Cplx out{1.0, 0.0};
    for (int i = 0; i < k; ++i) {
        out *= lambda;
    }
    return out;
}

} // namespace

SchroederSeries::SchroederSeries(RationalMap map, Cplx z0, int period, Cplx lambda, Coeffs coeffs, double safe_radius)
    : map_(std::move(map)), period_(period), lambda_(lambda), coeffs_(std::move(coeffs)), safe_radius_(safe_radius) {
    if (coeffs_.size() < 2) {
        throw PreconditionError("series needs at least a_0 and a_1");
    }
    if (period_ < 1) {
        throw PreconditionError("period must be positive");
    }
    if (!(std::abs(lambda_) > 1.0)) {
        throw PreconditionError("multiplier must satisfy |lambda| > 1");
    }
    coeffs_[0] = z0;
    coeffs_[1] = 1.0;
}

SchroederSeries SchroederSeries::with_safe_radius(double r) const {
    return {map_, z0(), period_, lambda_, coeffs_, r};
}

Cplx SchroederSeries::truncated(Cplx w) const {
    Cplx acc{0.0, 0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * w + *it;
    }
    return acc;
}

Cplx SchroederSeries::truncated_derivative(Cplx w) const {
    Cplx acc{0.0, 0.0};
    for (std::size_t n = coeffs_.size() - 1; n >= 1; --n) {
        acc = acc * w + static_cast<double>(n) * coeffs_[n];
    }
    return acc;
}

SpherePoint SchroederSeries::apply_iterate(const SpherePoint& z) const {
    return evaluate(map_, z, period_);
}

SchroederSeries schroeder_coefficients(const RationalMap& f, const PeriodicPoint& z0, int order) {
    if (order < 2) {
        throw PreconditionError("truncation order must be at least 2");
    }
    if (z0.kind != PeriodicClass::Repelling || !(std::abs(z0.multiplier) > 1.0)) {
        throw PreconditionError("Schroeder series needs a repelling periodic point");
    }
    if (z0.z.is_infinity()) {
        throw PreconditionError("Schroeder series is built at finite periodic points only");
    }
    const Series g = iterate_taylor(f, z0.z.value(), z0.period, order);
    const Cplx lambda = g[1];
    const auto n_max = static_cast<std::size_t>(order);
    Coeffs a(n_max + 1, Cplx{0.0, 0.0});
    a[0] = z0.z.value();
    a[1] = 1.0;
    // power[k][m] = [w^m] (h - z0)^k
    std::vector<Series> power(n_max + 1, Series(n_max + 1, Cplx{0.0, 0.0}));
    power[1][1] = 1.0;
    Cplx lambda_n = lambda;
    for (std::size_t n = 2; n <= n_max; ++n) {
        lambda_n *= lambda;
        power[n][n] = 1.0;
        for (std::size_t k = 2; k < n; ++k) {
            Cplx acc{0.0, 0.0};
            for (std::size_t j = 1; j + k - 1 <= n; ++j) {
                acc += a[j] * power[k - 1][n - j];
            }
            power[k][n] = acc;
        }
        Cplx rhs{0.0, 0.0};
        for (std::size_t k = 2; k <= n; ++k) {
            rhs += g[k] * power[k][n];
        }
        a[n] = rhs / (lambda_n - lambda);
        power[1][n] = a[n];
    }
    return {f, a[0], z0.period, lambda, std::move(a), 0.0};
}

double circle_residual(const SchroederSeries& s, double r, int samples) {
    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
        const Cplx w = std::polar(r, 2.0 * std::numbers::pi * j / samples);
        const SpherePoint lhs = s.apply_iterate(SpherePoint(s.truncated(w)));
        const Cplx rhs = s.truncated(s.lambda() * w);
        if (lhs.is_infinity() || !std::isfinite(std::abs(rhs))) {
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, std::abs(lhs.value() - rhs) / (1.0 + std::abs(rhs)));
    }
    return worst;
}

namespace {

double root_test(const SchroederSeries& s) {
    const int n_max = s.order();
    const int first = (n_max + 1) / 2;
    double worst = 0.0;
    for (int n = std::max(2, first); n <= n_max; ++n) {
        const double m = std::abs(s.coefficients()[static_cast<std::size_t>(n)]);
        if (m > 0.0) {
            worst = std::max(worst, std::pow(m, 1.0 / n));
        }
    }
    return worst;
}

} // namespace

double estimate_safe_radius(const SchroederSeries& s, double tolerance) {
    if (s.order() < 8) {
        throw PreconditionError("safe radius estimation needs truncation order N >= 8");
    }
    const double growth = root_test(s);
    std::vector<ResidualSample> curve;
    double best = 0.0;
    for (int j = 0;; ++j) {
        const double r = 1e-6 * std::pow(2.0, j / 4.0);
        if (r > 1e6 * (1.0 + 1e-12)) {
            break;
        }
        const ResidualSample sample{r, circle_residual(s, r), growth * r};
        curve.push_back(sample);
        if (!(sample.root_test < 0.5) || !(sample.residual < tolerance)) {
            break;
        }
        best = r;
    }
    if (best == 0.0) {
        throw SafeRadiusError("no radius passes the safe-radius tests", std::move(curve));
    }
    return best;
}

SchroederSeries build_schroeder_series(const RationalMap& f, const PeriodicPoint& z0, int order) {
    const SchroederSeries raw = schroeder_coefficients(f, z0, order);
    return raw.with_safe_radius(estimate_safe_radius(raw));
}

int pullback_depth(const SchroederSeries& s, Cplx w) {
    if (!(s.safe_radius() > 0.0)) {
        throw PreconditionError("series has no safe radius");
    }
    const double m = std::abs(w);
    if (m <= s.safe_radius()) {
        return 0;
    }
    return std::max(0, static_cast<int>(std::ceil(std::log(m / s.safe_radius()) / std::log(std::abs(s.lambda())))));
}

HValue evaluate_h_detailed(const SchroederSeries& s, Cplx w) {
    const int k = pullback_depth(s, w);
    const Cplx u = w / lambda_power(s.lambda(), k);
    const Cplx v = s.truncated(u);
    const double au = std::abs(u);
    double magnitude = 0.0;
    double power = 1.0;
    for (const auto& c : s.coefficients()) {
        magnitude += std::abs(c) * power;
        power *= au;
    }
    const double tail = std::abs(s.coefficients().back()) * std::pow(au, s.order());
    double err = (tail + 4e-16 * magnitude) / (1.0 + std::norm(v));
    SpherePoint z(v);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < s.period(); ++j) {
            err = err * s.map().spherical_derivative(z) + 1e-16;
            z = s.map()(z);
        }
    }
    return {z, k, std::min(err, 1.0)};
}

SpherePoint evaluate_h_at_depth(const SchroederSeries& s, Cplx w, int depth) {
    if (depth < 0) {
        throw PreconditionError("pullback depth must be non-negative");
    }
    SpherePoint z(s.truncated(w / lambda_power(s.lambda(), depth)));
    for (int i = 0; i < depth; ++i) {
        z = s.apply_iterate(z);
    }
    return z;
}

SpherePoint evaluate_h(const SchroederSeries& s, Cplx w) {
    return evaluate_h_at_depth(s, w, pullback_depth(s, w));
}

double log_abs_h(const SchroederSeries& s, Cplx w) {
    const int k = pullback_depth(s, w);
    const RationalMap& f = s.map();
    SpherePoint z(s.truncated(w / lambda_power(s.lambda(), k)));
    const int steps = k * s.period();
    if (!f.is_polynomial()) {
        z = evaluate(f, z, steps);
        return z.is_infinity() ? std::numeric_limits<double>::infinity() : std::log(std::abs(z.value()));
    }
    constexpr double kSwitch = 1e50;
    const Cplx log_lead = std::log(f.leading());
    const double d = f.degree();
    for (int i = 0; i < steps; ++i) {
        if (z.is_finite() && std::abs(z.value()) > kSwitch) {
            Cplx big = std::log(z.value());
            for (int j = i; j < steps; ++j) {
                big = log_lead + d * big;
                big = {big.real(), wrap_angle(big.imag())};
            }
            return big.real();
        }
        z = f(z);
    }
    return z.is_infinity() ? std::numeric_limits<double>::infinity() : std::log(std::abs(z.value()));
}

Cplx h_derivative(const SchroederSeries& s, Cplx w) {
    const int k = pullback_depth(s, w);
    const Cplx scale = lambda_power(s.lambda(), k);
    const Cplx u = w / scale;
    Cplx deriv = s.truncated_derivative(u) / scale;
    SpherePoint z(s.truncated(u));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < k * s.period(); ++i) {
        const SpherePoint next = s.map()(z);
        if (z.is_infinity() || next.is_infinity()) {
            return {nan, nan};
        }
        deriv *= s.map().derivative(z.value());
        z = next;
    }
    return deriv;
}

SphereFunction as_function(const SchroederSeries& s) {
    auto shared = std::make_shared<const SchroederSeries>(s);
    return [shared](Cplx w) { return evaluate_h(*shared, w); };
}

std::vector<HCriticalPoint> critical_points_of_h(const SchroederSeries& s, const Box& box, int n, unsigned threads) {
    if (n < 1) {
        throw PreconditionError("critical point scan needs a positive grid size");
    }
    const int m = n + 1;
    const double dx = box.width() / n;
    const double dy = box.height() / n;
    auto vertex = [&](int i, int j) { return Cplx{box.re_min + i * dx, box.im_min + j * dy}; };
    std::vector<Cplx> dh(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    parallel_for(dh.size(), threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx % static_cast<std::size_t>(m));
        const int j = static_cast<int>(idx / static_cast<std::size_t>(m));
        dh[idx] = h_derivative(s, vertex(i, j));
    });
    auto at = [&](int i, int j) { return dh[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)]; };
    std::vector<HCriticalPoint> out;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Cplx corners[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
            bool usable = true;
            for (const auto& c : corners) {
                usable = usable && std::isfinite(c.real()) && std::isfinite(c.imag()) && c != Cplx(0.0, 0.0);
            }
            if (!usable) {
                continue;
            }
            double turn = 0.0;
            for (int e = 0; e < 4; ++e) {
                turn += wrap_angle(std::arg(corners[(e + 1) % 4]) - std::arg(corners[e]));
            }
            if (std::lround(turn / (2.0 * std::numbers::pi)) == 0) {
                continue;
            }
            Cplx w = vertex(i, j) + Cplx{0.5 * dx, 0.5 * dy};
            bool converged = false;
            for (int it = 0; it < 60; ++it) {
                const double delta = 1e-6 * (1.0 + std::abs(w));
                const Cplx second = (h_derivative(s, w + delta) - h_derivative(s, w - delta)) / (2.0 * delta);
                if (second == Cplx(0.0, 0.0) || !std::isfinite(std::abs(second))) {
                    break;
                }
                const Cplx step = h_derivative(s, w) / second;
                w -= step;
                if (std::abs(step) < 1e-12 * (1.0 + std::abs(w))) {
                    converged = true;
                    break;
                }
            }
            if (!converged || !box.contains(w)) {
                continue;
            }
            const bool duplicate = std::any_of(out.begin(), out.end(), [&](const HCriticalPoint& c) {
                return std::abs(c.w - w) < 1e-8 * (1.0 + std::abs(w));
            });
            if (!duplicate) {
                out.push_back({w, std::abs(h_derivative(s, w))});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const HCriticalPoint& a, const HCriticalPoint& b) {
        return std::abs(a.w) < std::abs(b.w) || (std::abs(a.w) == std::abs(b.w) && std::arg(a.w) < std::arg(b.w));
    });
    return out;
}

nlohmann::ordered_json series_to_json(const SchroederSeries& s) {
    nlohmann::ordered_json j;
    j["z0"] = {s.z0().real(), s.z0().imag()};
    j["lambda"] = {s.lambda().real(), s.lambda().imag()};
    j["p"] = s.period();
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (const auto& c : s.coefficients()) {
        coeffs.push_back({c.real(), c.imag()});
    }
    j["coeffs"] = coeffs;
    j["r_safe"] = s.safe_radius();
    return j;
}

} // namespace schroeder
