#include "schroeder/rational_map.hpp"

#include <algorithm>
#include <cmath>

namespace schroeder {

namespace {

struct Dual {
    Cplx v;
    Cplx d;
};

Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator*(Cplx s, Dual a) { return {s * a.v, s * a.d}; }

// sum_k c_k x^k y^(d-k) by homogeneous Horner, with forward-mode derivative.
Dual homogeneous_horner(const Coeffs& c, int d, Dual x, Dual y) {
    const int n = static_cast<int>(c.size()) - 1;
    Dual acc{c[static_cast<std::size_t>(n)], {0.0, 0.0}};
    Dual ypow{{1.0, 0.0}, {0.0, 0.0}};
    for (int k = n - 1; k >= 0; --k) {
        ypow = ypow * y;
        acc = acc * x + c[static_cast<std::size_t>(k)] * ypow;
    }
    for (int k = n; k < d; ++k) {
        acc = acc * y;
    }
    return acc;
}

Cplx parse_complex(const nlohmann::json& v) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw PreconditionError("map coefficient must be [re, im] or a number");
}

} // namespace

RationalMap::RationalMap(Coeffs numerator, Coeffs denominator)
    : num_(poly::trimmed(std::move(numerator))), den_(poly::trimmed(std::move(denominator))) {
    const int dn = poly::degree(num_);
    const int dd = poly::degree(den_);
    if (dd < 0) {
        throw PreconditionError("denominator is identically zero");
    }
    if (dn < 0) {
        throw PreconditionError("numerator is identically zero");
    }
    polynomial_ = dd == 0;
    if (polynomial_) {
        num_ = poly::scale(num_, 1.0 / den_[0]);
        den_ = {Cplx{1.0, 0.0}};
    }
    degree_ = std::max(dn, dd);
    if (degree_ < 2) {
        throw PreconditionError("map degree must be at least 2");
    }
    if (!polynomial_ && std::min(dn, dd) >= 1) {
        const bool num_smaller = dn <= dd;
        const Coeffs& low = num_smaller ? num_ : den_;
        const Coeffs& other = num_smaller ? den_ : num_;
        for (const auto& r : polynomial_roots(low)) {
            const double rel = std::abs(poly::evaluate(other, r)) / std::max(poly::absolute_scale(other, r), 1e-300);
            if (rel < 1e-10) {
                throw PreconditionError("numerator and denominator share a root near " + to_string(SpherePoint(r)));
            }
        }
    } else if (!polynomial_ && dn >= 1 && num_[0] == Cplx(0.0, 0.0) && den_[0] == Cplx(0.0, 0.0)) {
        throw PreconditionError("numerator and denominator share the root 0");
    }
}

RationalMap RationalMap::quadratic(Cplx c) {
    return RationalMap({c, {0.0, 0.0}, {1.0, 0.0}});
}

RationalMap RationalMap::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("num") || !j["num"].is_array()) {
        throw PreconditionError("map description must be an object with a \"num\" array");
    }
    Coeffs num;
    for (const auto& v : j["num"]) {
        num.push_back(parse_complex(v));
    }
    Coeffs den{Cplx{1.0, 0.0}};
    if (j.contains("den")) {
        if (!j["den"].is_array()) {
            throw PreconditionError("\"den\" must be an array");
        }
        den.clear();
        for (const auto& v : j["den"]) {
            den.push_back(parse_complex(v));
        }
    }
    return RationalMap(std::move(num), std::move(den));
}

nlohmann::ordered_json RationalMap::to_json() const {
    nlohmann::ordered_json j;
    auto arr = [](const Coeffs& c) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& v : c) {
            a.push_back({v.real(), v.imag()});
        }
        return a;
    };
    j["num"] = arr(num_);
    j["den"] = arr(den_);
    return j;
}

std::pair<Cplx, Cplx> RationalMap::homogeneous(Cplx x, Cplx y) const {
    const Dual dx{x, {0.0, 0.0}};
    const Dual dy{y, {0.0, 0.0}};
    return {homogeneous_horner(num_, degree_, dx, dy).v, homogeneous_horner(den_, degree_, dx, dy).v};
}

RationalMap::Jet RationalMap::homogeneous_jet(Cplx x, Cplx y, Cplx dx, Cplx dy) const {
    const Dual X{x, dx};
    const Dual Y{y, dy};
    const Dual F = homogeneous_horner(num_, degree_, X, Y);
    const Dual G = homogeneous_horner(den_, degree_, X, Y);
    return {F.v, G.v, F.d, G.d};
}

SpherePoint RationalMap::apply_in_chart(const SpherePoint& z, Chart chart) const {
    Cplx x{1.0, 0.0};
    Cplx y{0.0, 0.0};
    if (chart == Chart::Zero) {
        x = z.value();
        y = 1.0;
    } else if (z.is_finite()) {
        y = 1.0 / z.value();
    }
    const auto [X, Y] = homogeneous(x, y);
    if (Y == Cplx(0.0, 0.0)) {
        return SpherePoint::infinity();
    }
    return {X / Y};
}

SpherePoint RationalMap::operator()(const SpherePoint& z) const {
    return apply_in_chart(z, natural_chart(z));
}

Cplx RationalMap::derivative(Cplx z) const {
    const auto [n, dn] = poly::evaluate_with_derivative(num_, z);
    const auto [d, dd] = poly::evaluate_with_derivative(den_, z);
    return (dn * d - n * dd) / (d * d);
}

Cplx RationalMap::chart_derivative(const SpherePoint& z, Chart in, Chart out) const {
    const Cplx t = chart_coordinate(z, in);
    const Jet j = in == Chart::Zero ? homogeneous_jet(t, 1.0, 1.0, 0.0) : homogeneous_jet(1.0, t, 0.0, 1.0);
    if (out == Chart::Zero) {
        return (j.df * j.g - j.f * j.dg) / (j.g * j.g);
    }
    return (j.dg * j.f - j.g * j.df) / (j.f * j.f);
}

double RationalMap::spherical_derivative(const SpherePoint& z) const {
    const SpherePoint w = (*this)(z);
    const Chart in = natural_chart(z);
    const Chart out = natural_chart(w);
    const double tin = std::abs(chart_coordinate(z, in));
    const double tout = std::abs(chart_coordinate(w, out));
    return std::abs(chart_derivative(z, in, out)) * (1.0 + tin * tin) / (1.0 + tout * tout);
}

std::vector<SpherePoint> RationalMap::preimages(const SpherePoint& a) const {
    Coeffs p(static_cast<std::size_t>(degree_) + 1, Cplx{0.0, 0.0});
    if (a.is_infinity()) {
        std::copy(den_.begin(), den_.end(), p.begin());
    } else {
        const Cplx v = a.value();
        for (std::size_t k = 0; k < p.size(); ++k) {
            const Cplx nk = k < num_.size() ? num_[k] : Cplx{0.0, 0.0};
            const Cplx dk = k < den_.size() ? den_[k] : Cplx{0.0, 0.0};
            p[k] = nk - v * dk;
        }
    }
    p = poly::trimmed(std::move(p), 1e-12);
    std::vector<SpherePoint> out;
    for (const auto& r : polynomial_roots(p)) {
        out.emplace_back(r);
    }
    while (static_cast<int>(out.size()) < degree_) {
        out.push_back(SpherePoint::infinity());
    }
    return out;
}

double RationalMap::escape_radius() const {
    if (!polynomial_) {
        throw PreconditionError("escape radius is defined for polynomial maps only");
    }
    double lower = 0.0;
    for (std::size_t k = 0; k + 1 < num_.size(); ++k) {
        lower += std::abs(num_[k]);
    }
    return std::max(1.0, (2.0 + lower) / std::abs(num_.back()));
}

SpherePoint evaluate(const RationalMap& f, const SpherePoint& z, int k) {
    if (k < 0) {
        throw PreconditionError("iteration count must be non-negative");
    }
    SpherePoint w = z;
    for (int i = 0; i < k; ++i) {
        w = f(w);
    }
    return w;
}

} // namespace schroeder
