#pragma once

#include <utility>

#include <json.hpp>

#include "schroeder/polynomial.hpp"
#include "schroeder/sphere.hpp"

namespace schroeder {

/// Rational self-map of the sphere f = N/D with coefficients in ascending
/// degree order. Evaluation is homogeneous, so poles and infinity need no
/// special casing by callers.
class RationalMap {
public:
    /// Throws PreconditionError when d < 2 or N and D share a root.
    explicit RationalMap(Coeffs numerator, Coeffs denominator = {Cplx{1.0, 0.0}});

    static RationalMap polynomial(Coeffs coefficients) { return RationalMap(std::move(coefficients)); }

    /// z^2 + c.
    static RationalMap quadratic(Cplx c);

    /// {"num": [[re,im],...], "den": [[re,im],...]}; "den" may be omitted.
    static RationalMap from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::ordered_json to_json() const;

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] bool is_polynomial() const { return polynomial_; }
    [[nodiscard]] const Coeffs& numerator() const { return num_; }
    [[nodiscard]] const Coeffs& denominator() const { return den_; }

    /// (F(x,y), G(x,y)) for the degree-d homogenisation of N and D.
    [[nodiscard]] std::pair<Cplx, Cplx> homogeneous(Cplx x, Cplx y) const;

    /// Homogeneous value together with its derivative along (x(t), y(t)),
    /// given (dx/dt, dy/dt).
    struct Jet {
        Cplx f, g, df, dg;
    };
    [[nodiscard]] Jet homogeneous_jet(Cplx x, Cplx y, Cplx dx, Cplx dy) const;

    [[nodiscard]] SpherePoint operator()(const SpherePoint& z) const;

    /// f evaluated through the given chart of the argument; used to check the
    /// two charts agree.
    [[nodiscard]] SpherePoint apply_in_chart(const SpherePoint& z, Chart chart) const;

    /// Ordinary derivative at a finite point with finite image.
    [[nodiscard]] Cplx derivative(Cplx z) const;

    /// Derivative of f from the chart `in` at z to the chart `out` at f(z).
    [[nodiscard]] Cplx chart_derivative(const SpherePoint& z, Chart in, Chart out) const;

    /// |f'| measured in the chordal metric.
    [[nodiscard]] double spherical_derivative(const SpherePoint& z) const;

    /// All solutions of f(z) = a with multiplicity (d points in total).
    [[nodiscard]] std::vector<SpherePoint> preimages(const SpherePoint& a) const;

    /// For polynomials: |z| > R implies |f(z)| > 2|z|.
    [[nodiscard]] double escape_radius() const;

    /// Leading coefficient of a polynomial map.
    [[nodiscard]] Cplx leading() const { return num_.back(); }

private:
    Coeffs num_;
    Coeffs den_;
    int degree_ = 0;
    bool polynomial_ = true;
};

/// f^k(z); k = 0 returns z.
SpherePoint evaluate(const RationalMap& f, const SpherePoint& z, int k);

} // namespace schroeder
