#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "schroeder/dynamics.hpp"
#include "schroeder/grid.hpp"
#include "schroeder/rational_map.hpp"

namespace schroeder {

inline constexpr int kDefaultSeriesOrder = 64;
inline constexpr double kSeriesResidualTolerance = 1e-10;

/// Truncated Taylor series of the Schroeder map h at a repelling point of
/// period p, h(w) = z0 + w + a_2 w^2 + ..., solving f^p(h(w)) = h(lambda w).
/// Immutable once built; every evaluator below is re-entrant.
class SchroederSeries {
public:
    SchroederSeries(RationalMap map, Cplx z0, int period, Cplx lambda, Coeffs coeffs, double safe_radius);

    [[nodiscard]] const RationalMap& map() const { return map_; }
    [[nodiscard]] Cplx z0() const { return coeffs_[0]; }
    [[nodiscard]] int period() const { return period_; }
    [[nodiscard]] Cplx lambda() const { return lambda_; }
    [[nodiscard]] const Coeffs& coefficients() const { return coeffs_; }
    [[nodiscard]] int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    /// Radius of the disk where the truncated series is trusted; 0 when unset.
    [[nodiscard]] double safe_radius() const { return safe_radius_; }

    [[nodiscard]] SchroederSeries with_safe_radius(double r) const;

    /// The truncated series itself (no pullback).
    [[nodiscard]] Cplx truncated(Cplx w) const;
    [[nodiscard]] Cplx truncated_derivative(Cplx w) const;

    /// f^p applied once on the sphere.
    [[nodiscard]] SpherePoint apply_iterate(const SpherePoint& z) const;

private:
    RationalMap map_;
    int period_;
    Cplx lambda_;
    Coeffs coeffs_;
    double safe_radius_;
};

/// Coefficients a_0..a_N from the triangular recurrence
/// (lambda^n - lambda) a_n = [w^n] sum_{k>=2} g_k (h - z0)^k, g = f^p at z0.
/// The returned series has no safe radius yet.
SchroederSeries schroeder_coefficients(const RationalMap& f, const PeriodicPoint& z0, int order = kDefaultSeriesOrder);

struct ResidualSample {
    double radius;
    double residual;
    double root_test;
};

class SafeRadiusError : public Error {
public:
    SafeRadiusError(const std::string& what, std::vector<ResidualSample> curve)
        : Error(what), curve_(std::move(curve)) {}
    [[nodiscard]] const std::vector<ResidualSample>& curve() const { return curve_; }

private:
    std::vector<ResidualSample> curve_;
};

/// Largest radius on a geometric ladder where the tail root test and the
/// functional-equation residual both pass. Requires N >= 8.
double estimate_safe_radius(const SchroederSeries& s, double tolerance = kSeriesResidualTolerance);

/// Relative functional-equation residual of the truncated series on |w| = r.
double circle_residual(const SchroederSeries& s, double r, int samples = 64);

/// Coefficients plus safe radius in one step.
SchroederSeries build_schroeder_series(const RationalMap& f, const PeriodicPoint& z0, int order = kDefaultSeriesOrder);

/// Pullback depth used for w: max(0, ceil(log(|w| / r_safe) / log|lambda|)).
int pullback_depth(const SchroederSeries& s, Cplx w);

struct HValue {
    SpherePoint value;
    int depth = 0;
    /// Chordal error estimate: series truncation and rounding, propagated
    /// through the spherical derivatives of the k forward iterates.
    double error_estimate = 0.0;
};

HValue evaluate_h_detailed(const SchroederSeries& s, Cplx w);
SpherePoint evaluate_h(const SchroederSeries& s, Cplx w);

/// Evaluation with a forced pullback depth k >= 0.
SpherePoint evaluate_h_at_depth(const SchroederSeries& s, Cplx w, int depth);

/// log|h(w)| without overflow; for polynomial maps iterates past the
/// floating-point range are continued in logarithmic coordinates.
double log_abs_h(const SchroederSeries& s, Cplx w);

/// h'(w) by the chain rule; NaN when an intermediate iterate is a pole.
Cplx h_derivative(const SchroederSeries& s, Cplx w);

SphereFunction as_function(const SchroederSeries& s);


struct HCriticalPoint {
    Cplx w;
    double residual; ///< |h'(w)|
};

/// Zeros of h' in the box: winding-number scan of h' over an n x n cell grid,
/// refined by Newton iteration on h'.
std::vector<HCriticalPoint> critical_points_of_h(const SchroederSeries& s, const Box& box, int n, unsigned threads = 1);

/// {"z0": [re,im], "lambda": [re,im], "p": int, "coeffs": [[re,im],...], "r_safe": real}
nlohmann::ordered_json series_to_json(const SchroederSeries& s);

} // namespace schroeder
