#pragma once

#include <functional>
#include <span>
#include <vector>

#include "schroeder/sphere.hpp"

namespace schroeder {

/// Polynomial coefficients in ascending degree order.
using Coeffs = std::vector<Cplx>;

namespace poly {

Cplx evaluate(std::span<const Cplx> c, Cplx z);

/// Value and first derivative by a single Horner pass.
std::pair<Cplx, Cplx> evaluate_with_derivative(std::span<const Cplx> c, Cplx z);

Coeffs derivative(std::span<const Cplx> c);
Coeffs multiply(std::span<const Cplx> a, std::span<const Cplx> b);
Coeffs add(std::span<const Cplx> a, std::span<const Cplx> b);
Coeffs scale(std::span<const Cplx> a, Cplx s);

/// Drops trailing coefficients with |c_k| <= rel_tol * max|c|.
Coeffs trimmed(Coeffs c, double rel_tol = 0.0);

/// Index of the highest coefficient above rel_tol * max|c|; -1 for the zero polynomial.
int degree(std::span<const Cplx> c, double rel_tol = 0.0);

/// Sum of |c_k| |z|^k, the backward-error scale of an evaluation at z.
double absolute_scale(std::span<const Cplx> c, Cplx z);

} // namespace poly

/// Newton correction p(z)/p'(z) for some polynomial p.
using NewtonRatio = std::function<Cplx(Cplx)>;

struct AberthOptions {
    int max_iterations = 800;
    double relative_step = 4e-16;
};

struct AberthResult {
    std::vector<Cplx> roots;
    std::vector<bool> converged;
    int iterations = 0;
};

/// Simultaneous Aberth-Ehrlich iteration from the given starting points.
AberthResult aberth_ehrlich(std::vector<Cplx> start, const NewtonRatio& ratio,
                            const AberthOptions& options = {});

/// Starting points from the upper Newton polygon of log|c_k|; spreads the
/// points over the annuli where the roots actually live.
std::vector<Cplx> newton_polygon_start(std::span<const Cplx> c);

/// Thrown when a root solve fails; carries the per-root residuals.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}
    [[nodiscard]] const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// All complex roots (with repetition) of a polynomial with nonzero leading
/// coefficient. Exact zero low-order coefficients are peeled off as roots at 0.
std::vector<Cplx> polynomial_roots(std::span<const Cplx> c);

struct ClusteredRoot {
    SpherePoint point;
    int multiplicity = 1;
    double spread = 0.0;
};

/// Merges points closer than tol in the chordal metric; the representative is
/// the mean in the chart of the first member.
std::vector<ClusteredRoot> cluster_points(std::span<const SpherePoint> points, double tol);

} // namespace schroeder
