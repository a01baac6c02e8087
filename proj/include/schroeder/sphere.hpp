#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace schroeder {

using Cplx = std::complex<double>;

/// A point of the Riemann sphere: a finite complex number or the point at
/// infinity. Non-finite complex inputs collapse to infinity.
class SpherePoint {
public:
    SpherePoint() = default;
    SpherePoint(Cplx z); // NOLINT(google-explicit-constructor)
    SpherePoint(double x) : SpherePoint(Cplx(x, 0.0)) {} // NOLINT

    static SpherePoint infinity();

    [[nodiscard]] bool is_infinity() const { return infinite_; }
    [[nodiscard]] bool is_finite() const { return !infinite_; }

    /// Finite value. Throws for the point at infinity.
    [[nodiscard]] Cplx value() const;

    /// Stereographic height-free modulus: |z| for finite points, +inf otherwise.
    [[nodiscard]] double modulus() const;

    friend bool operator==(const SpherePoint& a, const SpherePoint& b);

private:
    Cplx z_{0.0, 0.0};
    bool infinite_ = false;
};

/// Chordal distance normalised to [0, 1]:
/// |a-b| / (sqrt(1+|a|^2) sqrt(1+|b|^2)), and 1/sqrt(1+|a|^2) against infinity.
double chordal_distance(const SpherePoint& a, const SpherePoint& b);

/// The two standard charts of the sphere: z (|z| <= 1) and 1/z (|z| > 1).
enum class Chart { Zero, Infinity };

Chart natural_chart(const SpherePoint& p);

/// Local coordinate of p in the given chart (0 for infinity in Chart::Infinity).
Cplx chart_coordinate(const SpherePoint& p, Chart chart);

/// Inverse of chart_coordinate.
SpherePoint from_chart(Cplx t, Chart chart);

std::string to_string(const SpherePoint& p);

/// A function of one complex variable with values on the sphere, e.g. a
/// Schroeder map or a closed-form oracle.
using SphereFunction = std::function<SpherePoint(Cplx)>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

} // namespace schroeder
