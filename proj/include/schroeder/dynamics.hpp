#pragma once

#include <string_view>
#include <vector>

#include "schroeder/rational_map.hpp"

namespace schroeder {

enum class PeriodicClass { Superattracting, Attracting, Parabolic, IndifferentUndetermined, Repelling };

std::string_view to_string(PeriodicClass c);

/// Thresholds for classify(). The indifferent band is ||lambda|-1| <= epsilon;
/// a multiplier counts as parabolic when |lambda^n - 1| < root_of_unity_tol
/// for some n <= max_root_order.
struct ClassifyThresholds {
    double superattracting = 1e-9;
    double epsilon = 1e-9;
    int max_root_order = 64;
    double root_of_unity_tol = 1e-6;
};

PeriodicClass classify(Cplx multiplier, const ClassifyThresholds& t = {});

struct CriticalPoint {
    SpherePoint point;
    int multiplicity = 1;
};

/// Critical points of f with multiplicity; the multiplicities sum to 2d-2.
std::vector<CriticalPoint> critical_points(const RationalMap& f);

struct PeriodicPoint {
    SpherePoint z;
    int period = 1;
    Cplx multiplier;
    PeriodicClass kind = PeriodicClass::Repelling;
    int cycle = 0;          ///< index of the cycle this point belongs to
    int multiplicity = 1;   ///< multiplicity as a root of f^p(z) = z
    bool clustered = false; ///< several solver roots merged into this point
};

/// Largest admissible value of d^p for periodic point searches.
inline constexpr long long kPeriodicBudget = 4096;

/// Every solution of f^p(z) = z on the sphere, with repetition; d^p + 1 points.
std::vector<SpherePoint> fixed_points_of_iterate(const RationalMap& f, int p);

/// Points of exact period p, grouped into cycles, each with the multiplier of
/// its cycle computed by the chain rule along its own orbit.
std::vector<PeriodicPoint> periodic_points(const RationalMap& f, int p);

/// (f^p)'(z) as the product of chart derivatives along the orbit of z.
Cplx cycle_multiplier(const RationalMap& f, const SpherePoint& z, int p);

/// Newton-polishes an approximate solution of f^p(z) = z (finite z only).
SpherePoint refine_periodic_point(const RationalMap& f, const SpherePoint& z, int p);

/// The periodic point of period p closest to `guess`, polished.
PeriodicPoint nearest_periodic_point(const RationalMap& f, const SpherePoint& guess, int p);

struct ExceptionalSet {
    std::vector<SpherePoint> points;
    [[nodiscard]] bool contains(const SpherePoint& a, double tol = 1e-6) const;
};

/// Points a with f^{-2}(a) = {a}, found among the totally ramified critical points.
ExceptionalSet exceptional_set(const RationalMap& f);

} // namespace schroeder
