#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "schroeder/dynamics.hpp"
#include "schroeder/tracts.hpp"

namespace schroeder {

/// Largest orbit length accepted by critical_orbit.
inline constexpr std::size_t kOrbitBudget = 1000000;

struct OrbitData {
    SpherePoint c;
    std::vector<SpherePoint> samples; ///< f^k(c), k = 0..K (shorter when escaped)
    bool escaped = false;             ///< polynomial orbit left the escape disk
    std::size_t escape_step = 0;
    std::size_t tail_begin = 0;       ///< first sample of the tail window
};

OrbitData critical_orbit(const RationalMap& f, const SpherePoint& c, std::size_t k_max = 10000,
                         double tail_fraction = 0.5);

struct Cluster {
    SpherePoint center;
    double radius = 0.0;     ///< largest chordal distance of a member to the centre
    std::size_t count = 0;
};

struct OmegaLimitApprox {
    SpherePoint owner;
    std::vector<Cluster> clusters;
    bool recurrent = false;
};

/// Greedy chordal epsilon-clustering of the orbit tail; clusters hit fewer
/// than min_count times are dropped. Escaped orbits give {inf}.
OmegaLimitApprox omega_limit(const OrbitData& orbit, double epsilon = 1e-3, std::size_t min_count = 5);

struct JuliaTestOptions {
    double epsilon = 1e-3;
    int ring = 16;
    int max_iterations = 2000;
};

/// Polynomials: escape-time classification of a small disk around z is
/// mixed. Rational maps: the spherical derivative of f^n on the disk
/// exceeds 10 / epsilon for some n.
bool in_julia_set(const RationalMap& f, const SpherePoint& z, const JuliaTestOptions& options = {});

struct ManeContribution {
    SpherePoint critical;
    bool in_julia = false;
    OmegaLimitApprox omega;
};

struct ManeSetApprox {
    std::vector<ManeContribution> critical; ///< one entry per distinct critical point
    std::vector<Cluster> points;            ///< union of contributing clusters

    [[nodiscard]] bool empty() const { return points.empty(); }
};

ManeSetApprox mane_set_approx(const RationalMap& f, std::size_t k_max = 10000, double epsilon = 1e-3,
                              unsigned threads = 1);

struct ProbeOptions {
    double r = 0.05;
    int k_max = 10;
    int grid = 1024;   ///< per sphere chart
    unsigned threads = 1;
    std::size_t preimage_budget = 200000;
};

struct ProbeReport {
    SpherePoint a;
    double r = 0.0;
    std::vector<int> degrees;              ///< max covering degree for k = 1..depth
    std::vector<std::size_t> components;   ///< labelled components per depth
    std::vector<std::size_t> critical_points; ///< critical points of f^k over U_r(a) per depth
    int depth = 0;                         ///< deepest k with a complete result
    bool partial = false;                  ///< stopped early at grid resolution
    bool grows = false;
    int max_degree = 1;
};

/// Covering degrees of f^k on the components of f^{-k}(U_r(a)).
ProbeReport semihyperbolicity_probe(const RationalMap& f, const SpherePoint& a, const ProbeOptions& options = {});

/// Attracting, parabolic and undetermined indifferent cycles up to
/// max_period, plus the Mane set approximation.
DynamicsSummary summarize_dynamics(const RationalMap& f, int max_period = 4, std::size_t k_max = 10000,
                                   double epsilon = 1e-3, unsigned threads = 1);

nlohmann::ordered_json unhyp_json(const ManeSetApprox& mane, const ProbeReport* probe);

} // namespace schroeder
