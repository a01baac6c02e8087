#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "schroeder/dynamics.hpp"
#include "schroeder/grid.hpp"

namespace schroeder {

enum class Verdict { Direct, Indirect, NotASingularity, Inconclusive };

std::string_view to_string(Verdict v);

/// Mask of pixels with chi(values, a) < r.
std::vector<std::uint8_t> preimage_mask(const std::vector<SpherePoint>& values, const SpherePoint& a, double r);

/// Components of h^{-1}(U_r(a)) on an n x n grid over [-R, R]^2.
Labeling preimage_components(const SphereFunction& h, const SpherePoint& a, double r, double half_width, int n,
                             unsigned threads = 1);

struct TractOptions {
    std::vector<double> radii{0.25, 0.0625, 0.015625, 0.00390625};
    double half_width = 20.0;
    int grid = 256;
    int box_levels = 3; ///< boxes R, 2R, 4R, ...
    unsigned threads = 1;
    SolveOptions solve{};
};

/// One nested chain of unbounded components, top rung first.
struct TractChain {
    std::vector<int> components;
    std::vector<std::size_t> solution_counts;
    /// Smallest |w| among solutions of h(w) = a in each rung; +inf when none.
    std::vector<double> innermost_solution;
    Verdict verdict = Verdict::Inconclusive;
    std::string diagnostics;
};

/// Per-value tract data on a ladder of radii and boxes.
struct TractFamily {
    SpherePoint a;
    TractOptions options;
    /// masks[i][L]: rung i on box level L (half-width R 2^L).
    std::vector<std::vector<Labeling>> masks;
    /// h at the pixel centres of box level 0.
    std::vector<SpherePoint> values;
    /// unbounded[i][c] for components c of masks[i][0].
    std::vector<std::vector<bool>> unbounded;
    /// nesting[i][c]: component of rung i-1 containing component c of rung i (rung 0 maps to -1).
    std::vector<std::vector<int>> nesting;
    std::vector<TractChain> chains;
    bool stable = true;

    [[nodiscard]] std::size_t count(Verdict v) const;
    [[nodiscard]] bool singular() const { return count(Verdict::Direct) + count(Verdict::Indirect) > 0; }
};

/// Builds the rungs, flags unbounded components, follows the nesting and
/// classifies every chain.
TractFamily compute_tract_family(const SphereFunction& h, const SpherePoint& a, const TractOptions& options = {});

/// Verdict of each chain from root searches inside its components.
void classify_singularity(TractFamily& family, const SphereFunction& h);

struct LambdaAction {
    /// image[i]: chain of the target family hit by lambda * chain i of the source, or -1.
    std::vector<int> image;
    bool injective = true;
    bool permutation = false; ///< only meaningful when source and target coincide
    std::vector<std::vector<int>> cycles;
};

/// Matches chains of `source` (over a) with chains of `target` (over f^p(a))
/// by multiplying deepest-rung pixels by lambda. Pass the same family twice
/// for fixed values.
LambdaAction lambda_action(const TractFamily& source, const TractFamily& target, Cplx lambda);

enum class CoverVerdict { CoversCompletely, UnboundedTractFound, Inconclusive };

std::string_view to_string(CoverVerdict v);

struct CoverRung {
    double r = 0.0;
    std::size_t components = 0;
    std::size_t persistent = 0; ///< boundary contact at every box size
    std::size_t marginal = 0;   ///< boundary contact at the largest box only
};

struct CoverReport {
    CoverVerdict verdict = CoverVerdict::Inconclusive;
    std::vector<CoverRung> rungs;
};

CoverReport complete_covering_probe(const SphereFunction& h, const SpherePoint& a, const TractOptions& options = {});

struct CensusEntry {
    SpherePoint a;
    TractFamily family;
    /// Chain indices of this family that lie on a cycle of the lambda action.
    std::vector<int> periodic_chains;
    std::optional<std::size_t> image_entry; ///< census entry holding f^p(a)
    LambdaAction action;
};

struct Census {
    std::vector<CensusEntry> entries;
    std::size_t direct = 0;
    std::size_t indirect = 0;
    std::size_t finite_singular = 0; ///< singular chains over finite values
};

/// Forward orbits of the critical points (first `orbit_length` points) and
/// the attracting and parabolic cycles, deduplicated. Orbit points closer
/// than `absorb` (chordal) to such a cycle are dropped in favour of it.
std::vector<SpherePoint> census_candidates(const RationalMap& f, int orbit_length = 6, int max_period = 4,
                                           double absorb = 1.0 / 64.0);

Census singularity_census(const SphereFunction& h, const RationalMap& f, int period, Cplx lambda,
                          const std::vector<SpherePoint>& values, const TractOptions& options = {});

struct DynamicsSummary {
    std::vector<SpherePoint> attracting;  ///< AT(f), superattracting included
    std::vector<SpherePoint> parabolic;   ///< PB(f)
    std::vector<SpherePoint> indifferent; ///< undetermined indifferent cycles
    std::vector<SpherePoint> mane;        ///< approximation of M(f)
};

struct CrossCheck {
    bool direct_in_attracting = true;
    bool periodic_in_at_pb = true;
    bool singular_in_unhyperbolic = true;
    std::vector<std::string> discrepancies;
    [[nodiscard]] bool passed() const { return direct_in_attracting && periodic_in_at_pb && singular_in_unhyperbolic; }
};

CrossCheck singular_value_crosscheck(const Census& census, const DynamicsSummary& dynamics, double tol = 1e-6);

nlohmann::ordered_json sphere_point_json(const SpherePoint& a);
nlohmann::ordered_json tract_family_json(const TractFamily& family);

} // namespace schroeder
