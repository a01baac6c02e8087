#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "schroeder/grid.hpp"
#include "schroeder/series.hpp"

namespace schroeder {

/// A path gamma on [0, T] with gamma(t + 1) = lambda^N gamma(t).
struct ArcTrace {
    Cplx lambda_n;                ///< lambda^N
    int n = 1;                    ///< N
    std::size_t period_samples = 0; ///< samples per unit of t (first sample of each period included)
    std::vector<double> t;
    std::vector<Cplx> points;
    std::vector<double> arg;      ///< continuous argument along the path

    [[nodiscard]] double spiral_ratio(std::size_t i) const { return arg[i] / std::log(std::abs(points[i])); }
};

/// Extends base (gamma on [0, 1], base.back() == lambda_n * base.front()) until
/// log|gamma| exceeds max_log_modulus.
ArcTrace extend_arc(const std::vector<Cplx>& base, Cplx lambda_n, int n, double max_log_modulus = 230.0);

/// Shortest 8-connected grid path inside component `id` from w0 to lambda^N w0,
/// with exact endpoints, extended by the translation identity.
ArcTrace trace_asymptotic_arc(const Labeling& mask, int id, Cplx w0, Cplx lambda, int n,
                              double max_log_modulus = 230.0);

/// Running maximum of (arg gamma / log|gamma|)^2 over the last half of the samples.
double spiral_term(const ArcTrace& arc);

/// (q arg(lambda) - 2 pi p) / (q log|lambda|) with the branch of arg lambda
/// closest to 2 pi p / q.
double spiral_closed_form(int q, int p, Cplx lambda);

/// Branch of arg(lambda) minimising |theta - 2 pi p / q|.
double closest_arg_branch(Cplx lambda, int p, int q);

struct PlyReport {
    int q_inf = 0;
    int p_inf = 0;
    int m_inf = 0;
    int q = 0;
    int p = 0;
    double arg_branch = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool violation = false;
    bool el_condition = false;
};

/// lhs = q_inf (1 + ((theta - 2 pi p / q) / log|lambda|)^2), rhs = 2 period log d / log|lambda|.
PlyReport ply_check(int q_inf, int p, int q, Cplx lambda, int d, int period = 1);

struct BasinOptions {
    double half_width = 0.0; ///< 0 selects 2 r_safe
    int grid = 512;
    double hole_fraction = 0.125;
    int max_iterations = 256;
    unsigned threads = 1;
    double max_log_modulus = 230.0;
};

struct BasinComponent {
    int id = 0;              ///< component id on the largest box
    int image = -1;          ///< index (cyclic order) of lambda * this component
    Cplx crossing;           ///< first crossing of the reference circle by its arc
    double crossing_t = 0.0;
    double crossing_angle = 0.0;
    bool traced = false;
};

struct BasinReport {
    double half_width = 0.0;
    double reference_radius = 0.0;
    int q_inf = 0;
    int p_inf = 0;
    int m_inf = 0;
    int q = 0;
    int p = 0;
    int p_arc = 0;               ///< p read off the arc's argument increment
    int cap = 1;                 ///< floor(2 rho v 1)
    bool artifact = false;       ///< q_inf above cap
    bool consistent = false;     ///< lambda acts as a rotation of the cyclic order
    bool el_condition = false;
    double spiral = 0.0;         ///< spiral_term of the first component's arc
    double spiral_closed = 0.0;  ///< closed-form ratio for comparison
    std::vector<BasinComponent> components; ///< in cyclic order
    ArcTrace arc;                ///< arc of the first component
    std::vector<std::string> diagnostics;
    PlyReport ply;

    [[nodiscard]] bool accepted() const { return consistent && !artifact && el_condition; }
};

/// 1 where f^k(z) leaves the escape disk within max_iterations.
std::vector<std::uint8_t> escape_mask(const RationalMap& f, const std::vector<SpherePoint>& values, int max_iterations,
                                      unsigned threads = 1);

/// Components of h^{-1}(basin of infinity) for a polynomial map, their cyclic
/// order, the rotation numbers under lambda, asymptotic arcs and the
/// resulting inequality report.
BasinReport basin_components_of_infinity(const SchroederSeries& s, const BasinOptions& options = {});

/// Per pixel: 0 bounded orbit, 1 escaping within one pixel of the Julia set
/// (distance estimate), 2 escaping and clear of it.
std::vector<std::uint8_t> julia_classes(const SchroederSeries& s, const Grid& grid, int max_iterations,
                                        unsigned threads = 1);

/// True when the Julia-proximity set (classes 0 and 1) component containing
/// 0 reaches the edge of the grid.
bool el_heuristic(const Grid& grid, const std::vector<std::uint8_t>& classes);

nlohmann::ordered_json ply_json(const PlyReport& r, bool accepted);

} // namespace schroeder
