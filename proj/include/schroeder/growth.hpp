#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schroeder/series.hpp"

namespace schroeder {

/// p log d / log|lambda|.
double valiron_order(int d, int p, Cplx lambda);

struct GrowthProfile {
    std::vector<double> radii;
    std::vector<double> log_max_modulus; ///< L(r) = log max_{|w|=r} |h(w)|
    double slope = 0.0;                  ///< fitted slope of log L against log r
    double theoretical_order = 0.0;
    std::size_t fit_begin = 0;           ///< first profile index used by the fit

    [[nodiscard]] bool monotone(double slack = 1e-9) const;
};

/// log|h(w)|; may be +inf at poles.
using LogModulus = std::function<double(Cplx)>;

struct OrderOptions {
    int samples = 512;
    int refine_iterations = 40;
    /// Angular offset added per radius step (arg lambda keeps circles in phase).
    double phase_step = 0.0;
    unsigned threads = 1;
};

/// Least-squares slope of log L(r) against log r over the top decade of radii
/// (at least three points). Throws when h takes the value infinity on a circle.
GrowthProfile empirical_order(const LogModulus& log_abs, const std::vector<double>& radii,
                              const OrderOptions& options = {});

/// r_safe |lambda|^j for j = 0, 1, ... up to r_max.
std::vector<double> geometric_radii(double r0, double ratio, double r_max);

/// Profile of a Schroeder map out to r_max with the schedule above; rejects
/// non-polynomial maps.
GrowthProfile schroeder_growth(const SchroederSeries& s, double r_max, const OrderOptions& options = {});

struct DcaBudget {
    int direct = 1;
    std::optional<int> finite; ///< only for entire functions
};

DcaBudget dca_budget(double rho, bool entire);

/// Columns r, L, loglogL, slope.
std::string growth_csv(const GrowthProfile& g);

} // namespace schroeder
