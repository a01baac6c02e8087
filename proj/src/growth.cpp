#include "schroeder/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "schroeder/parallel.hpp"

namespace schroeder {

double valiron_order(int d, int p, Cplx lambda) {
    if (d < 2 || p < 1) {
        throw PreconditionError("Valiron order needs d >= 2 and p >= 1");
    }
    if (!(std::abs(lambda) > 1.0)) {
        throw PreconditionError("Valiron order needs |lambda| > 1");
    }
    return p * std::log(static_cast<double>(d)) / std::log(std::abs(lambda));
}

bool GrowthProfile::monotone(double slack) const {
    for (std::size_t i = 1; i < log_max_modulus.size(); ++i) {
        if (log_max_modulus[i] < log_max_modulus[i - 1] - slack * (1.0 + std::abs(log_max_modulus[i - 1]))) {
            return false;
        }
    }
    return true;
}

namespace {

double circle_max(const LogModulus& log_abs, double r, double phase, const OrderOptions& o) {
    const int m = std::max(8, o.samples);
    std::vector<double> vals(static_cast<std::size_t>(m));
    const double step = 2.0 * std::numbers::pi / m;
    parallel_for(vals.size(), o.threads, [&](std::size_t i) {
        vals[i] = log_abs(std::polar(r, phase + step * static_cast<double>(i)));
    });
    for (double v : vals) {
        if (std::isinf(v) && v > 0.0) {
            throw Error("h has a pole on |w| = " + std::to_string(r) +
                        "; growth of meromorphic h needs the spherical characteristic");
        }
    }
    const auto best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    double lo = phase + step * (best - 1);
    double hi = phase + step * (best + 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto at = [&](double t) { return log_abs(std::polar(r, t)); };
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = at(x1);
    double f2 = at(x2);
    double top = std::max({vals[static_cast<std::size_t>(best)], f1, f2});
    for (int it = 0; it < o.refine_iterations; ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = at(x2);
        }
        top = std::max({top, f1, f2});
    }
    return top;
}

} // namespace

GrowthProfile empirical_order(const LogModulus& log_abs, const std::vector<double>& radii, const OrderOptions& options) {
    if (radii.empty()) {
        throw PreconditionError("radius schedule is empty");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
            throw PreconditionError("radii must be positive and strictly increasing");
        }
    }
    GrowthProfile g;
    g.radii = radii;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        g.log_max_modulus.push_back(circle_max(log_abs, radii[i], options.phase_step * static_cast<double>(i), options));
    }
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (g.log_max_modulus[i] > 0.0) {
            usable.push_back(i);
        }
    }
    if (usable.size() < 3) {
        throw PreconditionError("fewer than three radii with log max modulus > 0");
    }
    const double top = radii.back();
    std::size_t first = usable.size() - 3;
    while (first > 0 && radii[usable[first - 1]] >= top / 10.0) {
        --first;
    }
    g.fit_begin = usable[first];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(usable.size() - first);
    for (std::size_t k = first; k < usable.size(); ++k) {
        const double x = std::log(radii[usable[k]]);
        const double y = std::log(g.log_max_modulus[usable[k]]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    g.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return g;
}

std::vector<double> geometric_radii(double r0, double ratio, double r_max) {
    if (!(r0 > 0.0) || !(ratio > 1.0)) {
        throw PreconditionError("geometric radii need r0 > 0 and ratio > 1");
    }
    std::vector<double> out;
    for (double r = r0; r <= r_max * (1.0 + 1e-12); r *= ratio) {
        out.push_back(r);
    }
    return out;
}

GrowthProfile schroeder_growth(const SchroederSeries& s, double r_max, const OrderOptions& options) {
    if (!s.map().is_polynomial()) {
        throw PreconditionError("empirical order needs an entire Schroeder map (polynomial f); "
                                "meromorphic growth needs the spherical characteristic");
    }
    OrderOptions o = options;
    o.phase_step = std::arg(s.lambda());
    auto g = empirical_order([&s](Cplx w) { return log_abs_h(s, w); },
                             geometric_radii(s.safe_radius(), std::abs(s.lambda()), r_max), o);
    g.theoretical_order = valiron_order(s.map().degree(), s.period(), s.lambda());
    return g;
}

DcaBudget dca_budget(double rho, bool entire) {
    if (!(rho >= 0.0)) {
        throw PreconditionError("order must be non-negative");
    }
    DcaBudget b;
    b.direct = static_cast<int>(std::floor(std::max(2.0 * rho, 1.0) + 1e-9));
    if (entire) {
        b.finite = static_cast<int>(std::floor(2.0 * rho + 1e-9));
    }
    return b;
}

std::string growth_csv(const GrowthProfile& g) {
    std::ostringstream os;
    os.precision(17);
    os << "r,L,loglogL,slope\n";
    for (std::size_t i = 0; i < g.radii.size(); ++i) {
        const double L = g.log_max_modulus[i];
        os << g.radii[i] << ',' << L << ',';
        if (L > 0.0) {
            os << std::log(L);
        } else {
            os << "nan";
        }
        os << ',' << g.slope << '\n';
    }
    return os.str();
}

} // namespace schroeder
