#include "schroeder/sphere.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace schroeder {

SpherePoint::SpherePoint(Cplx z) : z_(z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        infinite_ = true;
        z_ = {};
    }
}

SpherePoint SpherePoint::infinity() {
    SpherePoint p;
    p.infinite_ = true;
    return p;
}

Cplx SpherePoint::value() const {
    if (infinite_) {
        throw PreconditionError("value() requested for the point at infinity");
    }
    return z_;
}

double SpherePoint::modulus() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : std::abs(z_);
}

bool operator==(const SpherePoint& a, const SpherePoint& b) {
    if (a.infinite_ || b.infinite_) {
        return a.infinite_ == b.infinite_;
    }
    return a.z_ == b.z_;
}

double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
    if (a.is_infinity() && b.is_infinity()) {
        return 0.0;
    }
    if (a.is_infinity() || b.is_infinity()) {
        const Cplx z = a.is_infinity() ? b.value() : a.value();
        return 1.0 / std::hypot(1.0, std::abs(z));
    }
    const Cplx za = a.value();
    const Cplx zb = b.value();
    // For large moduli compare reciprocals to avoid overflow in the norms.
    if (std::abs(za) > 1.0 && std::abs(zb) > 1.0) {
        const Cplx ua = 1.0 / za;
        const Cplx ub = 1.0 / zb;
        return std::abs(ua - ub) / (std::hypot(1.0, std::abs(ua)) * std::hypot(1.0, std::abs(ub)));
    }
    return std::abs(za - zb) / (std::hypot(1.0, std::abs(za)) * std::hypot(1.0, std::abs(zb)));
}

Chart natural_chart(const SpherePoint& p) {
    return (p.is_finite() && std::abs(p.value()) <= 1.0) ? Chart::Zero : Chart::Infinity;
}

Cplx chart_coordinate(const SpherePoint& p, Chart chart) {
    if (chart == Chart::Zero) {
        return p.value();
    }
    if (p.is_infinity()) {
        return {0.0, 0.0};
    }
    return 1.0 / p.value();
}

SpherePoint from_chart(Cplx t, Chart chart) {
    if (chart == Chart::Zero) {
        return {t};
    }
    if (t == Cplx(0.0, 0.0)) {
        return SpherePoint::infinity();
    }
    return {1.0 / t};
}

std::string to_string(const SpherePoint& p) {
    if (p.is_infinity()) {
        return "inf";
    }
    std::ostringstream os;
    os.precision(17);
    os << p.value().real() << (p.value().imag() < 0 ? "-" : "+") << std::abs(p.value().imag()) << "i";
    return os.str();
}

} // namespace schroeder
