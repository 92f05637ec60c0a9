#include "navsim/cr3bp.hpp"

#include <cmath>
#include <sstream>

#include "navsim/errors.hpp"

namespace navsim {

MassRatio::MassRatio(double mu) : mu_(mu) {
    if (!(mu > 0.0 && mu < 0.5)) {
        std::ostringstream os;
        os << "mass ratio must lie in (0, 0.5), got " << mu;
        throw ValidationError("mu", os.str());
    }
}

PrimaryDistances primary_distances(const StateVector& s, MassRatio mu) {
    const double m = mu.value();
    const double yz2 = s[1] * s[1] + s[2] * s[2];
    const double dx1 = s[0] + m;
    const double dx2 = s[0] - 1.0 + m;
    return {std::sqrt(dx1 * dx1 + yz2), std::sqrt(dx2 * dx2 + yz2)};
}

void check_proximity(const PrimaryDistances& r) {
    if (!(r.r1 >= kProximityGuard) || !(r.r2 >= kProximityGuard)) {
        std::ostringstream os;
        os << "state within " << kProximityGuard << " DU of a primary (r1=" << r.r1
           << ", r2=" << r.r2 << ")";
        throw DegenerateDistance(os.str());
    }
}

double effective_potential(const StateVector& s, MassRatio mu) {
    const auto r = primary_distances(s, mu);
    check_proximity(r);
    const double m = mu.value();
    return 0.5 * (s[0] * s[0] + s[1] * s[1]) + (1.0 - m) / r.r1 + m / r.r2;
}

Vec3 potential_gradient(const StateVector& s, MassRatio mu) {
    const auto r = primary_distances(s, mu);
    check_proximity(r);
    const double m = mu.value();
    const double k1 = (1.0 - m) / (r.r1 * r.r1 * r.r1);
    const double k2 = m / (r.r2 * r.r2 * r.r2);
    return {s[0] - k1 * (s[0] + m) - k2 * (s[0] - 1.0 + m),
            s[1] - k1 * s[1] - k2 * s[1],
            -k1 * s[2] - k2 * s[2]};
}

Vec6 cr3bp_derivative(const StateVector& s, MassRatio mu, const Vec3& d) {
    const Vec3 g = potential_gradient(s, mu);
    Vec6 out;
    out << s[3], s[4], s[5],
        2.0 * s[4] + g[0] + d[0],
        -2.0 * s[3] + g[1] + d[1],
        g[2] + d[2];
    return out;
}

double jacobi_constant(const StateVector& s, MassRatio mu) {
    return 2.0 * effective_potential(s, mu) - s.tail<3>().squaredNorm();
}

}  // namespace navsim
