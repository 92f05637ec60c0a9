#pragma once

#include <random>

#include "navsim/cr3bp.hpp"
#include "navsim/lft_model.hpp"

namespace navsim::test {

// Random state whose ranges fall inside the box: position drawn around the
// Moon at r2 in [r2_min, r2_max], rejected until r1 is inside too.
inline StateVector random_state_in_box(std::mt19937_64& rng, const ParamBox& box, MassRatio mu) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> r2d(box.r2_min, box.r2_max);
    const double m = mu.value();
    for (;;) {
        Vec3 dir(u(rng), u(rng), u(rng));
        const double n = dir.norm();
        if (n < 1e-3 || n > 1.0) continue;
        const Vec3 p = Vec3(1.0 - m, 0.0, 0.0) + r2d(rng) * dir / n;
        const double r1 = (p - Vec3(-m, 0.0, 0.0)).norm();
        if (r1 < box.r1_min || r1 > box.r1_max) continue;
        StateVector s;
        s << p, u(rng), u(rng), u(rng);
        return s;
    }
}

// (x, y, z, vx, vy, vz) -> (x, -y, z, -vx, vy, -vz): maps a trajectory onto
// its time reversal.
inline StateVector mirror_xz(const StateVector& s) {
    StateVector m = s;
    m[1] = -s[1];
    m[3] = -s[3];
    m[5] = -s[5];
    return m;
}

inline StateVector reference_state() {
    StateVector s;
    s << 1.02950089, 0.0, -0.18680810, 0.0, -0.11898000, 0.0;
    return s;
}

}  // namespace navsim::test
