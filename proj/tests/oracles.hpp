// Test-only oracles, independent of the library's implementation paths.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "ccm/core.hpp"

namespace ccm::testing {

// Exhaustive cell enumeration over the whole lattice (no bounding box):
// centers strictly inside the disc of radius r_eff.
inline std::vector<GridIndex> brute_force_disc(const Vec2& center, double r_eff,
                                               const GridMapping& m) {
    std::vector<GridIndex> out;
    const double cs = m.cell_size();
    for (int i = 1; i <= m.n; ++i) {
        for (int j = 1; j <= m.n; ++j) {
            const Vec2 c((i - 0.5) * cs, (j - 0.5) * cs);
            if ((c - center).norm() < r_eff) out.push_back({i, j});
        }
    }
    return out;
}

inline std::vector<GridIndex> brute_force_lens(const Vec2& ca, const Vec2& cb, double r_eff,
                                               const GridMapping& m) {
    std::vector<GridIndex> out;
    const double cs = m.cell_size();
    for (int i = 1; i <= m.n; ++i) {
        for (int j = 1; j <= m.n; ++j) {
            const Vec2 c((i - 0.5) * cs, (j - 0.5) * cs);
            if ((c - ca).norm() < r_eff && (c - cb).norm() < r_eff) out.push_back({i, j});
        }
    }
    return out;
}

// Area of the intersection of two discs of equal radius R at center distance d.
inline double lens_area(double R, double d) {
    if (d >= 2.0 * R) return 0.0;
    return 2.0 * R * R * std::acos(d / (2.0 * R)) - 0.5 * d * std::sqrt(4.0 * R * R - d * d);
}

// Discrete integrator of uniformly accelerated motion with time step h.
inline Eigen::Matrix3d companion_matrix(double h) {
    Eigen::Matrix3d w;
    w << 1.0, h, 0.5 * h * h,
         0.0, 1.0, h,
         0.0, 0.0, 1.0;
    return w;
}

}  // namespace ccm::testing
