// Geometry, real-space <-> lattice mapping, and the scenario data model
// shared by every other module.
//
// Conventions used throughout the library:
//   * World coordinates are meters, velocities m/s. The arena is the axis
//     aligned square [0, arena_width] x [0, arena_height].
//   * Lattice indices (i, j) are 1-based; i indexes x, j indexes y.
//   * Fields over the lattice are stored row-major with i as the row, so
//     field(i-1, j-1) addresses cell (i, j).
//   * Cell membership for footprints is decided by cell-center inclusion:
//     a cell belongs to a disc iff its center lies strictly inside it.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ccm/errors.hpp"

namespace ccm {

using Vec2 = Eigen::Vector2d;

using Field = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Counterclockwise 90-degree rotation (the "left" normal of a heading).
inline Vec2 rot90ccw(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline Vec2 rot90cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct GridIndex {
    int i = 1;  // 1-based, along x
    int j = 1;  // 1-based, along y
    bool operator==(const GridIndex&) const = default;
};

struct GridMapping {
    double arena_width = 8.0;   // m
    double arena_height = 8.0;  // m
    int n = 80;                 // lattice side, cells

    double cell_size() const { return arena_width / n; }
    bool contains(const Vec2& p) const {
        return p.x() >= 0.0 && p.x() <= arena_width && p.y() >= 0.0 && p.y() <= arena_height;
    }
    bool valid_index(GridIndex g) const {
        return g.i >= 1 && g.i <= n && g.j >= 1 && g.j <= n;
    }
};

// Real space -> network space. Clamped to [1, n] so points on the far arena
// edge land in the last cell. Throws OutOfArena for points outside the arena.
GridIndex world_to_grid(const Vec2& p, const GridMapping& m);

// Network space -> real space (cell center). Throws BadIndex.
Vec2 grid_to_world(GridIndex g, const GridMapping& m);

// Configuration-space footprint of a disc obstacle: all cells whose centers
// lie strictly within radius + agent_radius of the center (Minkowski sum of
// the obstacle disc with the agent disc). Cells outside the arena are
// dropped; the result may be empty.
std::vector<GridIndex> inflate_footprint(const Vec2& center, double radius,
                                         double agent_radius, const GridMapping& m);

enum class Mode { AvUs, CoUs };

inline const char* mode_name(Mode m) { return m == Mode::AvUs ? "avus" : "cous"; }

struct Pedestrian {
    int id = 0;
    Vec2 position{0, 0};
    Vec2 velocity{0, 0};
    double personal_radius = 0.4;   // r_p, m
    double reaction_distance = 2.0; // d_r, m; must exceed r_p
    Vec2 goal{0, 0};
};

struct Scenario {
    GridMapping mapping;
    Vec2 agent_start{1.0, 1.0};
    double agent_radius = 0.2;
    Vec2 target{7.0, 7.0};
    double nav_tolerance = 0.3;  // m
    std::vector<Pedestrian> pedestrians;
    Mode mode = Mode::AvUs;
    // Seconds of real time per mental step. When unset the planner derives it
    // from the measured wavefront speed so that the virtual agent (the front)
    // moves at agent_speed.
    std::optional<double> time_base;
    double agent_speed = 1.0;  // m/s
    std::uint64_t seed = 0;
};

// Throws InvariantViolation naming the violated constraint.
void validate(const Scenario& s);

}  // namespace ccm
