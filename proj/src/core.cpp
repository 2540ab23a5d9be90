#include "ccm/core.hpp"

#include <algorithm>
#include <string>

namespace ccm {

GridIndex world_to_grid(const Vec2& p, const GridMapping& m) {
    if (!p.allFinite() || !m.contains(p)) {
        throw OutOfArena("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                         ") outside arena");
    }
    const double cs = m.cell_size();
    GridIndex g{static_cast<int>(std::floor(p.x() / cs)) + 1,
                static_cast<int>(std::floor(p.y() / cs)) + 1};
    g.i = std::clamp(g.i, 1, m.n);
    g.j = std::clamp(g.j, 1, m.n);
    return g;
}

Vec2 grid_to_world(GridIndex g, const GridMapping& m) {
    if (!m.valid_index(g)) {
        throw BadIndex("index (" + std::to_string(g.i) + ", " + std::to_string(g.j) +
                       ") outside 1.." + std::to_string(m.n));
    }
    const double cs = m.cell_size();
    return Vec2((g.i - 0.5) * cs, (g.j - 0.5) * cs);
}

std::vector<GridIndex> inflate_footprint(const Vec2& center, double radius,
                                         double agent_radius, const GridMapping& m) {
    const double r_eff = radius + agent_radius;
    const double cs = m.cell_size();
    std::vector<GridIndex> out;
    if (r_eff <= 0.0) return out;

    const int i_lo = std::max(1, static_cast<int>(std::floor((center.x() - r_eff) / cs)) + 1);
    const int i_hi = std::min(m.n, static_cast<int>(std::floor((center.x() + r_eff) / cs)) + 1);
    const int j_lo = std::max(1, static_cast<int>(std::floor((center.y() - r_eff) / cs)) + 1);
    const int j_hi = std::min(m.n, static_cast<int>(std::floor((center.y() + r_eff) / cs)) + 1);
    const double r2 = r_eff * r_eff;
    for (int i = i_lo; i <= i_hi; ++i) {
        const double dx = (i - 0.5) * cs - center.x();
        for (int j = j_lo; j <= j_hi; ++j) {
            const double dy = (j - 0.5) * cs - center.y();
            if (dx * dx + dy * dy < r2) out.push_back({i, j});
        }
    }
    return out;
}

void validate(const Scenario& s) {
    const auto fail = [](const std::string& what) { throw InvariantViolation(what); };
    if (s.mapping.n < 2) fail("lattice side n must be >= 2");
    if (s.mapping.arena_width <= 0 || s.mapping.arena_height <= 0) fail("arena dimensions must be positive");
    if (s.mapping.arena_width != s.mapping.arena_height) fail("arena must be square");
    if (!s.agent_start.allFinite() || !s.mapping.contains(s.agent_start)) fail("agent_start outside arena");
    if (!s.target.allFinite() || !s.mapping.contains(s.target)) fail("target outside arena");
    if (s.agent_start == s.target) fail("agent_start equals target");
    if (!(s.nav_tolerance > 0)) fail("nav_tolerance must be > 0");
    if (!(s.agent_radius >= 0)) fail("agent_radius must be >= 0");
    if (!(s.agent_speed > 0) || !std::isfinite(s.agent_speed)) fail("agent_speed must be positive");
    if (s.time_base && !(*s.time_base > 0)) fail("time_base must be positive");
    for (const auto& p : s.pedestrians) {
        const std::string tag = "pedestrian " + std::to_string(p.id) + ": ";
        if (!(p.personal_radius > 0)) fail(tag + "personal_radius must be > 0");
        if (!(p.reaction_distance > p.personal_radius))
            fail(tag + "reaction_distance must exceed personal_radius");
        if (!p.position.allFinite() || !p.velocity.allFinite() || !p.goal.allFinite())
            fail(tag + "non-finite state");
        if (!s.mapping.contains(p.position)) fail(tag + "position outside arena");
    }
}

}  // namespace ccm
