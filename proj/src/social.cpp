#include "ccm/social.hpp"

#include <cmath>

namespace ccm {

namespace {
constexpr double kRadToDeg = 180.0 / M_PI;
}

double crossing_angle(const Vec2& human_pos, const Vec2& human_vel, const Vec2& point) {
    if (human_vel.norm() == 0.0) throw NoVisualAxis("standing human has no visual axis");
    const Vec2 ray = point - human_pos;
    return std::atan2(cross2(human_vel, ray), human_vel.dot(ray)) * kRadToDeg;
}

bool cooperation_eligible(const Vec2& human_pos, const Vec2& human_vel, const Vec2& point,
                          const Vec2& approach_dir, const HumanModel& model) {
    if (human_vel.norm() == 0.0) return false;
    if ((point - human_pos).norm() > model.reaction_distance) return false;
    if (std::abs(crossing_angle(human_pos, human_vel, point)) >=
        model.crossing_angle_threshold_deg) {
        return false;
    }
    if (approach_dir.norm() == 0.0) return false;
    const double incidence =
        std::atan2(std::abs(cross2(approach_dir, -human_vel)), approach_dir.dot(-human_vel)) *
        kRadToDeg;
    return incidence < model.crossing_angle_threshold_deg;
}

Vec2 cooperative_velocity(const Vec2& v_old, DodgeSide side, const HumanModel& model) {
    const double speed = v_old.norm();
    if (speed == 0.0) throw DegenerateVelocity("cooperative step undefined for zero velocity");
    const Vec2 normal = (side == DodgeSide::Left ? rot90ccw(v_old) : rot90cw(v_old)) / speed;
    return v_old + model.lateral_gain * speed * normal;
}

BranchPair make_branch_pair(const Vec2& position, const Vec2& velocity, int onset_step,
                            const HumanModel& model) {
    BranchPair b;
    b.onset_step = onset_step;
    b.personal_radius = model.personal_radius;
    b.left = {position, cooperative_velocity(velocity, DodgeSide::Left, model)};
    b.right = {position, cooperative_velocity(velocity, DodgeSide::Right, model)};
    return b;
}

std::vector<GridIndex> virtual_obstacle(const BranchPair& branches, double agent_radius,
                                        const GridMapping& m, double elapsed_seconds) {
    const double r_eff = branches.personal_radius + agent_radius;
    const Vec2 pl = branches.left.position + branches.left.velocity * elapsed_seconds;
    const Vec2 pr = branches.right.position + branches.right.velocity * elapsed_seconds;
    std::vector<GridIndex> out;
    if ((pl - pr).norm() >= 2.0 * r_eff) return out;

    const double cs = m.cell_size();
    const double lo_x = std::max(pl.x(), pr.x()) - r_eff;
    const double hi_x = std::min(pl.x(), pr.x()) + r_eff;
    const double lo_y = std::max(pl.y(), pr.y()) - r_eff;
    const double hi_y = std::min(pl.y(), pr.y()) + r_eff;
    const int i_lo = std::max(1, static_cast<int>(std::floor(lo_x / cs)) + 1);
    const int i_hi = std::min(m.n, static_cast<int>(std::floor(hi_x / cs)) + 1);
    const int j_lo = std::max(1, static_cast<int>(std::floor(lo_y / cs)) + 1);
    const int j_hi = std::min(m.n, static_cast<int>(std::floor(hi_y / cs)) + 1);
    const double r2 = r_eff * r_eff;
    for (int i = i_lo; i <= i_hi; ++i) {
        for (int j = j_lo; j <= j_hi; ++j) {
            const Vec2 c((i - 0.5) * cs, (j - 0.5) * cs);
            if ((c - pl).squaredNorm() < r2 && (c - pr).squaredNorm() < r2) {
                out.push_back({i, j});
            }
        }
    }
    return out;
}

DodgeSide dodge_side_away_from(const Vec2& human_pos, const Vec2& human_vel,
                               const Vec2& agent_pos) {
    return cross2(human_vel, agent_pos - human_pos) > 0.0 ? DodgeSide::Right : DodgeSide::Left;
}

}  // namespace ccm
