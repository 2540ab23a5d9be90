// Heuristic model of how a walking human reacts to an approaching agent:
// cooperation is expected only for near head-on encounters inside the
// reaction zone, and a cooperating human sidesteps by adding a lateral
// velocity component of half his speed. While the dodge side is still
// unknown, the only region that must truly be avoided is the intersection of
// the two hypothetical (left/right) personal zones: the virtual obstacle.
#pragma once

#include <vector>

#include "ccm/core.hpp"

namespace ccm {

struct HumanModel {
    double crossing_angle_threshold_deg = 5.0;
    double lateral_gain = 0.5;  // |w| / |v|
    double reaction_distance = 2.0;  // d_r, m
    double personal_radius = 0.4;    // r_p, m
};

enum class DodgeSide { Left, Right };

// Signed angle (degrees) between the human's visual axis (velocity direction)
// and the ray from the human to `point`; positive when the point lies to the
// human's left. Throws NoVisualAxis for a standing human.
double crossing_angle(const Vec2& human_pos, const Vec2& human_vel, const Vec2& point);

// Cooperation triggers only for genuinely head-on encounters: the crossing
// point must lie inside the reaction zone on the visual axis (bearing within
// the threshold) and the crosser must be moving against the axis (its motion
// direction within the threshold of the axis reversed). Oblique crossings
// leave the human on his straight course. A standing human never cooperates.
bool cooperation_eligible(const Vec2& human_pos, const Vec2& human_vel, const Vec2& point,
                          const Vec2& approach_dir, const HumanModel& model);

inline bool cooperation_eligible(const Pedestrian& human, const Vec2& point,
                                 const Vec2& approach_dir, const HumanModel& model) {
    return cooperation_eligible(human.position, human.velocity, point, approach_dir, model);
}

// v_new = v_old + w with w perpendicular to v_old and |w| = lateral_gain|v_old|.
// Left is the counterclockwise normal (the human dodges to his own left).
Vec2 cooperative_velocity(const Vec2& v_old, DodgeSide side, const HumanModel& model);

struct BranchState {
    Vec2 position{0, 0};
    Vec2 velocity{0, 0};
};

// The two hypothesised continuations of a cooperating human, spawned at the
// mental step where the wavefront first entered his reaction zone head-on.
struct BranchPair {
    int onset_step = 0;
    BranchState left;
    BranchState right;
    double personal_radius = 0.4;
};

BranchPair make_branch_pair(const Vec2& position, const Vec2& velocity, int onset_step,
                            const HumanModel& model);

// Cells in the intersection of the two inflated branch personal zones,
// `elapsed_seconds` after the onset. Empty once the branch centres are at
// least two inflated radii apart.
std::vector<GridIndex> virtual_obstacle(const BranchPair& branches, double agent_radius,
                                        const GridMapping& m, double elapsed_seconds);

// Side that moves the human away from the agent: dodge right when the agent
// is on the human's left, and vice versa. Dead-center defaults to Right.
DodgeSide dodge_side_away_from(const Vec2& human_pos, const Vec2& human_vel,
                               const Vec2& agent_pos);

}  // namespace ccm
