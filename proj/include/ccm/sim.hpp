// Executes a planned trajectory in a simulated world with reacting
// pedestrians. The agent replays its one-shot plan; pedestrians walk straight
// under AvUs and, under CoUs, sidestep while the agent crosses their reaction
// zone head-on, re-aiming at their goal after it leaves.
#pragma once

#include <vector>

#include "ccm/core.hpp"
#include "ccm/planner.hpp"

namespace ccm {

struct SimParams {
    double dt = 0.05;        // s
    double time_cap = 120.0; // s
    // A pedestrian whose cooperation ends re-aims at his original goal at his
    // original speed (the alternative keeps the deviated velocity).
    bool reaim_after_cooperation = true;
    PlannerParams planner;
};

struct CollisionEvent {
    double t = 0.0;
    int id_a = 0;  // 0 is the agent
    int id_b = 0;
    double distance = 0.0;
};

struct SimPedestrian {
    Pedestrian spec;
    Vec2 position{0, 0};
    Vec2 velocity{0, 0};
    bool cooperating = false;
    bool arrived = false;
};

struct WorldState {
    double t = 0.0;
    // agent path following
    std::vector<Vec2> path_points;
    std::vector<double> cumulative_length;
    double arc = 0.0;
    Vec2 agent_position{0, 0};
    Vec2 agent_direction{0, 0};  // unit motion direction along the plan
    bool agent_at_path_end = false;
    std::vector<SimPedestrian> pedestrians;
    std::vector<bool> in_collision;  // hysteresis for event edges
    std::vector<CollisionEvent> events;
};

WorldState make_world(const Scenario& scenario, const TimedTrajectory& plan);

// One execution step: cooperation transitions from the current geometry, then
// motion, then collision-event detection.
void step_world(WorldState& world, double dt, Mode mode, const Scenario& scenario,
                const SimParams& params);

struct SimulationResult {
    bool completed = false;
    bool no_path = false;
    TimedTrajectory agent;
    std::vector<TimedTrajectory> pedestrians;  // aligned with scenario order
    std::vector<CollisionEvent> collisions;
    CompactCognitiveMap map;
    Path planned;
};

// Build the map for the mode, trace the path, execute until the agent is
// within nav_tolerance of the target or the time cap. A blocked plan is
// recorded as no_path, not thrown.
SimulationResult simulate(const Scenario& scenario, Mode mode, const SimParams& params = {});

}  // namespace ccm
