#include "ccm/sim.hpp"

#include <algorithm>
#include <cmath>

#include "ccm/social.hpp"

namespace ccm {

WorldState make_world(const Scenario& scenario, const TimedTrajectory& plan) {
    WorldState w;
    w.path_points.reserve(plan.points.size());
    for (const TimedPoint& p : plan.points) w.path_points.push_back(p.position);
    w.cumulative_length.resize(w.path_points.size(), 0.0);
    for (std::size_t i = 1; i < w.path_points.size(); ++i) {
        w.cumulative_length[i] =
            w.cumulative_length[i - 1] + (w.path_points[i] - w.path_points[i - 1]).norm();
    }
    w.agent_position = w.path_points.empty() ? scenario.agent_start : w.path_points.front();
    w.agent_at_path_end = w.path_points.size() < 2;
    for (std::size_t i = 1; i < w.path_points.size(); ++i) {
        const Vec2 seg = w.path_points[i] - w.path_points[i - 1];
        if (seg.norm() > 1e-12) {
            w.agent_direction = seg.normalized();
            break;
        }
    }
    for (const Pedestrian& p : scenario.pedestrians) {
        w.pedestrians.push_back({p, p.position, p.velocity, false, false});
    }
    w.in_collision.assign(scenario.pedestrians.size(), false);
    return w;
}

namespace {

Vec2 position_on_path(const WorldState& w, double arc) {
    const auto& pts = w.path_points;
    const auto& cum = w.cumulative_length;
    if (pts.empty()) return w.agent_position;
    if (arc >= cum.back()) return pts.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), arc);
    const std::size_t hi = static_cast<std::size_t>(it - cum.begin());
    const std::size_t lo = hi - 1;
    const double seg = cum[hi] - cum[lo];
    const double f = seg > 0.0 ? (arc - cum[lo]) / seg : 0.0;
    return pts[lo] + f * (pts[hi] - pts[lo]);
}

}  // namespace

void step_world(WorldState& w, double dt, Mode mode, const Scenario& scenario,
                const SimParams& params) {
    // cooperation transitions from the geometry at the start of the step
    if (mode == Mode::CoUs) {
        HumanModel model;
        model.crossing_angle_threshold_deg = params.planner.crossing_angle_threshold_deg;
        model.lateral_gain = params.planner.lateral_gain;
        for (SimPedestrian& ped : w.pedestrians) {
            if (ped.arrived) continue;
            const double speed = ped.velocity.norm();
            const double zone = ped.spec.reaction_distance + scenario.agent_radius;
            const double dist = (w.agent_position - ped.position).norm();
            if (!ped.cooperating) {
                if (speed > 0.0 && dist <= zone) {
                    model.personal_radius = ped.spec.personal_radius;
                    model.reaction_distance = zone;
                    if (cooperation_eligible(ped.position, ped.velocity, w.agent_position,
                                             w.agent_direction, model)) {
                        const DodgeSide side =
                            dodge_side_away_from(ped.position, ped.velocity, w.agent_position);
                        ped.velocity = cooperative_velocity(ped.velocity, side, model);
                        ped.cooperating = true;
                    }
                }
            } else if (dist > zone) {
                ped.cooperating = false;
                if (params.reaim_after_cooperation) {
                    const Vec2 to_goal = ped.spec.goal - ped.position;
                    const double len = to_goal.norm();
                    const double original_speed = ped.spec.velocity.norm();
                    ped.velocity = len > 1e-12 ? Vec2(original_speed * to_goal / len)
                                               : Vec2(0.0, 0.0);
                }
            }
        }
    }

    // motion
    if (!w.agent_at_path_end) {
        w.arc += scenario.agent_speed * dt;
        const Vec2 next = position_on_path(w, w.arc);
        if ((next - w.agent_position).norm() > 1e-12) {
            w.agent_direction = (next - w.agent_position).normalized();
        }
        w.agent_position = next;
        if (!w.cumulative_length.empty() && w.arc >= w.cumulative_length.back()) {
            w.agent_at_path_end = true;
        }
    }
    for (SimPedestrian& ped : w.pedestrians) {
        if (ped.arrived) continue;
        ped.position += ped.velocity * dt;
        ped.position.x() = std::clamp(ped.position.x(), 0.0, scenario.mapping.arena_width);
        ped.position.y() = std::clamp(ped.position.y(), 0.0, scenario.mapping.arena_height);
        if ((ped.position - ped.spec.goal).norm() <= scenario.nav_tolerance) {
            ped.arrived = true;
            ped.velocity = Vec2(0.0, 0.0);
        }
    }
    w.t += dt;

    // collision events (enter edges)
    for (std::size_t i = 0; i < w.pedestrians.size(); ++i) {
        const SimPedestrian& ped = w.pedestrians[i];
        const double limit = ped.spec.personal_radius + scenario.agent_radius;
        const double dist = (w.agent_position - ped.position).norm();
        if (dist < limit) {
            if (!w.in_collision[i]) {
                w.events.push_back({w.t, 0, ped.spec.id, dist});
                w.in_collision[i] = true;
            }
        } else {
            w.in_collision[i] = false;
        }
    }
}

SimulationResult simulate(const Scenario& scenario, Mode mode, const SimParams& params) {
    validate(scenario);
    SimulationResult result;
    result.map = build_map(scenario, mode, params.planner);

    TimedTrajectory plan;
    try {
        result.planned = plan_path(scenario, result.map, params.planner);
        plan = to_world_trajectory(result.planned, scenario);
    } catch (const NoPath&) {
        result.no_path = true;
        result.agent.points.push_back({0.0, scenario.agent_start});
        for (const Pedestrian& p : scenario.pedestrians) {
            TimedTrajectory t;
            t.points.push_back({0.0, p.position});
            result.pedestrians.push_back(std::move(t));
        }
        return result;
    }

    WorldState w = make_world(scenario, plan);
    result.pedestrians.resize(scenario.pedestrians.size());
    result.agent.points.push_back({0.0, w.agent_position});
    for (std::size_t i = 0; i < w.pedestrians.size(); ++i) {
        result.pedestrians[i].points.push_back({0.0, w.pedestrians[i].position});
    }

    while (w.t < params.time_cap) {
        step_world(w, params.dt, mode, scenario, params);
        result.agent.points.push_back({w.t, w.agent_position});
        for (std::size_t i = 0; i < w.pedestrians.size(); ++i) {
            result.pedestrians[i].points.push_back({w.t, w.pedestrians[i].position});
        }
        if ((w.agent_position - scenario.target).norm() <= scenario.nav_tolerance) {
            result.completed = true;
            break;
        }
        if (w.agent_at_path_end) break;  // plan exhausted without completion
    }
    result.collisions = std::move(w.events);
    return result;
}

}  // namespace ccm
