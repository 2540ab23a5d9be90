#include "ccm/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "ccm/rng.hpp"

namespace ccm {

namespace {

// split keys for the independent sample streams
constexpr std::uint64_t kTargetStream = 1;
constexpr std::uint64_t kAgentStream = 2;
constexpr std::uint64_t kGroupStream = 3;
constexpr std::uint64_t kPedBase = 100;

}  // namespace

ScenarioTemplate template_for(Family family) {
    ScenarioTemplate t;
    t.family = family;
    switch (family) {
        case Family::static_demo:
            t.pedestrian_count = 5;
            t.speed_min = t.speed_max = 0.0;
            break;
        case Family::dynamic_demo:
            t.pedestrian_count = 1;
            t.speed_min = t.speed_max = 1.0;
            break;
        case Family::head_on:
            t.pedestrian_count = 1;
            t.speed_min = t.speed_max = 1.0;
            t.reaction_distance = 2.4;
            break;
        case Family::cluttered_flow:
            t.pedestrian_count = 9;
            t.door_width = 2.8;
            t.speed_min = 0.55;
            t.speed_max = 1.15;
            break;
        case Family::dense_group:
            t.pedestrian_count = 8;
            t.speed_min = t.speed_max = 1.0;
            t.reaction_distance = 3.0;
            break;
        case Family::line_up:
            t.pedestrian_count = 6;
            t.door_width = 0.8;
            t.speed_min = 0.85;
            t.speed_max = 0.95;
            t.reaction_distance = 2.6;
            break;
    }
    return t;
}

Family family_from_name(const std::string& name) {
    if (name == "static_demo") return Family::static_demo;
    if (name == "dynamic_demo") return Family::dynamic_demo;
    if (name == "head_on") return Family::head_on;
    if (name == "cluttered_flow") return Family::cluttered_flow;
    if (name == "dense_group") return Family::dense_group;
    if (name == "line_up") return Family::line_up;
    throw ConfigError("unknown scenario family: " + name);
}

const char* family_name(Family family) {
    switch (family) {
        case Family::static_demo: return "static_demo";
        case Family::dynamic_demo: return "dynamic_demo";
        case Family::head_on: return "head_on";
        case Family::cluttered_flow: return "cluttered_flow";
        case Family::dense_group: return "dense_group";
        case Family::line_up: return "line_up";
    }
    return "?";
}

DoorSegment segment_from_name(const std::string& name) {
    if (name == "center") return DoorSegment::center;
    if (name == "left_extreme" || name == "left") return DoorSegment::left_extreme;
    if (name == "right_extreme" || name == "right") return DoorSegment::right_extreme;
    throw ConfigError("unknown door segment: " + name);
}

const char* segment_name(DoorSegment segment) {
    switch (segment) {
        case DoorSegment::center: return "center";
        case DoorSegment::left_extreme: return "left_extreme";
        case DoorSegment::right_extreme: return "right_extreme";
    }
    return "?";
}

Vec2 door_segment_target(const ScenarioTemplate& tpl, DoorSegment segment) {
    Rng rng = Rng(tpl.seed).split(kTargetStream);
    const double w = tpl.door_width;
    double lo = 0.0, hi = 0.0;
    switch (segment) {
        case DoorSegment::center:
            lo = tpl.door_center - w / 4.0;
            hi = tpl.door_center + w / 4.0;
            break;
        case DoorSegment::left_extreme:
            lo = tpl.door_center - w / 2.0;
            hi = tpl.door_center - w / 4.0;
            break;
        case DoorSegment::right_extreme:
            lo = tpl.door_center + w / 4.0;
            hi = tpl.door_center + w / 2.0;
            break;
    }
    const double y = tpl.arena - 0.6;  // just inside the wall holding the door
    return Vec2(rng.uniform(lo, hi), y);
}

namespace {

Pedestrian make_walker(int id, const Vec2& pos, double speed, const Vec2& goal,
                       const ScenarioTemplate& tpl) {
    Pedestrian p;
    p.id = id;
    p.position = pos;
    p.goal = goal;
    const Vec2 dir = goal - pos;
    const double len = dir.norm();
    p.velocity = (speed > 0.0 && len > 1e-12) ? Vec2(speed * dir / len) : Vec2(0.0, 0.0);
    p.personal_radius = tpl.personal_radius;
    p.reaction_distance = tpl.reaction_distance;
    return p;
}

bool feasible(const Scenario& sc) {
    // the agent must start outside every inflated footprint, with margin
    for (const Pedestrian& p : sc.pedestrians) {
        const double clearance = p.personal_radius + sc.agent_radius + 0.1;
        if ((p.position - sc.agent_start).norm() < clearance) return false;
    }
    // personal zones must not overlap at t = 0
    for (std::size_t i = 0; i < sc.pedestrians.size(); ++i) {
        for (std::size_t j = i + 1; j < sc.pedestrians.size(); ++j) {
            const auto& a = sc.pedestrians[i];
            const auto& b = sc.pedestrians[j];
            const double d = (a.position - b.position).norm();
            // the dense group is deliberately packed; require bodies apart,
            // not zones apart
            if (d < 0.95 * (a.personal_radius + b.personal_radius)) return false;
        }
    }
    return true;
}

Scenario attempt(const ScenarioTemplate& tpl, std::uint64_t sub_seed) {
    Rng root(sub_seed);
    Scenario sc;
    sc.mapping = GridMapping{tpl.arena, tpl.arena, tpl.n};
    sc.agent_radius = tpl.agent_radius;
    sc.agent_speed = tpl.agent_speed;
    sc.nav_tolerance = tpl.nav_tolerance;
    sc.mode = tpl.mode;
    sc.seed = tpl.seed;
    const double H = tpl.arena;

    switch (tpl.family) {
        case Family::static_demo: {
            sc.agent_start = Vec2(tpl.arena / 2.0, 0.8);
            sc.target = Vec2(tpl.arena / 2.0, H - 0.8);
            for (int i = 0; i < tpl.pedestrian_count; ++i) {
                Rng ped = root.split(kPedBase + i);
                Vec2 pos;
                bool placed = false;
                for (int tries = 0; tries < 64 && !placed; ++tries) {
                    pos = Vec2(ped.uniform(1.0, tpl.arena - 1.0), ped.uniform(1.8, H - 1.8));
                    placed = (pos - sc.agent_start).norm() > 1.4 &&
                             (pos - sc.target).norm() > 1.0;
                    for (const auto& other : sc.pedestrians) {
                        placed = placed && (pos - other.position).norm() >
                                               2.0 * tpl.personal_radius + 0.2;
                    }
                }
                if (!placed) throw TemplateInfeasible("static_demo placement failed");
                sc.pedestrians.push_back(make_walker(i + 1, pos, 0.0, pos, tpl));
            }
            break;
        }
        case Family::dynamic_demo: {
            sc.agent_start = Vec2(tpl.arena / 2.0, 0.8);
            sc.target = Vec2(tpl.arena / 2.0, H - 0.8);
            Rng ped = root.split(kPedBase);
            const double y = ped.uniform(3.8, 4.6);
            const double speed = 0.5 * (tpl.speed_min + tpl.speed_max);
            sc.pedestrians.push_back(make_walker(
                1, Vec2(tpl.arena - 1.2, y), speed, Vec2(0.6, y), tpl));
            break;
        }
        case Family::head_on: {
            Rng ped = root.split(kPedBase);
            const double x = tpl.arena / 2.0 + 0.05 + ped.uniform(-0.02, 0.02);
            sc.agent_start = Vec2(tpl.arena / 2.0, 0.8);
            sc.target = Vec2(tpl.arena / 2.0, H - 0.8);
            const double y = 5.3 + ped.uniform(-0.2, 0.2);
            const double speed = 0.5 * (tpl.speed_min + tpl.speed_max);
            sc.pedestrians.push_back(
                make_walker(1, Vec2(x, y), speed, Vec2(x, 0.4), tpl));
            break;
        }
        case Family::cluttered_flow: {
            Rng agent = root.split(kAgentStream);
            sc.agent_start = Vec2(tpl.door_center + agent.uniform(-0.15, 0.15), 0.8);
            sc.target = door_segment_target(tpl, tpl.segment);
            const int count = tpl.pedestrian_count;
            // Jittered grid fanning out of the door: tight and slow next to
            // it, wider apart and faster with distance (people accelerate
            // once they have room). Keeps the near edge of the crowd well
            // clear of the agent start.
            const int rows = (count + 2) / 3;
            int id = 1;
            for (int r = 0; r < rows && id <= count; ++r) {
                Rng row_rng = root.split(kPedBase + r);
                const double y = H - 1.5 - 1.05 * r + row_rng.uniform(-0.1, 0.1);
                const double frac = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.0;
                const double slot_dx = 1.0 + 0.3 * r;
                const int in_row = std::min(3, count - (id - 1));
                for (int s = 0; s < in_row && id <= count; ++s) {
                    const double col = s - 1.0;  // -1, 0, +1 around the door
                    const double x =
                        std::clamp(tpl.door_center + col * slot_dx +
                                       row_rng.uniform(-0.1, 0.1),
                                   0.7, tpl.arena - 0.7);
                    const double speed = tpl.speed_min +
                                         (tpl.speed_max - tpl.speed_min) *
                                             std::clamp(frac + row_rng.uniform(-0.1, 0.1),
                                                        0.0, 1.0);
                    // crowds disperse: walkers off the door axis drift further
                    // outward on their way down the corridor
                    const double gx = std::clamp(x + 0.35 * (x - tpl.door_center), 0.5,
                                                 tpl.arena - 0.5);
                    sc.pedestrians.push_back(
                        make_walker(id++, Vec2(x, y), speed, Vec2(gx, 0.4), tpl));
                }
            }
            break;
        }
        case Family::dense_group: {
            Rng group = root.split(kGroupStream);
            const int count = tpl.pedestrian_count;
            const double margin = 0.55;
            const double spacing = (tpl.arena - 2.0 * margin) / (count - 1);
            const double y = 5.5 + group.uniform(-0.15, 0.15);
            const double speed =
                0.5 * (tpl.speed_min + tpl.speed_max) * (1.0 + group.uniform(-0.05, 0.05));
            for (int i = 0; i < count; ++i) {
                const double x = margin + i * spacing;
                sc.pedestrians.push_back(
                    make_walker(i + 1, Vec2(x, y), speed, Vec2(x, 0.4), tpl));
            }
            // aim straight at one group member so the head-on condition holds
            const int through = count / 2;
            const double ax = margin + through * spacing + 0.03;
            sc.agent_start = Vec2(ax, 0.8);
            sc.target = Vec2(ax, H - 0.8);
            break;
        }
        case Family::line_up: {
            Rng agent = root.split(kAgentStream);
            sc.agent_start = Vec2(tpl.door_center + 0.05 + agent.uniform(-0.02, 0.02), 0.8);
            sc.target = door_segment_target(tpl, tpl.segment);
            const int count = tpl.pedestrian_count;
            double y = H - 1.0;
            for (int i = 0; i < count; ++i) {
                Rng ped = root.split(kPedBase + i);
                const double half = tpl.door_width / 2.0;
                const double x = tpl.door_center + ped.uniform(-0.8 * half, 0.8 * half);
                const double speed = ped.uniform(tpl.speed_min, tpl.speed_max);
                sc.pedestrians.push_back(
                    make_walker(i + 1, Vec2(x, y), speed, Vec2(x, 0.4), tpl));
                y -= 0.9 + ped.uniform(0.0, 0.15);
            }
            break;
        }
    }
    return sc;
}

}  // namespace

Scenario generate(const ScenarioTemplate& tpl) {
    constexpr int kRetries = 32;
    for (int retry = 0; retry < kRetries; ++retry) {
        const std::uint64_t sub_seed = detail::mix64(tpl.seed + 0x9e3779b9ull * retry);
        Scenario sc;
        try {
            sc = attempt(tpl, sub_seed);
        } catch (const TemplateInfeasible&) {
            continue;
        }
        if (!feasible(sc)) continue;
        validate(sc);
        return sc;
    }
    throw TemplateInfeasible(std::string("could not generate a feasible ") +
                             family_name(tpl.family) + " scenario");
}

}  // namespace ccm
