// Seeded generators for the experiment families: a lone head-on walker, a
// cluttered flow emerging from a door, a compact group spanning the corridor,
// a single-file chain from a narrow door, and static/dynamic demo scenes.
// The corridor is the arena itself; doors are segments of the far wall.
#pragma once

#include <cstdint>
#include <string>

#include "ccm/core.hpp"

namespace ccm {

enum class Family {
    static_demo,
    dynamic_demo,
    head_on,
    cluttered_flow,
    dense_group,
    line_up,
};

enum class DoorSegment { center, left_extreme, right_extreme };

struct ScenarioTemplate {
    Family family = Family::head_on;
    int n = 80;
    double arena = 8.0;  // corridor width and length, m
    double door_center = 4.0;
    double door_width = 2.0;
    int pedestrian_count = 12;
    double speed_min = 0.55;  // family-specific speed profile bounds, m/s
    double speed_max = 1.25;
    double personal_radius = 0.4;
    double reaction_distance = 2.0;
    double agent_radius = 0.2;
    double agent_speed = 1.0;
    double nav_tolerance = 0.3;
    DoorSegment segment = DoorSegment::center;
    Mode mode = Mode::AvUs;
    std::uint64_t seed = 0;
};

// Family defaults (door geometry, crowd size, zone sizes tuned per family).
ScenarioTemplate template_for(Family family);

Family family_from_name(const std::string& name);
const char* family_name(Family family);
DoorSegment segment_from_name(const std::string& name);
const char* segment_name(DoorSegment segment);

// A target sampled uniformly in the named door segment. The center segment
// spans the middle half of the door; each extreme spans a quarter.
Vec2 door_segment_target(const ScenarioTemplate& tpl, DoorSegment segment);

// Deterministic in the template seed. Retries infeasible draws (overlapping
// initial footprints) with sub-seeds; throws TemplateInfeasible after the
// retry budget.
Scenario generate(const ScenarioTemplate& tpl);

}  // namespace ccm
