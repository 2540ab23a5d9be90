#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccm/core.hpp"
#include "ccm/rng.hpp"
#include "oracles.hpp"

using namespace ccm;

namespace {
const GridMapping kMap{8.0, 8.0, 80};
}

TEST_CASE("world_to_grid maps corner cells") {
    CHECK(world_to_grid({0.05, 0.05}, kMap) == GridIndex{1, 1});
    CHECK(world_to_grid({7.95, 7.95}, kMap) == GridIndex{80, 80});
    // far edge lands in the last cell by clamping
    CHECK(world_to_grid({8.0, 8.0}, kMap) == GridIndex{80, 80});
    CHECK_THROWS_AS(world_to_grid({8.3, 1.0}, kMap), OutOfArena);
    CHECK_THROWS_AS(world_to_grid({-0.1, 1.0}, kMap), OutOfArena);
}

TEST_CASE("grid_to_world returns cell centers") {
    CHECK(grid_to_world({1, 1}, kMap) == Vec2(0.05, 0.05));
    CHECK(grid_to_world({80, 80}, kMap) == Vec2(7.95, 7.95));
    CHECK(grid_to_world({41, 41}, kMap) == Vec2(4.05, 4.05));
    CHECK_THROWS_AS(grid_to_world({0, 5}, kMap), BadIndex);
    CHECK_THROWS_AS(grid_to_world({81, 5}, kMap), BadIndex);
}

TEST_CASE("round trip quantization stays within half a cell diagonal") {
    Rng rng(7);
    const double bound = kMap.cell_size() * std::sqrt(2.0) / 2.0 + 1e-12;
    for (int t = 0; t < 1000; ++t) {
        const Vec2 p(rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0));
        const Vec2 back = grid_to_world(world_to_grid(p, kMap), kMap);
        CHECK((p - back).norm() <= bound);
    }
}

TEST_CASE("world_to_grid is a left inverse of grid_to_world") {
    for (int i = 1; i <= kMap.n; ++i) {
        for (int j = 1; j <= kMap.n; ++j) {
            REQUIRE(world_to_grid(grid_to_world({i, j}, kMap), kMap) == GridIndex{i, j});
        }
    }
}

TEST_CASE("inflate_footprint is the configuration-space disc") {
    const Vec2 center(4.0, 4.0);
    const auto cells = inflate_footprint(center, 0.3, 0.2, kMap);
    const auto oracle = testing::brute_force_disc(center, 0.5, kMap);
    CHECK(cells.size() == oracle.size());
    CHECK(cells.size() >= 72);  // pi * 5^2 cells, minus boundary effects
    CHECK(cells.size() <= 85);

    // agent_radius 0 gives the bare disc
    const auto bare = inflate_footprint(center, 0.5, 0.0, kMap);
    CHECK(bare.size() == cells.size());
}

TEST_CASE("inflate_footprint count tracks the disc area") {
    const Vec2 center(4.0, 4.0);  // on a cell corner: no centers on the rim
    const auto cells = inflate_footprint(center, 0.3, 0.2, kMap);
    const auto oracle = testing::brute_force_disc(center, 0.5, kMap);
    REQUIRE(cells.size() == oracle.size());
    const double expect = M_PI * 0.25 / (0.1 * 0.1);  // ~78.5 cells
    CHECK(std::abs(static_cast<double>(cells.size()) - expect) <= 4.0);
}

TEST_CASE("inflate_footprint is monotone in both radii") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const Vec2 c(rng.uniform(0.5, 7.5), rng.uniform(0.5, 7.5));
        const double r1 = rng.uniform(0.0, 0.8);
        const double r2 = r1 + rng.uniform(0.0, 0.5);
        const double a1 = rng.uniform(0.0, 0.4);
        const double a2 = a1 + rng.uniform(0.0, 0.3);
        CHECK(inflate_footprint(c, r1, a1, kMap).size() <=
              inflate_footprint(c, r2, a1, kMap).size());
        CHECK(inflate_footprint(c, r1, a1, kMap).size() <=
              inflate_footprint(c, r1, a2, kMap).size());
    }
}

TEST_CASE("footprint reflects across the arena midline") {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        const Vec2 c(rng.uniform(0.8, 7.2), rng.uniform(0.8, 7.2));
        const Vec2 mirrored(kMap.arena_width - c.x(), c.y());
        const auto a = inflate_footprint(c, 0.35, 0.15, kMap);
        auto b = inflate_footprint(mirrored, 0.35, 0.15, kMap);
        REQUIRE(a.size() == b.size());
        // mirror b's cells back and compare as sets
        std::vector<GridIndex> b_mirrored;
        for (GridIndex g : b) b_mirrored.push_back({kMap.n + 1 - g.i, g.j});
        auto key = [](GridIndex g) { return g.i * 1000 + g.j; };
        std::vector<int> ka, kb;
        for (GridIndex g : a) ka.push_back(key(g));
        for (GridIndex g : b_mirrored) kb.push_back(key(g));
        std::sort(ka.begin(), ka.end());
        std::sort(kb.begin(), kb.end());
        CHECK(ka == kb);
    }
}

TEST_CASE("footprint fully outside the arena is empty") {
    CHECK(inflate_footprint({4.0, 4.0}, 0.0, 0.0, kMap).empty());
}

TEST_CASE("scenario validation names the violated constraint") {
    Scenario s;
    s.agent_start = Vec2(1, 1);
    s.target = Vec2(7, 7);
    CHECK_NOTHROW(validate(s));

    Scenario same = s;
    same.target = same.agent_start;
    CHECK_THROWS_AS(validate(same), InvariantViolation);

    Scenario outside = s;
    outside.target = Vec2(9, 1);
    CHECK_THROWS_AS(validate(outside), InvariantViolation);

    Scenario bad_ped = s;
    Pedestrian p;
    p.position = Vec2(4, 4);
    p.personal_radius = 0.5;
    p.reaction_distance = 0.4;  // must exceed r_p
    bad_ped.pedestrians.push_back(p);
    CHECK_THROWS_WITH_AS(validate(bad_ped),
                         doctest::Contains("reaction_distance"), InvariantViolation);

    Scenario bad_arena = s;
    bad_arena.mapping.arena_height = 6.0;
    CHECK_THROWS_AS(validate(bad_arena), InvariantViolation);
}
