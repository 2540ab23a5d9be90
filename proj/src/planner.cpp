#include "ccm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace ccm {

namespace {

std::string lattice_key(int n, const LatticeParams& p) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d|%.17g|%.17g|%.17g|%d|%.17g|%.17g|%.17g|%.17g",
                  n, p.coupling, p.recovery_rate, p.dtau, p.substeps_per_mental_step,
                  p.agent_init, p.band_low, p.band_high, p.arrival_threshold);
    return buf;
}

}  // namespace

const FrontCalibration& front_calibration_cached(int n, const LatticeParams& params) {
    static std::mutex mu;
    static std::map<std::string, FrontCalibration> cache;
    const std::string key = lattice_key(n, params);
    {
        std::scoped_lock lock(mu);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    FrontCalibration cal = calibrate_front(n, params);
    std::scoped_lock lock(mu);
    return cache.emplace(key, std::move(cal)).first->second;
}

const TrajectoryPredictor& trained_predictor(double step_seconds) {
    static std::mutex mu;
    static std::map<double, TrajectoryPredictor> cache;
    {
        std::scoped_lock lock(mu);
        const auto it = cache.find(step_seconds);
        if (it != cache.end()) return it->second;
    }
    TrajectoryPredictor p;
    p.step_seconds = step_seconds;
    p.wx = train_to_convergence(step_seconds, 1e-11, 400, 256, 12, 0x7c0ffee5u);
    p.wy = train_to_convergence(step_seconds, 1e-11, 400, 256, 12, 0x5eedba11u);
    std::scoped_lock lock(mu);
    return cache.emplace(step_seconds, std::move(p)).first->second;
}

MentalClock make_clock(const Scenario& scenario, const PlannerParams& params) {
    MentalClock clock;
    clock.mental_step_tau = params.lattice.mental_step_tau();
    clock.cell_size = scenario.mapping.cell_size();
    clock.agent_speed = scenario.agent_speed;
    clock.explicit_time_base = scenario.time_base;
    clock.calibration = front_calibration_cached(scenario.mapping.n, params.lattice);
    return clock;
}

PredictedTrack::PredictedTrack(const TrajectoryPredictor& predictor, const Pedestrian& ped)
    : predictor_(&predictor) {
    const double h = predictor.step_seconds;
    // Three past positions (sensor history); exact for straight walking.
    const Vec2 p0 = ped.position;
    const Vec2 p1 = ped.position - ped.velocity * h;
    const Vec2 p2 = ped.position - 2.0 * ped.velocity * h;
    const auto [mx, my] = estimate_momenta(p2, p1, p0, h);
    eta_x_ = mx;
    eta_y_ = my;
    positions_.emplace_back(eta_x_(0), eta_y_(0));
    velocities_.emplace_back(eta_x_(1), eta_y_(1));
}

void PredictedTrack::ensure(double t_seconds) {
    const double h = predictor_->step_seconds;
    while ((static_cast<double>(positions_.size()) - 1.0) * h < t_seconds) {
        eta_x_ = predictor_->wx * eta_x_;
        eta_y_ = predictor_->wy * eta_y_;
        positions_.emplace_back(eta_x_(0), eta_y_(0));
        velocities_.emplace_back(eta_x_(1), eta_y_(1));
    }
}

Vec2 PredictedTrack::position_at(double t_seconds) {
    if (t_seconds <= 0.0) return positions_.front();
    ensure(t_seconds + predictor_->step_seconds);
    const double h = predictor_->step_seconds;
    const std::size_t idx = static_cast<std::size_t>(t_seconds / h);
    const double frac = t_seconds / h - static_cast<double>(idx);
    const std::size_t hi = std::min(idx + 1, positions_.size() - 1);
    return positions_[idx] * (1.0 - frac) + positions_[hi] * frac;
}

Vec2 PredictedTrack::velocity_at(double t_seconds) {
    if (t_seconds <= 0.0) return velocities_.front();
    ensure(t_seconds + predictor_->step_seconds);
    const double h = predictor_->step_seconds;
    const std::size_t idx = static_cast<std::size_t>(t_seconds / h);
    const double frac = t_seconds / h - static_cast<double>(idx);
    const std::size_t hi = std::min(idx + 1, velocities_.size() - 1);
    return velocities_[idx] * (1.0 - frac) + velocities_[hi] * frac;
}

namespace {

struct AvusStreamState {
    std::vector<Pedestrian> peds;
    std::vector<PredictedTrack> tracks;
    MentalClock clock;
    GridMapping mapping;
    double agent_radius = 0.2;
};

struct CousPedState {
    bool walking = false;
    bool branched = false;
    bool dead = false;  // branches separated; contributes nothing from now on
    BranchPair branches;
    double onset_seconds = 0.0;
    double effective_radius = 0.6;  // r_p + agent_radius
};

struct CousStreamState {
    AvusStreamState base;
    std::vector<CousPedState> coop;
    HumanModel base_model;
    Vec2 agent_start{0, 0};
    std::vector<GridIndex> band;  // scratch
};

void append_cells(std::vector<GridIndex>& out, const std::vector<GridIndex>& cells) {
    out.insert(out.end(), cells.begin(), cells.end());
}

}  // namespace

OccupancyStream make_avus_stream(const Scenario& scenario, const PlannerParams& params,
                                 const MentalClock& clock) {
    auto st = std::make_shared<AvusStreamState>();
    st->peds = scenario.pedestrians;
    st->clock = clock;
    st->mapping = scenario.mapping;
    st->agent_radius = scenario.agent_radius;
    const TrajectoryPredictor& predictor = trained_predictor(params.predictor_step_seconds);
    st->tracks.reserve(st->peds.size());
    for (const Pedestrian& p : st->peds) st->tracks.emplace_back(predictor, p);

    return [st](int k, const LatticeState&) {
        const double t = st->clock.seconds_at(k);
        std::vector<GridIndex> cells;
        for (std::size_t i = 0; i < st->peds.size(); ++i) {
            const Vec2 pos = st->tracks[i].position_at(t);
            append_cells(cells, inflate_footprint(pos, st->peds[i].personal_radius,
                                                  st->agent_radius, st->mapping));
        }
        return cells;
    };
}

OccupancyStream make_cous_stream(const Scenario& scenario, const PlannerParams& params,
                                 const MentalClock& clock) {
    auto st = std::make_shared<CousStreamState>();
    st->base.peds = scenario.pedestrians;
    st->base.clock = clock;
    st->base.mapping = scenario.mapping;
    st->base.agent_radius = scenario.agent_radius;
    st->agent_start = scenario.agent_start;
    st->base_model.crossing_angle_threshold_deg = params.crossing_angle_threshold_deg;
    st->base_model.lateral_gain = params.lateral_gain;
    const TrajectoryPredictor& predictor = trained_predictor(params.predictor_step_seconds);
    st->base.tracks.reserve(st->base.peds.size());
    st->coop.resize(st->base.peds.size());
    for (std::size_t i = 0; i < st->base.peds.size(); ++i) {
        st->base.tracks.emplace_back(predictor, st->base.peds[i]);
        st->coop[i].walking = st->base.peds[i].velocity.norm() > 0.0;
        st->coop[i].effective_radius =
            st->base.peds[i].personal_radius + scenario.agent_radius;
    }
    const double band_low = params.lattice.band_low;
    const double band_high = params.lattice.band_high;

    return [st, band_low, band_high](int k, const LatticeState& lattice) {
        const double t = st->base.clock.seconds_at(k);
        const double cs = st->base.mapping.cell_size();

        bool need_band = false;
        for (const CousPedState& c : st->coop) {
            if (c.walking && !c.branched) { need_band = true; break; }
        }
        if (need_band) {
            st->band.clear();
            const int n = st->base.mapping.n;
            for (int i = 1; i <= n; ++i) {
                for (int j = 1; j <= n; ++j) {
                    const double r = lattice.r(i - 1, j - 1);
                    if (r >= band_low && r <= band_high) st->band.push_back({i, j});
                }
            }
        }

        std::vector<GridIndex> cells;
        for (std::size_t i = 0; i < st->base.peds.size(); ++i) {
            const Pedestrian& ped = st->base.peds[i];
            CousPedState& coop = st->coop[i];

            if (coop.walking && !coop.branched) {
                const Vec2 pos = st->base.tracks[i].position_at(t);
                const Vec2 vel = st->base.tracks[i].velocity_at(t);
                HumanModel model = st->base_model;
                model.personal_radius = ped.personal_radius;
                // zone inflated by the agent radius, like the personal zone
                model.reaction_distance = ped.reaction_distance + st->base.agent_radius;
                const double zone2 = model.reaction_distance * model.reaction_distance;
                for (GridIndex g : st->band) {
                    const Vec2 center((g.i - 0.5) * cs, (g.j - 0.5) * cs);
                    if ((center - pos).squaredNorm() > zone2) continue;
                    // the virtual agent reaching this front cell travels
                    // radially outward from the start
                    const Vec2 approach = center - st->agent_start;
                    if (approach.norm() < cs) continue;
                    if (cooperation_eligible(pos, vel, center, approach, model)) {
                        coop.branched = true;
                        coop.onset_seconds = t;
                        coop.branches = make_branch_pair(pos, vel, k, model);
                        break;
                    }
                }
            }

            if (coop.branched) {
                if (coop.dead) continue;
                const double elapsed = t - coop.onset_seconds;
                auto lens = virtual_obstacle(coop.branches, st->base.agent_radius,
                                             st->base.mapping, elapsed);
                if (lens.empty()) {
                    const Vec2 pl = coop.branches.left.position +
                                    coop.branches.left.velocity * elapsed;
                    const Vec2 pr = coop.branches.right.position +
                                    coop.branches.right.velocity * elapsed;
                    if ((pl - pr).norm() >= 2.0 * coop.effective_radius) coop.dead = true;
                }
                append_cells(cells, lens);
            } else {
                const Vec2 pos = st->base.tracks[i].position_at(t);
                append_cells(cells, inflate_footprint(pos, ped.personal_radius,
                                                      st->base.agent_radius,
                                                      st->base.mapping));
            }
        }
        return cells;
    };
}

CompactCognitiveMap build_map(const Scenario& scenario, Mode mode, const PlannerParams& params) {
    validate(scenario);
    const MentalClock clock = make_clock(scenario, params);
    Scenario tagged = scenario;
    tagged.mode = mode;
    const OccupancyStream stream = mode == Mode::AvUs
                                       ? make_avus_stream(tagged, params, clock)
                                       : make_cous_stream(tagged, params, clock);
    CompactCognitiveMap map = run_wave(tagged, stream, params.lattice);
    map.front_speed = clock.calibration.speed;
    return map;
}

CompactCognitiveMap build_map_avus(const Scenario& scenario, const PlannerParams& params) {
    return build_map(scenario, Mode::AvUs, params);
}

CompactCognitiveMap build_map_cous(const Scenario& scenario, const PlannerParams& params) {
    return build_map(scenario, Mode::CoUs, params);
}

namespace {

// Bilinear interpolation over cell-center samples, in world coordinates.
struct BilinearField {
    const Field* f;
    int n;
    double cs;

    void locate(const Vec2& p, int& i0, int& j0, double& fu, double& fv) const {
        double u = p.x() / cs - 0.5;
        double v = p.y() / cs - 0.5;
        u = std::clamp(u, 0.0, n - 1.000001);
        v = std::clamp(v, 0.0, n - 1.000001);
        i0 = static_cast<int>(u);
        j0 = static_cast<int>(v);
        fu = u - i0;
        fv = v - j0;
    }

    double value(const Vec2& p) const {
        int i0, j0;
        double fu, fv;
        locate(p, i0, j0, fu, fv);
        const double f00 = (*f)(i0, j0), f10 = (*f)(i0 + 1, j0);
        const double f01 = (*f)(i0, j0 + 1), f11 = (*f)(i0 + 1, j0 + 1);
        return (1 - fu) * (1 - fv) * f00 + fu * (1 - fv) * f10 + (1 - fu) * fv * f01 +
               fu * fv * f11;
    }

    Vec2 gradient(const Vec2& p) const {
        int i0, j0;
        double fu, fv;
        locate(p, i0, j0, fu, fv);
        const double f00 = (*f)(i0, j0), f10 = (*f)(i0 + 1, j0);
        const double f01 = (*f)(i0, j0 + 1), f11 = (*f)(i0 + 1, j0 + 1);
        const double du = (1 - fv) * (f10 - f00) + fv * (f11 - f01);
        const double dv = (1 - fu) * (f01 - f00) + fu * (f11 - f10);
        return Vec2(du / cs, dv / cs);
    }
};

// Vertices must keep at least one cell of clearance from frozen cell centers.
bool clear_of_omega(const Vec2& p, const EffectiveObjectSet& omega, const GridMapping& m) {
    const double cs = m.cell_size();
    const int ci = static_cast<int>(std::floor(p.x() / cs)) + 1;
    const int cj = static_cast<int>(std::floor(p.y() / cs)) + 1;
    const double limit2 = cs * cs * (1.0 - 1e-9);
    for (int di = -2; di <= 2; ++di) {
        for (int dj = -2; dj <= 2; ++dj) {
            const int i = ci + di, j = cj + dj;
            if (i < 1 || i > m.n || j < 1 || j > m.n) continue;
            if (!omega.member(i - 1, j - 1)) continue;
            const Vec2 center((i - 0.5) * cs, (j - 0.5) * cs);
            if ((center - p).squaredNorm() < limit2) return false;
        }
    }
    return true;
}

// Fixed tie-break order for discrete descent.
constexpr int kNbOrder[8][2] = {{0, 1},  {1, 1},   {1, 0},  {1, -1},
                                {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};

}  // namespace

Path trace(const CompactCognitiveMap& map, const Vec2& target, double step_cells,
           double target_radius) {
    const GridMapping& m = map.mapping;
    const int n = m.n;
    const double cs = m.cell_size();

    // starting point: lowest-arrival reachable cell of the target disc
    GridIndex start{0, 0};
    double best = -1.0;
    for (GridIndex g : inflate_footprint(target, target_radius, 0.0, m)) {
        if (!map.reachable(g.i - 1, g.j - 1)) continue;
        const double a = map.arrival(g.i - 1, g.j - 1);
        if (best < 0.0 || a < best) {
            best = a;
            start = g;
        }
    }
    if (best < 0.0) throw NoPath("no reachable cell within the target disc");

    // descent field: unreached and frozen cells get a finite plateau above
    // every real arrival so interpolation pushes the path away from them
    double c_max = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c_max = std::max(c_max, map.arrival(i, j));
        }
    }
    const double blocked = c_max * 1.05 + 1.0;
    Field eff = (map.arrival < 0.0 || map.omega.member).select(blocked, map.arrival);
    const BilinearField F{&eff, n, cs};

    const Vec2 agent_center = grid_to_world(map.agent_cell, m);
    const double alpha = step_cells * cs;
    const int max_steps = static_cast<int>(10.0 * n / step_cells);

    Path path;
    Vec2 pos = grid_to_world(start, m);
    path.vertices.push_back({pos, best});

    Mask visited = Mask::Constant(n, n, false);
    bool discrete_mode = false;
    bool done = false;
    for (int iter = 0; iter < max_steps && !done; ++iter) {
        if ((pos - agent_center).norm() <= cs) {
            path.vertices.push_back({agent_center, 0.0});
            done = true;
            break;
        }
        bool stepped = false;
        if (!discrete_mode) {
            const Vec2 g = F.gradient(pos);
            if (g.norm() > 1e-12) {
                Vec2 cand = pos - alpha * g.normalized();
                cand.x() = std::clamp(cand.x(), 0.5 * cs, m.arena_width - 0.5 * cs);
                cand.y() = std::clamp(cand.y(), 0.5 * cs, m.arena_height - 0.5 * cs);
                if (F.value(cand) < F.value(pos) - 1e-12 &&
                    clear_of_omega(cand, map.omega, m)) {
                    pos = cand;
                    stepped = true;
                }
            }
        }
        if (!stepped) {
            // discrete fallback: strictly smaller free neighbour, fixed order
            const GridIndex cur = world_to_grid(pos, m);
            visited(cur.i - 1, cur.j - 1) = true;
            const double cur_val = map.arrival(cur.i - 1, cur.j - 1);
            GridIndex next{0, 0};
            double next_val = cur_val;
            for (const auto& d : kNbOrder) {
                const int i = cur.i + d[0], j = cur.j + d[1];
                if (i < 1 || i > n || j < 1 || j > n) continue;
                if (!map.reachable(i - 1, j - 1)) continue;
                const double a = map.arrival(i - 1, j - 1);
                if (a < next_val) {
                    next_val = a;
                    next = {i, j};
                }
            }
            if (next.i == 0) {
                // Pocket against a rim frozen after the front passed through:
                // sidestep to the smallest unvisited free neighbour and keep
                // descending discretely from there.
                for (const auto& d : kNbOrder) {
                    const int i = cur.i + d[0], j = cur.j + d[1];
                    if (i < 1 || i > n || j < 1 || j > n) continue;
                    if (!map.reachable(i - 1, j - 1) || visited(i - 1, j - 1)) continue;
                    const double a = map.arrival(i - 1, j - 1);
                    if (next.i == 0 || a < next_val) {
                        next_val = a;
                        next = {i, j};
                    }
                }
                discrete_mode = true;
            }
            if (next.i == 0) throw NoPath("gradient descent stuck before reaching the agent");
            visited(next.i - 1, next.j - 1) = true;
            pos = grid_to_world(next, m);
        }
        const double v = std::clamp(F.value(pos), 0.0, c_max);
        path.vertices.push_back({pos, v});
    }
    if (!done) throw NoPath("gradient descent exceeded its step budget");

    std::reverse(path.vertices.begin(), path.vertices.end());
    return path;
}

Path plan_path(const Scenario& scenario, const CompactCognitiveMap& map,
               const PlannerParams& params) {
    const double radius =
        params.target_radius > 0.0 ? params.target_radius : scenario.nav_tolerance;
    Path p = trace(map, scenario.target, params.descent_step_cells, radius);
    if (!p.vertices.empty() &&
        (p.vertices.front().position - scenario.agent_start).norm() > 1e-12) {
        p.vertices.insert(p.vertices.begin(), {scenario.agent_start, 0.0});
    }
    return p;
}

TimedTrajectory to_world_trajectory(const Path& path, const Scenario& scenario) {
    TimedTrajectory out;
    out.points.reserve(path.vertices.size());
    double arc = 0.0;
    for (std::size_t i = 0; i < path.vertices.size(); ++i) {
        if (i > 0) {
            arc += (path.vertices[i].position - path.vertices[i - 1].position).norm();
        }
        out.points.push_back({arc / scenario.agent_speed, path.vertices[i].position});
    }
    return out;
}

}  // namespace ccm
