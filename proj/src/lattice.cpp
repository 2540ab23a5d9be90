#include "ccm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccm {

namespace {

// Cubic nonlinearity of the excitable cell, applied elementwise.
template <class Derived>
auto fhn_cubic(const Eigen::ArrayBase<Derived>& r) {
    return (-r.cube() + 4.0 * r.square() - 2.0 * r - 2.0) / 7.0;
}

// 4-neighbour discrete Laplacian with Neumann (zero-flux) boundaries:
// missing neighbours contribute nothing.
void laplacian(const Field& r, Field& out) {
    const Eigen::Index n = r.rows();
    out.setZero();
    out.topRows(n - 1) += r.bottomRows(n - 1) - r.topRows(n - 1);
    out.bottomRows(n - 1) += r.topRows(n - 1) - r.bottomRows(n - 1);
    out.leftCols(n - 1) += r.rightCols(n - 1) - r.leftCols(n - 1);
    out.rightCols(n - 1) += r.leftCols(n - 1) - r.rightCols(n - 1);
}

}  // namespace

LatticeState make_lattice(const GridMapping& mapping, GridIndex agent_cell,
                          const LatticeParams& params) {
    if (!mapping.valid_index(agent_cell)) throw BadIndex("agent cell outside lattice");
    LatticeState s;
    s.mapping = mapping;
    const int n = mapping.n;
    s.r = Field::Zero(n, n);
    s.z = Field::Zero(n, n);
    s.q = Field::Ones(n, n);
    s.arrival = Field::Constant(n, n, -1.0);
    s.omega = EffectiveObjectSet(n);
    s.agent_cell = agent_cell;
    s.r(agent_cell.i - 1, agent_cell.j - 1) = params.agent_init;
    s.q(agent_cell.i - 1, agent_cell.j - 1) = 0.0;
    s.arrival(agent_cell.i - 1, agent_cell.j - 1) = 0.0;
    return s;
}

EffectiveObjectSet accrete_effective_objects(const LatticeState& state,
                                             const std::vector<GridIndex>& occupied,
                                             const LatticeParams& params) {
    EffectiveObjectSet next = state.omega;
    for (GridIndex g : occupied) {
        if (next.contains(g)) continue;
        const double r = state.r(g.i - 1, g.j - 1);
        if (r >= params.band_low && r <= params.band_high) {
            next.member(g.i - 1, g.j - 1) = true;
            next.joined.emplace_back(g, state.step);
        }
    }
    return next;
}

void integrate_mental_step(LatticeState& state, const std::vector<GridIndex>& occupied,
                           const LatticeParams& params) {
    // (1) accretion against the occupancy snapshot at the start of the step
    EffectiveObjectSet next = accrete_effective_objects(state, occupied, params);
    if (next.size() != state.omega.size()) {
        for (std::size_t idx = state.omega.joined.size(); idx < next.joined.size(); ++idx) {
            const GridIndex g = next.joined[idx].first;
            state.q(g.i - 1, g.j - 1) = 0.0;
            if (state.arrival(g.i - 1, g.j - 1) < 0.0) state.frozen_without_arrival += 1;
        }
        state.omega = std::move(next);
    }

    // (2) gated dynamics; frozen cells hold both variables
    static thread_local Field lap, dr;
    if (lap.rows() != state.r.rows()) {
        lap.resize(state.r.rows(), state.r.cols());
        dr.resize(state.r.rows(), state.r.cols());
    }
    const Field r_before = state.r;
    for (int s = 0; s < params.substeps_per_mental_step; ++s) {
        laplacian(state.r, lap);
        dr = state.q * (fhn_cubic(state.r) - state.z + params.coupling * lap);
        state.z += params.dtau * state.q * params.recovery_rate *
                   (state.r - 7.0 * state.z - 2.0);
        state.r += params.dtau * dr;
    }
    if (!state.r.allFinite() || state.r.abs().maxCoeff() > params.blowup_limit) {
        throw UnstableIntegration("lattice potential exceeded " +
                                  std::to_string(params.blowup_limit) +
                                  "; reduce dtau");
    }

    // (3) first upward crossings of the arrival threshold during this step
    state.step += 1;
    const double tau_now = state.step * params.mental_step_tau();
    const auto crossed = (state.arrival < 0.0) && (r_before < params.arrival_threshold) &&
                         (state.r >= params.arrival_threshold);
    if (crossed.any()) {
        const int count = static_cast<int>(crossed.count());
        state.arrival = crossed.select(tau_now, state.arrival);
        state.cells_with_arrival += count;
        state.last_arrival_step = state.step;
    }
}

CompactCognitiveMap run_wave(const Scenario& scenario, const OccupancyStream& stream,
                             const LatticeParams& params) {
    const GridMapping& mapping = scenario.mapping;
    const GridIndex agent_cell = world_to_grid(scenario.agent_start, mapping);
    LatticeState state = make_lattice(mapping, agent_cell, params);

    const int total_cells = mapping.n * mapping.n;
    while (state.step < params.max_mental_steps) {
        const std::vector<GridIndex> occupied = stream(state.step, state);
        if (state.step == 0) {
            for (GridIndex g : occupied) {
                if (g == agent_cell) {
                    throw InvalidStart("agent cell lies inside an obstacle footprint");
                }
            }
        }
        integrate_mental_step(state, occupied, params);

        // covered = cells with an arrival (incl. the agent source) plus cells
        // frozen before the front ever reached them
        if (1 + state.cells_with_arrival + state.frozen_without_arrival >= total_cells) break;
        if (state.last_arrival_step >= 0 &&
            state.step - state.last_arrival_step > params.patience) {
            break;
        }
    }

    CompactCognitiveMap map;
    map.mapping = mapping;
    map.arrival = std::move(state.arrival);
    map.omega = std::move(state.omega);
    map.reachable = (map.arrival >= 0.0) && !map.omega.member;
    map.agent_cell = agent_cell;
    map.mode = scenario.mode;
    map.mental_step_tau = params.mental_step_tau();
    map.arrival_threshold = params.arrival_threshold;
    map.steps_run = state.step;
    return map;
}

double FrontCalibration::radius_at(double tau) const {
    if (tau <= 0.0 || ring_tau.empty()) return 0.0;
    if (tau <= ring_tau.front()) return ring_radius.front() * tau / ring_tau.front();
    if (tau >= ring_tau.back()) {
        return ring_radius.back() + (tau - ring_tau.back()) * speed;
    }
    const auto it = std::upper_bound(ring_tau.begin(), ring_tau.end(), tau);
    const std::size_t hi = static_cast<std::size_t>(it - ring_tau.begin());
    const std::size_t lo = hi - 1;
    const double f = (tau - ring_tau[lo]) / (ring_tau[hi] - ring_tau[lo]);
    return ring_radius[lo] + f * (ring_radius[hi] - ring_radius[lo]);
}

FrontCalibration calibrate_front(int n, const LatticeParams& params) {
    Scenario sc;
    sc.mapping = GridMapping{8.0, 8.0, n};
    const double mid = (n / 2 + 0.5) * sc.mapping.cell_size();
    sc.agent_start = Vec2(mid, mid);
    sc.target = Vec2(mid, sc.mapping.arena_height - sc.mapping.cell_size());
    const OccupancyStream empty = [](int, const LatticeState&) {
        return std::vector<GridIndex>{};
    };
    const CompactCognitiveMap map = run_wave(sc, empty, params);

    const GridIndex a = map.agent_cell;
    const int r_max = n / 2 - 2;
    FrontCalibration cal;
    for (int ring = 1; ring <= r_max; ++ring) {
        double sum = 0.0;
        int count = 0;
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                const double dist = std::hypot(double(i - a.i), double(j - a.j));
                if (dist >= ring - 0.5 && dist < ring + 0.5 && map.arrival(i - 1, j - 1) >= 0.0) {
                    sum += map.arrival(i - 1, j - 1);
                    ++count;
                }
            }
        }
        if (count == 0) continue;
        const double mean = sum / count;
        // enforce monotonicity against binning noise
        if (!cal.ring_tau.empty() && mean <= cal.ring_tau.back()) continue;
        cal.ring_radius.push_back(static_cast<double>(ring));
        cal.ring_tau.push_back(mean);
    }

    // mid-range least-squares fit tau = radius/speed + ignition_delay over a
    // fixed annulus so the estimate is comparable across lattice sizes
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t k = 0; k < cal.ring_radius.size(); ++k) {
        const double rad = cal.ring_radius[k];
        if (rad < 12.0 || rad > 34.0) continue;
        sx += rad;
        sy += cal.ring_tau[k];
        sxx += rad * rad;
        sxy += rad * cal.ring_tau[k];
        ++m;
    }
    if (m >= 2) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        cal.speed = 1.0 / slope;
        cal.ignition_delay = (sy - slope * sx) / m;
    }
    return cal;
}

}  // namespace ccm
