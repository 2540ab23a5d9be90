// Excitable lattice that performs the mental exploration: a 2D grid of
// FitzHugh-Nagumo cells whose single propagating upstate front simulates all
// possible agent movements at once. Cells occupied by a (predicted) obstacle
// at the moment the front passes through them are frozen into the growing
// effective-object set and stop participating in the dynamics; the front
// slips around them. Every cell records the mental time at which the front
// first crossed the arrival threshold, which yields the potential field of
// the compact cognitive map.
#pragma once

#include <functional>
#include <vector>

#include "ccm/core.hpp"

namespace ccm {

struct LatticeParams {
    double coupling = 0.2;       // d, nearest-neighbour diffusion strength
    double recovery_rate = 0.04; // epsilon of the slow recovery variable
    double dtau = 0.05;          // explicit Euler substep, mental-time units
    int substeps_per_mental_step = 2;
    double agent_init = 5.0;     // clamped potential of the source cell
    double band_low = 1.0;       // front detection band [band_low, band_high]
    double band_high = 2.0;
    double arrival_threshold = 1.5;  // r_th, midpoint of the detection band
    int max_mental_steps = 20000;
    // Mental steps without a new arrival before the exploration is considered
    // finished. Must comfortably exceed the largest inter-arrival gap of the
    // ignition transient (~130 steps at the default integrator settings).
    int patience = 400;
    double blowup_limit = 50.0;  // |r| beyond this means dtau is too large

    double mental_step_tau() const { return dtau * substeps_per_mental_step; }
};

// Monotonically accreted set of frozen cells, with the mental step at which
// each cell joined.
struct EffectiveObjectSet {
    int n = 0;
    Mask member;
    std::vector<std::pair<GridIndex, int>> joined;

    explicit EffectiveObjectSet(int side = 0) : n(side) {
        if (side > 0) member = Mask::Constant(side, side, false);
    }
    bool contains(GridIndex g) const { return member(g.i - 1, g.j - 1); }
    int size() const { return static_cast<int>(joined.size()); }
    bool operator==(const EffectiveObjectSet& o) const {
        return n == o.n && joined == o.joined && (member == o.member).all();
    }
};

struct LatticeState {
    GridMapping mapping;
    Field r;        // membrane potential
    Field z;        // recovery variable
    Field q;        // gate: 0 on frozen cells and the agent cell, 1 elsewhere
    Field arrival;  // c, mental-time units; -1 until the front crosses r_th
    int step = 0;   // mental step counter k
    EffectiveObjectSet omega;
    GridIndex agent_cell;
    int last_arrival_step = -1;
    int cells_with_arrival = 0;       // excludes the agent source cell
    int frozen_without_arrival = 0;   // frozen before the front reached them
};

// All cells at rest except the clamped agent source.
LatticeState make_lattice(const GridMapping& mapping, GridIndex agent_cell,
                          const LatticeParams& params);

// Pure accretion rule: cells of `occupied` whose potential currently lies in
// the detection band join the set.
EffectiveObjectSet accrete_effective_objects(const LatticeState& state,
                                             const std::vector<GridIndex>& occupied,
                                             const LatticeParams& params);

// One mental step: accrete effective objects against the occupancy snapshot,
// advance the gated FitzHugh-Nagumo dynamics (explicit Euler, 4-neighbour
// Laplacian, Neumann boundaries), then record first arrivals. Throws
// UnstableIntegration if the potential blows up.
void integrate_mental_step(LatticeState& state, const std::vector<GridIndex>& occupied,
                           const LatticeParams& params);

// Occupancy source: cells occupied by (inflated) obstacles at mental step k.
// Called exactly once per step, in order, with the lattice state at the start
// of the step; cooperative builders inspect the front band through it.
using OccupancyStream = std::function<std::vector<GridIndex>(int k, const LatticeState&)>;

struct CompactCognitiveMap {
    GridMapping mapping;
    Field arrival;  // mental-time units, -1 where the front never arrived
    EffectiveObjectSet omega;
    Mask reachable;  // arrival set and not frozen
    GridIndex agent_cell;
    Mode mode = Mode::AvUs;
    double front_speed = 0.0;     // v_w, cells per mental-time unit
    double mental_step_tau = 0.1; // tau advanced per mental step
    double arrival_threshold = 1.5;
    int steps_run = 0;
};

// Drive the lattice until the arena is explored: all never-frozen cells have
// arrivals, or no arrival occurred for `patience` steps, or the step cap is
// reached. Throws InvalidStart if the agent cell is occupied at step 0.
CompactCognitiveMap run_wave(const Scenario& scenario, const OccupancyStream& stream,
                             const LatticeParams& params);

// Measured propagation law of the free front, used to convert mental time to
// real time. radius_at inverts the (monotone) mean arrival curve; speed is
// the mid-range slope and ignition_delay its extrapolated time offset.
struct FrontCalibration {
    double speed = 0.0;           // cells per tau, mid-range fit
    double ignition_delay = 0.0;  // tau
    std::vector<double> ring_radius;  // cells, 1, 2, 3, ...
    std::vector<double> ring_tau;     // mean arrival time of each ring

    double radius_at(double tau) const;  // cells travelled by mental time tau
};

// Empty-lattice run with a centered source.
FrontCalibration calibrate_front(int n, const LatticeParams& params);

}  // namespace ccm
