// Builds compact cognitive maps under the noncooperative (AvUs) and
// cooperative (CoUs) assumptions and extracts trajectories from them by
// gradient descent on the arrival field.
//
// Mental time vs real time: the wavefront advances v_w cells per mental-time
// unit (measured on an empty lattice, including the ignition transient of the
// source), while the agent it stands for walks at agent_speed. Occupancy
// snapshots fed to the lattice at mental step k therefore use the predicted
// obstacle positions at the real time at which the front's travelled distance
// equals the agent's walked distance. A scenario may instead pin an explicit
// time_base in seconds per mental step.
#pragma once

#include <optional>
#include <vector>

#include "ccm/core.hpp"
#include "ccm/lattice.hpp"
#include "ccm/social.hpp"
#include "ccm/tmnn.hpp"

namespace ccm {

struct PlannerParams {
    LatticeParams lattice;
    double crossing_angle_threshold_deg = 5.0;
    double lateral_gain = 0.5;
    double descent_step_cells = 0.5;      // alpha
    double target_radius = -1.0;          // <= 0: use scenario nav_tolerance
    double predictor_step_seconds = 0.05; // h of the trajectory-modeling network
};

// Mental-step -> real-seconds conversion used when advancing predictions.
struct MentalClock {
    double mental_step_tau = 0.1;
    double cell_size = 0.1;
    double agent_speed = 1.0;
    std::optional<double> explicit_time_base;  // seconds per mental step
    FrontCalibration calibration;

    double seconds_at(int k) const {
        if (explicit_time_base) return k * *explicit_time_base;
        return calibration.radius_at(k * mental_step_tau) * cell_size / agent_speed;
    }
};

MentalClock make_clock(const Scenario& scenario, const PlannerParams& params);

// Trained coupling matrices for the two axes (independently trained on the
// same kind of corpus). Cached per step size.
struct TrajectoryPredictor {
    CouplingMatrix wx;
    CouplingMatrix wy;
    double step_seconds = 0.05;
};

const TrajectoryPredictor& trained_predictor(double step_seconds);

// Extrapolated trajectory of one object: momenta are estimated from three
// past positions, then the network iterates them forward on a fixed grid of
// step_seconds; queries interpolate.
class PredictedTrack {
  public:
    PredictedTrack(const TrajectoryPredictor& predictor, const Pedestrian& ped);

    Vec2 position_at(double t_seconds);
    Vec2 velocity_at(double t_seconds);

  private:
    void ensure(double t_seconds);
    const TrajectoryPredictor* predictor_;
    Eigen::Vector3d eta_x_, eta_y_;
    std::vector<Vec2> positions_;   // sample k at k * step_seconds
    std::vector<Vec2> velocities_;
};

// Occupancy stream builders. The AvUs stream is pure feedforward prediction;
// the CoUs stream watches the front band and switches a pedestrian's
// footprint to the shrinking virtual obstacle once cooperation becomes
// possible. Pedestrians whose zone the front never enters head-on keep their
// full footprint for the whole run.
OccupancyStream make_avus_stream(const Scenario& scenario, const PlannerParams& params,
                                 const MentalClock& clock);
OccupancyStream make_cous_stream(const Scenario& scenario, const PlannerParams& params,
                                 const MentalClock& clock);

CompactCognitiveMap build_map_avus(const Scenario& scenario, const PlannerParams& params = {});
CompactCognitiveMap build_map_cous(const Scenario& scenario, const PlannerParams& params = {});
CompactCognitiveMap build_map(const Scenario& scenario, Mode mode,
                              const PlannerParams& params = {});

struct PathVertex {
    Vec2 position{0, 0};
    double mental_time = 0.0;  // interpolated arrival value, mental-time units
};

struct Path {
    std::vector<PathVertex> vertices;  // agent -> target
};

// Gradient descent on the arrival field from the best-reachable cell of the
// target disc down to the agent cell, reversed to run agent -> target.
// Bilinear interpolation with step alpha (in cells); exact ties and flat
// patches fall back to the strictly smaller 8-neighbour in fixed order.
// Throws NoPath when no cell of the target disc is reachable.
Path trace(const CompactCognitiveMap& map, const Vec2& target, double step_cells = 0.5,
           double target_radius = 0.3);

// trace() with the scenario's tolerance for the target disc, prepending the
// exact start position.
Path plan_path(const Scenario& scenario, const CompactCognitiveMap& map,
               const PlannerParams& params = {});

struct TimedPoint {
    double t = 0.0;  // seconds
    Vec2 position{0, 0};
};

struct TimedTrajectory {
    std::vector<TimedPoint> points;

    double duration() const { return points.empty() ? 0.0 : points.back().t; }
};

// Wall-clock times from cumulative arc length at agent_speed. Consistent with
// the arrival field: t at a vertex approximates (c - ignition) * v_w *
// cell_size / agent_speed.
TimedTrajectory to_world_trajectory(const Path& path, const Scenario& scenario);

// Memoised empty-lattice calibration for the given side length and dynamics.
const FrontCalibration& front_calibration_cached(int n, const LatticeParams& params);

}  // namespace ccm
