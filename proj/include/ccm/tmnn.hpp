// Trajectory-modeling neural network: three recurrently coupled linear
// neurons per axis that learn to advance a (position, velocity, acceleration)
// momentum vector by one time step. After training on quadratic motion the
// coupling matrix converges to the discrete uniformly-accelerated integrator,
// and object trajectories are extrapolated by iterating the map.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "ccm/core.hpp"

namespace ccm {

// One axis worth of initial momenta: (x, dx/dt, d2x/dt2).
using Momentum = Eigen::Vector3d;
using CouplingMatrix = Eigen::Matrix3d;

struct TmnnParams {
    double learning_rate = 0.05;  // epsilon; must keep epsilon*|xi|^2 well below 2
    double tolerance = 1e-6;      // delta: input gate threshold (Euclidean norm)
    double step = 0.1;            // h, seconds advanced per iteration of the map
    double divergence_bound = 1e3;
};

// Per-axis momenta from three positions sampled at t = -2h, -h, 0 using
// second-order backward differences (exact for quadratic motion).
std::pair<Momentum, Momentum> estimate_momenta(const Vec2& p_minus2, const Vec2& p_minus1,
                                               const Vec2& p0, double h);

// One update of the network state: the input drives the state while its norm
// exceeds the tolerance, otherwise the network runs autonomously.
inline Eigen::Vector3d tmnn_step(const CouplingMatrix& w, const Eigen::Vector3d& eta,
                                 const Momentum& xi, double delta) {
    return xi.norm() > delta ? Eigen::Vector3d(xi) : Eigen::Vector3d(w * eta);
}

// Anti-Hebbian/Hebbian coupling update applied along each trajectory:
//   W <- W (I - eps xi_prev xi_prev^T) + eps xi xi_prev^T
// Trajectory boundaries reset the (xi_prev, xi) pairing. Throws
// LearningDiverged when the couplings blow up (learning rate too large).
CouplingMatrix train(const CouplingMatrix& w0,
                     const std::vector<std::vector<Momentum>>& trajectories,
                     const TmnnParams& params);

// Largest one-step prediction residual max_k |W xi(k-1) - xi(k)| over the
// corpus; the stopping quantity for repeated training passes.
double prediction_residual(const CouplingMatrix& w,
                           const std::vector<std::vector<Momentum>>& trajectories);

// Positions (first momentum component) of eta(k) = W^k xi0 for k = 1..K.
std::vector<double> predict(const CouplingMatrix& w, const Momentum& xi0, int K);

// Random quadratic trajectories with initial momenta uniform in [-1,1]^3,
// each a sequence of exact momentum vectors sampled every params.step.
std::vector<std::vector<Momentum>> quadratic_training_corpus(int count, int steps_per_trajectory,
                                                             double h, std::uint64_t seed);

// Repeated passes over a canonical corpus until the prediction residual
// drops below `residual_target` (or the pass cap is hit). Deterministic.
CouplingMatrix train_to_convergence(double h, double residual_target = 1e-11,
                                    int max_passes = 400, int corpus_size = 256,
                                    int steps_per_trajectory = 12,
                                    std::uint64_t corpus_seed = 0x7c0ffee5u);

}  // namespace ccm
