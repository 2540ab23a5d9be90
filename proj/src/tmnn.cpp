#include "ccm/tmnn.hpp"

#include <cmath>

#include "ccm/rng.hpp"

namespace ccm {

std::pair<Momentum, Momentum> estimate_momenta(const Vec2& p_minus2, const Vec2& p_minus1,
                                               const Vec2& p0, double h) {
    const Vec2 a = (p0 - 2.0 * p_minus1 + p_minus2) / (h * h);
    const Vec2 v = (3.0 * p0 - 4.0 * p_minus1 + p_minus2) / (2.0 * h);
    return {Momentum(p0.x(), v.x(), a.x()), Momentum(p0.y(), v.y(), a.y())};
}

CouplingMatrix train(const CouplingMatrix& w0,
                     const std::vector<std::vector<Momentum>>& trajectories,
                     const TmnnParams& params) {
    CouplingMatrix w = w0;
    const double eps = params.learning_rate;
    const CouplingMatrix id = CouplingMatrix::Identity();
    for (const auto& traj : trajectories) {
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const Momentum& prev = traj[k - 1];
            const Momentum& cur = traj[k];
            w = w * (id - eps * prev * prev.transpose()) + eps * cur * prev.transpose();
            if (!w.allFinite() || w.cwiseAbs().maxCoeff() > params.divergence_bound) {
                throw LearningDiverged("coupling matrix exceeded bound; reduce learning_rate");
            }
        }
    }
    return w;
}

double prediction_residual(const CouplingMatrix& w,
                           const std::vector<std::vector<Momentum>>& trajectories) {
    double worst = 0.0;
    for (const auto& traj : trajectories) {
        for (std::size_t k = 1; k < traj.size(); ++k) {
            worst = std::max(worst, (w * traj[k - 1] - traj[k]).norm());
        }
    }
    return worst;
}

std::vector<double> predict(const CouplingMatrix& w, const Momentum& xi0, int K) {
    std::vector<double> positions;
    positions.reserve(static_cast<std::size_t>(std::max(K, 0)));
    Eigen::Vector3d eta = xi0;
    for (int k = 1; k <= K; ++k) {
        eta = w * eta;
        positions.push_back(eta(0));
    }
    return positions;
}

std::vector<std::vector<Momentum>> quadratic_training_corpus(int count, int steps_per_trajectory,
                                                             double h, std::uint64_t seed) {
    std::vector<std::vector<Momentum>> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    for (int t = 0; t < count; ++t) {
        Rng sub = rng.split(static_cast<std::uint64_t>(t));
        const double x0 = sub.uniform(-1.0, 1.0);
        const double v0 = sub.uniform(-1.0, 1.0);
        const double a0 = sub.uniform(-1.0, 1.0);
        std::vector<Momentum> traj;
        traj.reserve(static_cast<std::size_t>(steps_per_trajectory));
        for (int k = 0; k < steps_per_trajectory; ++k) {
            const double tk = k * h;
            traj.emplace_back(x0 + v0 * tk + 0.5 * a0 * tk * tk, v0 + a0 * tk, a0);
        }
        corpus.push_back(std::move(traj));
    }
    return corpus;
}

CouplingMatrix train_to_convergence(double h, double residual_target, int max_passes,
                                    int corpus_size, int steps_per_trajectory,
                                    std::uint64_t corpus_seed) {
    TmnnParams params;
    params.step = h;
    const auto corpus = quadratic_training_corpus(corpus_size, steps_per_trajectory, h, corpus_seed);
    CouplingMatrix w = CouplingMatrix::Identity();
    for (int pass = 0; pass < max_passes; ++pass) {
        w = train(w, corpus, params);
        if (prediction_residual(w, corpus) < residual_target) break;
    }
    return w;
}

}  // namespace ccm
