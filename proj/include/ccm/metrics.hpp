// Navigation performance measures and the statistics used to compare the two
// strategies over scenario ensembles.
#pragma once

#include <string>
#include <vector>

#include "ccm/core.hpp"
#include "ccm/lattice.hpp"

namespace ccm {

struct MetricsRecord {
    double L = 0.0;     // normalized trajectory length, >= 1 for completed runs
    double S = 1.0;     // safety fraction in [0,1]
    double E = 0.0;     // mean social effort
    double d_crt = 0.3; // critical distance used by S
    int M = 0;          // pedestrian count
};

// Path length relative to the straight segment. Requires the run to have
// ended within eps_nav of the target (IncompleteRun otherwise).
double trajectory_length(const std::vector<Vec2>& vertices, const Vec2& p_start,
                         const Vec2& p_target, double eps_nav);

// Elongation of a pedestrian trajectory toward his goal; an unfinished walk
// is completed with the remaining straight leg.
double pedestrian_elongation(const std::vector<Vec2>& vertices, const Vec2& start,
                             const Vec2& goal);

// Fraction of the trajectory that stays at least d_crt away from the nearest
// effective-obstacle cell center. The polyline is resampled at cell_size
// spacing so the count is resolution-stable.
double trajectory_safety(const std::vector<Vec2>& vertices, const EffectiveObjectSet& omega,
                         double d_crt, const GridMapping& m);

// E = mean of (L_i - 1) over agent and pedestrians (index 0 = agent).
double social_effort(const std::vector<double>& normalized_lengths);

struct SampleStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n-1)
    int n = 0;
};

SampleStats summarize(const std::vector<double>& xs);

// Two-sided Welch's t-test. Degenerate zero-variance samples: p = 1 when the
// means agree, p = 0 otherwise.
double welch_p_value(const std::vector<double>& a, const std::vector<double>& b);

// Classic pooled-variance two-sample t-test, for comparison.
double pooled_p_value(const std::vector<double>& a, const std::vector<double>& b);

// Survival function P(T > t) of Student's t distribution (t >= 0).
double student_t_sf(double t, double dof);

}  // namespace ccm
