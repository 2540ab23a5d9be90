#include "ccm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccm {

namespace {

double polyline_length(const std::vector<Vec2>& vertices) {
    double len = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        len += (vertices[i] - vertices[i - 1]).norm();
    }
    return len;
}

}  // namespace

double trajectory_length(const std::vector<Vec2>& vertices, const Vec2& p_start,
                         const Vec2& p_target, double eps_nav) {
    const double straight = (p_start - p_target).norm();
    if (!(straight > 0.0)) throw InvariantViolation("start equals target");
    if (vertices.empty()) throw EmptyTrajectory("no vertices");
    if ((vertices.back() - p_target).norm() > eps_nav) {
        throw IncompleteRun("final vertex farther than eps_nav from the target");
    }
    return polyline_length(vertices) / straight;
}

double pedestrian_elongation(const std::vector<Vec2>& vertices, const Vec2& start,
                             const Vec2& goal) {
    const double straight = (start - goal).norm();
    if (!(straight > 0.0)) return 1.0;  // stood at its goal the whole run
    if (vertices.empty()) throw EmptyTrajectory("no vertices");
    const double walked = polyline_length(vertices) + (vertices.back() - goal).norm();
    return walked / straight;
}

double trajectory_safety(const std::vector<Vec2>& vertices, const EffectiveObjectSet& omega,
                         double d_crt, const GridMapping& m) {
    if (vertices.empty()) throw EmptyTrajectory("no vertices");
    if (!(d_crt > 0.0)) throw InvariantViolation("d_crt must be > 0");

    // resample at cell_size spacing
    const double spacing = m.cell_size();
    std::vector<Vec2> samples;
    samples.push_back(vertices.front());
    double carried = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        const Vec2 a = vertices[i - 1], b = vertices[i];
        const double seg = (b - a).norm();
        if (seg <= 0.0) continue;
        double s = spacing - carried;
        while (s <= seg) {
            samples.push_back(a + (b - a) * (s / seg));
            s += spacing;
        }
        carried = seg - (s - spacing);
    }

    if (omega.joined.empty()) return 1.0;
    const double cs = m.cell_size();
    std::size_t unsafe = 0;
    for (const Vec2& p : samples) {
        double best2 = std::numeric_limits<double>::infinity();
        for (const auto& [g, step] : omega.joined) {
            const Vec2 center((g.i - 0.5) * cs, (g.j - 0.5) * cs);
            best2 = std::min(best2, (center - p).squaredNorm());
        }
        if (std::sqrt(best2) < d_crt) ++unsafe;
    }
    return 1.0 - static_cast<double>(unsafe) / static_cast<double>(samples.size());
}

double social_effort(const std::vector<double>& normalized_lengths) {
    if (normalized_lengths.empty()) return 0.0;
    double sum = 0.0;
    for (double L : normalized_lengths) sum += L - 1.0;
    return sum / static_cast<double>(normalized_lengths.size());
}

SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.n = static_cast<int>(xs.size());
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double two_sided_p(double t, double dof) {
    // P(|T| > t) = I_{dof/(dof+t^2)}(dof/2, 1/2)
    return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

}  // namespace

double student_t_sf(double t, double dof) { return 0.5 * two_sided_p(t, dof); }

double welch_p_value(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw InvariantViolation("samples need n >= 2");
    const SampleStats sa = summarize(a), sb = summarize(b);
    const double va = sa.sd * sa.sd, vb = sb.sd * sb.sd;
    if (va == 0.0 && vb == 0.0) return sa.mean == sb.mean ? 1.0 : 0.0;
    const double se2 = va / sa.n + vb / sb.n;
    const double t = std::abs(sa.mean - sb.mean) / std::sqrt(se2);
    const double dof = se2 * se2 /
                       (va * va / (static_cast<double>(sa.n) * sa.n * (sa.n - 1)) +
                        vb * vb / (static_cast<double>(sb.n) * sb.n * (sb.n - 1)));
    return two_sided_p(t, dof);
}

double pooled_p_value(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw InvariantViolation("samples need n >= 2");
    const SampleStats sa = summarize(a), sb = summarize(b);
    const double va = sa.sd * sa.sd, vb = sb.sd * sb.sd;
    if (va == 0.0 && vb == 0.0) return sa.mean == sb.mean ? 1.0 : 0.0;
    const double dof = sa.n + sb.n - 2.0;
    const double sp2 = ((sa.n - 1) * va + (sb.n - 1) * vb) / dof;
    const double t = std::abs(sa.mean - sb.mean) / std::sqrt(sp2 * (1.0 / sa.n + 1.0 / sb.n));
    return two_sided_p(t, dof);
}

}  // namespace ccm
