#pragma once

#include <cstddef>
#include <vector>

#include "horn/dynamics.hpp"

namespace horn {

/// 2-D angular momentum (p - center) x v.  Negative = clockwise = toward
/// the tip on the working side.
double angular_momentum(const Vec2& p, const Vec2& v, const Vec2& center);

/// Per-collision check of the momentum-gain bound
/// L_plus - L_minus >= relax * (d/r_plus) * arc_s * (v_minus . n).
struct LemmaReport {
    long n_events = 0;        ///< events inside the tip neighborhood
    double min_delta_L = 0;   ///< min of L_plus - L_minus
    double min_margin = 0;    ///< min of delta_L - c_eff * arc_s * v_dot_n
    double c_eff = 0;         ///< relax * d / r_plus
    std::vector<long> violations; ///< event indices with margin <= 0
};

/// Events with theta above the geometry's neighborhood angle are ignored,
/// so degenerate far-side orbits do not pollute the tip statistics.
/// relax must be positive; values above ~2 are expected to flag every
/// event since the true per-event gain is about twice the bound.
LemmaReport lemma_check(const TrajectoryRecord& rec, double relax);

/// Residuals of the tip approximation r_mid*sin(alpha) ~ (d/r_plus)*s on
/// the outer wall, where alpha is the angle subtended at the middle center
/// by the wall normal through the point at arc distance s.
struct SmallAngleReport {
    std::vector<double> s_values;
    std::vector<double> alpha;     ///< exact angle from the perpendicular relation
    std::vector<double> residual;  ///< r_mid*sin(alpha) - (d/r_plus)*s
    double fitted_order = 0;       ///< log-log slope of |residual| vs s
};

SmallAngleReport small_angle_identity_check(const HornGeometry& g,
                                            const std::vector<double>& s_values);

/// Collision angle statistics used for the escape estimate: gaps of 1/theta
/// along stretches where theta strictly decreases.
struct ThetaReport {
    std::vector<double> thetas;
    std::vector<double> reciprocal_gaps;
    double c1_empirical = 0; ///< max reciprocal gap, NaN when no gaps exist
    double sum_theta = 0;    ///< sum of theta over the decreasing stretches
};

ThetaReport theta_report(const TrajectoryRecord& rec);

/// Adiabatic quantities at each collision: arc coordinate s = r_mid*theta,
/// its nominal rate s_dot = L_plus/r_mid, and J = s^2 sqrt(1 - s_dot^2).
struct InvariantPoint {
    double time = 0;
    double s_mid = 0;
    double s_dot = 0;
    double J = 0;
};

using InvariantSeries = std::vector<InvariantPoint>;

/// Requires every event at theta > 0.  |L_plus| may exceed r_mid by at most
/// 1e-9 (clamped); larger excess throws, since unit speed near the middle
/// circle cannot produce it.
InvariantSeries invariant_series(const TrajectoryRecord& rec);

struct TimeSample {
    double time = 0;
    double value = 0;
};

/// Angular velocity about the middle center, sampled along each straight
/// flight at samples_per_flight left-endpoint times plus the final state.
/// Within a flight the value is L / |r(t)|^2 with L constant.
std::vector<TimeSample> angular_velocity_series(const TrajectoryRecord& rec,
                                                int samples_per_flight);

/// Coarse shape descriptors of a sampled time series, for inspecting the
/// dive-then-climb character of the angular velocity.
struct ShapeStats {
    std::size_t n_samples = 0;
    int value_sign_changes = 0;       ///< sign flips of the values themselves
    bool single_flip_neg_to_pos = false;
    double frac_first_diff_nonneg = 0; ///< how monotone-increasing the series is
    double frac_second_diff_nonneg = 0;
    double min_value = 0;
    double max_value = 0;
};

ShapeStats shape_stats(const std::vector<TimeSample>& series);

/// Least-squares slope of log(y) against log(x); pairs with a nonpositive
/// entry are skipped.  Needs at least two usable pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace horn
