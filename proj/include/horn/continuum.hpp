#pragma once

#include <vector>

#include "horn/dynamics.hpp"

namespace horn {

/// State of the averaged cusp equation s'' = 2(1 - s'^2)/s, where s is the
/// middle-circle arc distance to the tip.
struct OdeState {
    double s = 0;
    double s_dot = 0;
    double t = 0;
};

/// Right-hand side for s''.  Throws for s <= 0.
double ode_rhs(const OdeState& y);

/// Conserved quantity s^2 * sqrt(1 - s_dot^2) of the cusp equation.
double invariant(const OdeState& y);

struct OdeRun {
    std::vector<OdeState> states; ///< includes the initial state
    bool hit_floor = false;       ///< stopped at the s > 1e-6 guard
    bool exited = false;          ///< excursion variant only: s recovered past s_exit
};

/// Classical RK4 with fixed step dt from y0.t to t_end (whole steps).
/// Halts early if s would cross the 1e-6 floor; rejects a step that takes
/// |s_dot| beyond 1 + 1e-9, and clamps excursions beyond 1 only when they
/// are below 1e-12.
OdeRun integrate(OdeState y0, double dt, double t_end, long max_steps = 50000000);

/// Integrate until the trajectory has turned and climbed back out to
/// s >= s_exit with s_dot > 0 (or a budget/floor stop).
OdeRun integrate_excursion(OdeState y0, double dt, double s_exit, long max_steps = 50000000);

struct RateTriple {
    double outer = 0; ///< momentum gain rate from outer-wall collisions
    double inner = 0; ///< same for inner-wall collisions
    double total = 0; ///< outer + inner
};

/// Leading-order momentum transfer rates at middle-circle arc s and angular
/// momentum L: outer = r_minus*(1 - L^2/R^2)/s, inner = r_plus*(...)/s.
RateTriple rate_formulas(const HornGeometry& g, double s, double L);

/// One outer -> inner -> outer round trip extracted from a trajectory.
struct RoundTripSample {
    double s = 0;        ///< middle-circle arc at the opening outer event
    double L_before = 0; ///< L just before the opening outer collision
    double delta_L_outer = 0;
    double delta_L_inner = 0;
    double delta_t = 0;
};

struct RoundTripReport {
    std::vector<RoundTripSample> samples;
    long skipped = 0; ///< events not part of an alternating triple
};

RoundTripReport round_trip_measure(const TrajectoryRecord& rec);

/// Billiard-vs-ODE comparison.  The ODE is seeded from the first cuspward
/// event (L_plus < 0) using (s, s_dot) = (r_mid*theta, L_plus/r_mid) and
/// sampled at the later event times.
struct ShadowReport {
    double s0 = 0, s_dot0 = 0, t0 = 0;
    double max_deviation = 0;        ///< max |s_billiard - s_ode| over event times
    double normalized_deviation = 0; ///< max_deviation / s0
    double billiard_min_s = 0;
    double ode_min_s = 0;
    long n_compared = 0;
};

ShadowReport shadow_compare(const TrajectoryRecord& rec, double dt);

} // namespace horn
