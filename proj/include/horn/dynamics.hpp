#pragma once

#include <vector>

#include "horn/geometry.hpp"

namespace horn {

struct ParticleState {
    Vec2 position;
    Vec2 velocity; ///< unit speed
    double time = 0;
};

enum class Termination { Escaped, MaxCollisions, Grazing, TipDegenerate };

const char* to_string(Termination t);

struct StopConditions {
    double theta_max = 0.3;        ///< escape once the flight crosses this polar angle
    long max_collisions = 1000000; ///< hard budget, guarantees termination
    double s_tip = 1e-12;          ///< collisions closer to the tip stop the run
    double eps_graze = 1e-9;       ///< |v.n| below this is an ill-conditioned reflection
};

/// One wall collision.  v_minus/L_minus are taken just before impact,
/// v_plus/L_plus just after.  Angular momenta are about the middle-circle
/// center; arc_s is measured along the struck wall from the cusp tip.
struct CollisionEvent {
    long index = 0;
    Wall wall = Wall::Outer;
    Vec2 point;
    double time = 0;
    Vec2 normal; ///< outward unit normal at the collision point
    Vec2 v_minus;
    Vec2 v_plus;
    double v_dot_n = 0;
    double arc_s = 0;
    double theta = 0;
    double L_minus = 0;
    double L_plus = 0;
    /// Signed angle between v_minus and the wall normal, positive when the
    /// tangential component points away from the cusp (x > 0 side).
    double psi_boundary = 0;
    /// asin(L_minus / r_mid): angle between the incoming segment and the
    /// middle-circle normal direction; clamped when |L| exceeds r_mid by
    /// roundoff-scale amounts.
    double psi_mid = 0;
};

/// Scalar core of a HornGeometry, copied into trajectory records so that
/// diagnostics do not need the (possibly table-backed) geometry object.
struct HornSummary {
    double r_plus = 0, r_minus = 0, r_mid = 0, d = 0, lemma_c = 0, theta_max = 0;
    Vec2 center_mid;
};

HornSummary summarize(const HornGeometry& g);

struct TrajectoryRecord {
    std::vector<CollisionEvent> events;
    ParticleState initial;
    ParticleState final_state; ///< at the escape crossing / last stop point
    Termination termination = Termination::MaxCollisions;
    HornSummary geometry;
    StopConditions stop;
};

/// Specular reflection v - 2(v.n)n, renormalized to unit speed.  Throws
/// std::domain_error when |v.n| <= eps_graze (grazing: the caller should
/// terminate the trajectory instead).
Vec2 reflect(Vec2 v_minus, Vec2 normal, double eps_graze = 1e-9);

struct FlightOutcome {
    enum class Kind { Hit, Escaped, TipDegenerate } kind = Kind::Hit;
    Wall wall = Wall::Outer;
    Vec2 point;             ///< wall hit, or the theta_max crossing for Escaped
    double flight_time = 0; ///< time of flight to `point`
};

/// Earliest wall intersection of the free flight from `state`, unless the
/// flight crosses theta = stop.theta_max first (Escaped) or the hit is
/// numerically at the tip (TipDegenerate).  Departures before t = 1e-12
/// are ignored so a particle can leave the wall it sits on.
FlightOutcome next_collision(const HornGeometry& g, const ParticleState& state,
                             const StopConditions& stop);

struct StepOutcome {
    enum class Kind { Collision, Escaped, Grazing, TipDegenerate } kind = Kind::Collision;
    CollisionEvent event; ///< valid only for Collision
    ParticleState state;  ///< post-reflection state, or the stop point
};

/// One collision step: flight, wall data, reflection.  Grazing impacts
/// (v.n <= eps_graze) terminate instead of reflecting.
StepOutcome step(const HornGeometry& g, const ParticleState& state, const StopConditions& stop);

/// Full trajectory from `initial` (must be inside the domain, or on its
/// boundary within 1e-9, with theta <= stop.theta_max).  Termination is
/// guaranteed by the collision budget.
TrajectoryRecord simulate(const HornGeometry& g, const ParticleState& initial,
                          const StopConditions& stop);

/// State on the middle circle at polar angle theta0, with unit velocity at
/// angle psi0 (counterclockwise) from the cuspward middle-circle tangent.
/// psi0 = 0 slides along the circle toward the cusp; positive psi0 tilts
/// toward the outer wall.
ParticleState launch_from_middle_circle(const HornGeometry& g, double theta0, double psi0);

} // namespace horn
