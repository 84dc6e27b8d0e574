#include "horn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace horn {

namespace {

constexpr double t_min_flight = 1e-12;
constexpr double inf = std::numeric_limits<double>::infinity();

struct CircleHit {
    bool ok = false;
    double t = inf;
};

/// Earliest intersection time (> t_min_flight) of p + t*v with the circle.
/// Roots come from the numerically stable quadratic: the large-magnitude
/// root q = -(b + sign(b)*sqrt(disc))/2 first, the other as c/q, which
/// avoids cancellation when the particle sits on the circle (c ~ 0).
CircleHit circle_hit(Vec2 p, Vec2 v, Vec2 center, double radius) {
    const Vec2 w = p - center;
    const double b = 2.0 * dot(w, v);
    const double c = norm2(w) - radius * radius;
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0)
        return {};
    const double sq = std::sqrt(disc);
    const double q = (b >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
    CircleHit h;
    const double roots[2] = {q, q != 0.0 ? c / q : q};
    for (double r : roots)
        if (r > t_min_flight && r < h.t) {
            h.ok = true;
            h.t = r;
        }
    return h;
}

/// Time at which the flight crosses the ray {theta = theta_max} from the
/// middle-circle center, if it does so in (t_min, t_limit).
std::optional<double> theta_crossing(const HornGeometry& g, Vec2 p, Vec2 v, double theta_max,
                                     double t_limit) {
    const Vec2 u = unit_from_down(theta_max);
    const Vec2 w = p - g.center_mid;
    const double denom = cross(v, u);
    if (denom == 0.0)
        return std::nullopt;
    const double t = -cross(w, u) / denom;
    if (!(t > t_min_flight) || !(t < t_limit - 1e-12))
        return std::nullopt;
    if (dot(w + t * v, u) <= 0.0)
        return std::nullopt; // opposite ray through the center
    return t;
}

double wall_arc_from_tip(const HornGeometry& g, Wall wall, Vec2 point) {
    return nearest_arc_on_wall(g, wall, point);
}

FlightOutcome next_collision_circles(const HornGeometry& g, const ParticleState& st,
                                     const StopConditions& stop) {
    const Vec2 p = st.position, v = st.velocity;
    const CircleHit ho = circle_hit(p, v, g.center_plus, g.r_plus);
    const CircleHit hi = circle_hit(p, v, g.center_minus, g.r_minus);
    if (!ho.ok && !hi.ok)
        throw std::runtime_error("next_collision: free flight misses both walls");

    FlightOutcome out;
    if (ho.ok && hi.ok && std::abs(ho.t - hi.t) < 1e-12) {
        out.kind = FlightOutcome::Kind::TipDegenerate;
        out.flight_time = std::min(ho.t, hi.t);
        out.point = p + out.flight_time * v;
        return out;
    }
    if (!ho.ok || (hi.ok && hi.t < ho.t)) {
        out.wall = Wall::Inner;
        out.flight_time = hi.t;
    } else {
        out.wall = Wall::Outer;
        out.flight_time = ho.t;
    }
    if (auto tc = theta_crossing(g, p, v, stop.theta_max, out.flight_time)) {
        out.kind = FlightOutcome::Kind::Escaped;
        out.flight_time = *tc;
        out.point = p + *tc * v;
        return out;
    }
    out.point = p + out.flight_time * v;
    if (wall_arc_from_tip(g, out.wall, out.point) < stop.s_tip) {
        out.kind = FlightOutcome::Kind::TipDegenerate;
        return out;
    }
    out.kind = FlightOutcome::Kind::Hit;
    return out;
}

/// Perturbed-wall path: march the two signed wall distances along the
/// flight with a step budget of a quarter of the local gap, bracket the
/// first sign change, then bisect it down to 1e-12.
FlightOutcome next_collision_march(const HornGeometry& g, const ParticleState& st,
                                   const StopConditions& stop) {
    const Vec2 p = st.position, v = st.velocity;
    const double t_limit = 2.0 * g.r_plus + 1.0;
    const auto tc = theta_crossing(g, p, v, stop.theta_max, inf);
    const double march_end = tc ? std::min(*tc + 1e-9, t_limit) : t_limit;

    auto sd = [&](Wall w, double t) { return signed_wall_distance(g, w, p + t * v); };

    double t_prev = t_min_flight;
    double f_prev[2] = {sd(Wall::Outer, t_prev), sd(Wall::Inner, t_prev)};
    bool armed[2] = {f_prev[0] < -1e-10, f_prev[1] < -1e-10};

    double t_hit[2] = {inf, inf};
    long iterations = 0;
    while (t_prev < march_end) {
        if (++iterations > 2000000)
            throw std::runtime_error("next_collision: marching budget exhausted");
        const double s_here = g.r_mid * std::abs(theta_of(g, p + t_prev * v));
        const double step_len =
            std::clamp(0.25 * circle_model_width(g, std::max(s_here, 1e-4)), 1e-7, 0.02);
        const double t_now = std::min(t_prev + step_len, march_end);
        const double f_now[2] = {sd(Wall::Outer, t_now), sd(Wall::Inner, t_now)};
        bool found = false;
        for (int w = 0; w < 2; ++w) {
            if (!armed[w]) {
                if (f_now[w] < -1e-10)
                    armed[w] = true;
                continue;
            }
            if (f_prev[w] < 0.0 && f_now[w] >= 0.0) {
                const Wall wall = w == 0 ? Wall::Outer : Wall::Inner;
                double lo = t_prev, hi = t_now;
                while (hi - lo > 1e-12) {
                    const double mid = 0.5 * (lo + hi);
                    if (sd(wall, mid) < 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                t_hit[w] = 0.5 * (lo + hi);
                found = true;
            }
        }
        if (found)
            break;
        t_prev = t_now;
        f_prev[0] = f_now[0];
        f_prev[1] = f_now[1];
        if (t_now >= march_end)
            break;
    }

    FlightOutcome out;
    const bool any_hit = t_hit[0] < inf || t_hit[1] < inf;
    if (any_hit && t_hit[0] < inf && t_hit[1] < inf && std::abs(t_hit[0] - t_hit[1]) < 1e-12) {
        out.kind = FlightOutcome::Kind::TipDegenerate;
        out.flight_time = std::min(t_hit[0], t_hit[1]);
        out.point = p + out.flight_time * v;
        return out;
    }
    const double t_best = std::min(t_hit[0], t_hit[1]);
    if (tc && (!any_hit || *tc < t_best - 1e-12)) {
        out.kind = FlightOutcome::Kind::Escaped;
        out.flight_time = *tc;
        out.point = p + *tc * v;
        return out;
    }
    if (!any_hit)
        throw std::runtime_error("next_collision: free flight found no wall crossing");
    out.wall = t_hit[0] <= t_hit[1] ? Wall::Outer : Wall::Inner;
    out.flight_time = t_best;
    out.point = p + t_best * v;
    if (wall_arc_from_tip(g, out.wall, out.point) < stop.s_tip) {
        out.kind = FlightOutcome::Kind::TipDegenerate;
        return out;
    }
    out.kind = FlightOutcome::Kind::Hit;
    return out;
}

/// Outward normal and increasing-arc tangent at a wall point.
void wall_frame(const HornGeometry& g, Wall wall, Vec2 point, Vec2& normal, Vec2& tangent,
                double& arc_s) {
    const auto& pw = wall == Wall::Outer ? g.perturbed_plus : g.perturbed_minus;
    if (pw) {
        arc_s = nearest_arc_on_wall(g, wall, point);
        const BoundarySample bs = boundary_point(g, wall, arc_s);
        normal = bs.outward_normal;
        tangent = bs.tangent;
        return;
    }
    const Vec2 center = wall == Wall::Outer ? g.center_plus : g.center_minus;
    const Vec2 radial = normalized(point - center);
    normal = wall == Wall::Outer ? radial : -1.0 * radial;
    tangent = wall == Wall::Outer ? perp(normal) : -1.0 * perp(normal);
    arc_s = nearest_arc_on_wall(g, wall, point);
}

} // namespace

const char* to_string(Termination t) {
    switch (t) {
    case Termination::Escaped:
        return "escaped";
    case Termination::MaxCollisions:
        return "max_collisions";
    case Termination::Grazing:
        return "grazing";
    case Termination::TipDegenerate:
        return "tip_degenerate";
    }
    return "unknown";
}

HornSummary summarize(const HornGeometry& g) {
    return {g.r_plus, g.r_minus, g.r_mid, g.d, g.lemma_c, g.theta_max, g.center_mid};
}

Vec2 reflect(Vec2 v_minus, Vec2 normal, double eps_graze) {
    if (std::abs(norm(v_minus) - 1.0) > 1e-9 || std::abs(norm(normal) - 1.0) > 1e-9)
        throw std::invalid_argument("reflect: velocity and normal must be unit vectors");
    const double vn = dot(v_minus, normal);
    if (std::abs(vn) <= eps_graze)
        throw std::domain_error("reflect: grazing impact, |v.n| <= eps_graze");
    return normalized(v_minus - 2.0 * vn * normal);
}

FlightOutcome next_collision(const HornGeometry& g, const ParticleState& state,
                             const StopConditions& stop) {
    if (g.circle_model())
        return next_collision_circles(g, state, stop);
    return next_collision_march(g, state, stop);
}

StepOutcome step(const HornGeometry& g, const ParticleState& state, const StopConditions& stop) {
    const FlightOutcome fo = next_collision(g, state, stop);
    StepOutcome out;
    out.state = {fo.point, state.velocity, state.time + fo.flight_time};
    if (fo.kind == FlightOutcome::Kind::Escaped) {
        out.kind = StepOutcome::Kind::Escaped;
        return out;
    }
    if (fo.kind == FlightOutcome::Kind::TipDegenerate) {
        out.kind = StepOutcome::Kind::TipDegenerate;
        return out;
    }

    Vec2 normal, tangent;
    double arc_s = 0.0;
    wall_frame(g, fo.wall, fo.point, normal, tangent, arc_s);
    const double vn = dot(state.velocity, normal);
    if (vn <= stop.eps_graze) {
        out.kind = StepOutcome::Kind::Grazing;
        return out;
    }

    CollisionEvent ev;
    ev.wall = fo.wall;
    ev.point = fo.point;
    ev.time = state.time + fo.flight_time;
    ev.normal = normal;
    ev.v_minus = state.velocity;
    ev.v_plus = reflect(state.velocity, normal, stop.eps_graze);
    ev.v_dot_n = vn;
    ev.arc_s = arc_s;
    ev.theta = theta_of(g, fo.point);
    const Vec2 r = fo.point - g.center_mid;
    ev.L_minus = cross(r, ev.v_minus);
    ev.L_plus = cross(r, ev.v_plus);
    ev.psi_boundary = std::atan2(dot(ev.v_minus, tangent), vn);
    ev.psi_mid = std::asin(std::clamp(ev.L_minus / g.r_mid, -1.0, 1.0));

    out.kind = StepOutcome::Kind::Collision;
    out.event = ev;
    out.state = {fo.point, ev.v_plus, ev.time};
    return out;
}

TrajectoryRecord simulate(const HornGeometry& g, const ParticleState& initial,
                          const StopConditions& stop) {
    if (std::abs(norm(initial.velocity) - 1.0) > 1e-12)
        throw std::invalid_argument("simulate: initial velocity must be unit");
    if (signed_wall_distance(g, Wall::Outer, initial.position) > 1e-9 ||
        signed_wall_distance(g, Wall::Inner, initial.position) > 1e-9)
        throw std::invalid_argument("simulate: initial position outside the domain");
    if (theta_of(g, initial.position) > stop.theta_max + 1e-12)
        throw std::invalid_argument("simulate: initial position outside theta_max");
    if (stop.max_collisions < 0 || stop.theta_max <= 0.0 || stop.s_tip < 0.0 ||
        stop.eps_graze < 0.0)
        throw std::invalid_argument("simulate: stop conditions must be positive");

    TrajectoryRecord rec;
    rec.initial = initial;
    rec.geometry = summarize(g);
    rec.stop = stop;

    ParticleState state = initial;
    while ((long)rec.events.size() < stop.max_collisions) {
        // A collision can land a hair past the escape angle; the next flight
        // then leaves the neighborhood immediately.
        if (theta_of(g, state.position) > stop.theta_max + 1e-12) {
            rec.termination = Termination::Escaped;
            rec.final_state = state;
            return rec;
        }
        StepOutcome so = step(g, state, stop);
        switch (so.kind) {
        case StepOutcome::Kind::Collision:
            so.event.index = (long)rec.events.size();
            rec.events.push_back(so.event);
            state = so.state;
            break;
        case StepOutcome::Kind::Escaped:
            rec.termination = Termination::Escaped;
            rec.final_state = so.state;
            return rec;
        case StepOutcome::Kind::Grazing:
            rec.termination = Termination::Grazing;
            rec.final_state = so.state;
            return rec;
        case StepOutcome::Kind::TipDegenerate:
            rec.termination = Termination::TipDegenerate;
            rec.final_state = so.state;
            return rec;
        }
    }
    rec.termination = Termination::MaxCollisions;
    rec.final_state = state;
    return rec;
}

ParticleState launch_from_middle_circle(const HornGeometry& g, double theta0, double psi0) {
    const Vec2 u = unit_from_down(theta0);
    const Vec2 cuspward = -1.0 * perp(u); // tangent with decreasing theta
    return {g.center_mid + g.r_mid * u, rotated(cuspward, psi0), 0.0};
}

} // namespace horn
