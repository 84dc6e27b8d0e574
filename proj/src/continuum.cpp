#include "horn/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace horn {

namespace {

constexpr double k_s_floor = 1e-6;
constexpr double k_sdot_reject = 1e-9;  // |s_dot| beyond 1 by more than this aborts
constexpr double k_sdot_clamp = 1e-12;  // smaller excursions get clamped to 1

double rhs(double s, double s_dot) {
    if (s <= 0) throw std::domain_error("ode rhs requires s > 0");
    return 2.0 * (1.0 - s_dot * s_dot) / s;
}

struct Deriv {
    double ds;
    double dv;
};

Deriv eval(double s, double v) { return {v, rhs(s, v)}; }

// One classical RK4 step.  Returns false (leaving y untouched) if any stage
// would need s <= floor, which the caller treats as hitting the floor.
bool rk4_step(OdeState& y, double dt) {
    const double s = y.s, v = y.s_dot;
    if (s <= k_s_floor) return false;
    const Deriv k1 = eval(s, v);
    const double s2 = s + 0.5 * dt * k1.ds;
    if (s2 <= k_s_floor) return false;
    const Deriv k2 = eval(s2, v + 0.5 * dt * k1.dv);
    const double s3 = s + 0.5 * dt * k2.ds;
    if (s3 <= k_s_floor) return false;
    const Deriv k3 = eval(s3, v + 0.5 * dt * k2.dv);
    const double s4 = s + dt * k3.ds;
    if (s4 <= k_s_floor) return false;
    const Deriv k4 = eval(s4, v + dt * k3.dv);

    double s_new = s + dt / 6.0 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds);
    double v_new = v + dt / 6.0 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
    if (s_new <= k_s_floor) return false;

    const double excess = std::abs(v_new) - 1.0;
    if (excess > k_sdot_reject)
        throw std::runtime_error("ode step rejected: |s_dot| exceeded 1");
    if (excess > 0 && excess <= k_sdot_clamp) v_new = (v_new > 0) ? 1.0 : -1.0;

    y.s = s_new;
    y.s_dot = v_new;
    y.t += dt;
    return true;
}

void validate_start(const OdeState& y0, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("ode dt must be positive");
    if (!(y0.s > 0)) throw std::invalid_argument("ode initial s must be positive");
    if (std::abs(y0.s_dot) > 1.0 + k_sdot_reject)
        throw std::invalid_argument("ode initial |s_dot| must not exceed 1");
}

} // namespace

double ode_rhs(const OdeState& y) { return rhs(y.s, y.s_dot); }

double invariant(const OdeState& y) {
    const double u2 = y.s_dot * y.s_dot;
    double rest = 1.0 - u2;
    if (rest < 0) {
        if (rest < -1e-9) throw std::domain_error("invariant requires |s_dot| <= 1");
        rest = 0;
    }
    return y.s * y.s * std::sqrt(rest);
}

OdeRun integrate(OdeState y0, double dt, double t_end, long max_steps) {
    validate_start(y0, dt);
    OdeRun run;
    run.states.push_back(y0);
    OdeState y = y0;
    long steps = 0;
    while (y.t + 0.5 * dt < t_end && steps < max_steps) {
        if (!rk4_step(y, dt)) {
            run.hit_floor = true;
            break;
        }
        run.states.push_back(y);
        ++steps;
    }
    return run;
}

OdeRun integrate_excursion(OdeState y0, double dt, double s_exit, long max_steps) {
    validate_start(y0, dt);
    if (!(s_exit > 0)) throw std::invalid_argument("ode s_exit must be positive");
    OdeRun run;
    run.states.push_back(y0);
    OdeState y = y0;
    long steps = 0;
    while (steps < max_steps) {
        if (!rk4_step(y, dt)) {
            run.hit_floor = true;
            break;
        }
        run.states.push_back(y);
        ++steps;
        if (y.s >= s_exit && y.s_dot > 0) {
            run.exited = true;
            break;
        }
    }
    return run;
}

RateTriple rate_formulas(const HornGeometry& g, double s, double L) {
    if (!(s > 0)) throw std::invalid_argument("rate formulas require s > 0");
    if (!(std::abs(L) < g.r_mid)) throw std::invalid_argument("rate formulas require |L| < mid radius");
    const double factor = 1.0 - (L * L) / (g.r_mid * g.r_mid);
    RateTriple r;
    r.outer = g.r_minus * factor / s;
    r.inner = g.r_plus * factor / s;
    r.total = r.outer + r.inner;
    return r;
}

RoundTripReport round_trip_measure(const TrajectoryRecord& rec) {
    RoundTripReport rep;
    const auto& ev = rec.events;
    size_t i = 0;
    while (i + 2 < ev.size()) {
        const bool triple = ev[i].wall == Wall::Outer && ev[i + 1].wall == Wall::Inner &&
                            ev[i + 2].wall == Wall::Outer;
        if (!triple) {
            ++rep.skipped;
            ++i;
            continue;
        }
        RoundTripSample smp;
        smp.s = rec.geometry.r_mid * std::abs(ev[i].theta);
        smp.L_before = ev[i].L_minus;
        smp.delta_L_outer = ev[i].L_plus - ev[i].L_minus;
        smp.delta_L_inner = ev[i + 1].L_plus - ev[i + 1].L_minus;
        smp.delta_t = ev[i + 2].time - ev[i].time;
        rep.samples.push_back(smp);
        i += 2; // closing outer event opens the next trip
    }
    return rep;
}

ShadowReport shadow_compare(const TrajectoryRecord& rec, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("shadow compare dt must be positive");
    const auto& ev = rec.events;
    size_t start = ev.size();
    for (size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].L_plus < 0) {
            start = i;
            break;
        }
    }
    if (start >= ev.size()) throw std::invalid_argument("no cuspward event to seed from");

    ShadowReport rep;
    const double r_mid = rec.geometry.r_mid;
    rep.s0 = r_mid * std::abs(ev[start].theta);
    rep.s_dot0 = ev[start].L_plus / r_mid;
    rep.t0 = ev[start].time;
    if (!(rep.s0 > k_s_floor)) throw std::invalid_argument("seed event too close to the tip");

    const double t_last = ev.back().time;
    OdeRun run = integrate({rep.s0, rep.s_dot0, rep.t0}, dt, t_last + dt);

    rep.billiard_min_s = rep.s0;
    rep.ode_min_s = rep.s0;
    for (const auto& st : run.states) rep.ode_min_s = std::min(rep.ode_min_s, st.s);

    // Linear interpolation of the ODE path at each later event time.
    size_t j = 0;
    for (size_t i = start; i < ev.size(); ++i) {
        const double t = ev[i].time;
        const double s_billiard = r_mid * std::abs(ev[i].theta);
        rep.billiard_min_s = std::min(rep.billiard_min_s, s_billiard);
        while (j + 1 < run.states.size() && run.states[j + 1].t < t) ++j;
        if (j + 1 >= run.states.size()) break;
        const OdeState& a = run.states[j];
        const OdeState& b = run.states[j + 1];
        const double w = (t - a.t) / (b.t - a.t);
        const double s_ode = a.s + w * (b.s - a.s);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(s_billiard - s_ode));
        ++rep.n_compared;
    }
    rep.normalized_deviation = rep.max_deviation / rep.s0;
    return rep;
}

} // namespace horn
