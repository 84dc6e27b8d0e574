#include "horn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace horn {

double angular_momentum(const Vec2& p, const Vec2& v, const Vec2& center) {
    return cross(p - center, v);
}

LemmaReport lemma_check(const TrajectoryRecord& rec, double relax) {
    if (!(relax > 0)) throw std::invalid_argument("relax must be positive");
    LemmaReport rep;
    rep.c_eff = relax * rec.geometry.lemma_c;
    rep.min_delta_L = std::numeric_limits<double>::infinity();
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& ev : rec.events) {
        if (ev.theta > rec.geometry.theta_max) continue;
        ++rep.n_events;
        const double delta_L = ev.L_plus - ev.L_minus;
        const double margin = delta_L - rep.c_eff * ev.arc_s * ev.v_dot_n;
        rep.min_delta_L = std::min(rep.min_delta_L, delta_L);
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin <= 0) rep.violations.push_back(ev.index);
    }
    return rep;
}

SmallAngleReport small_angle_identity_check(const HornGeometry& g,
                                            const std::vector<double>& s_values) {
    if (!g.circle_model())
        throw std::invalid_argument("small-angle check requires unperturbed circular walls");
    SmallAngleReport rep;
    rep.s_values = s_values;
    std::vector<double> abs_res;
    for (double s : s_values) {
        if (s < 0 || s / g.r_plus > 0.5 * std::numbers::pi)
            throw std::invalid_argument("small-angle check s out of range");
        const double phi = s / g.r_plus;
        // perpendicular relation: (r_plus - d cos phi) tan alpha = d sin phi
        const double a = std::atan2(g.d * std::sin(phi), g.r_plus - g.d * std::cos(phi));
        const double res = g.r_mid * std::sin(a) - g.lemma_c * s;
        rep.alpha.push_back(a);
        rep.residual.push_back(res);
        abs_res.push_back(std::abs(res));
    }
    long usable = 0;
    for (std::size_t i = 0; i < abs_res.size(); ++i)
        if (rep.s_values[i] > 0 && abs_res[i] > 0) ++usable;
    rep.fitted_order = usable >= 2 ? loglog_slope(rep.s_values, abs_res)
                                   : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

ThetaReport theta_report(const TrajectoryRecord& rec) {
    ThetaReport rep;
    rep.thetas.reserve(rec.events.size());
    for (const auto& ev : rec.events) rep.thetas.push_back(ev.theta);

    const std::size_t n = rep.thetas.size();
    std::vector<char> in_stretch(n, 0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = rep.thetas[k], b = rep.thetas[k + 1];
        if (a > 0 && b > 0 && b < a) {
            rep.reciprocal_gaps.push_back(1.0 / b - 1.0 / a);
            in_stretch[k] = in_stretch[k + 1] = 1;
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        if (in_stretch[k]) rep.sum_theta += rep.thetas[k];
    rep.c1_empirical = rep.reciprocal_gaps.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : *std::max_element(rep.reciprocal_gaps.begin(),
                                               rep.reciprocal_gaps.end());
    return rep;
}

InvariantSeries invariant_series(const TrajectoryRecord& rec) {
    InvariantSeries out;
    const double r = rec.geometry.r_mid;
    for (const auto& ev : rec.events) {
        if (!(ev.theta > 0))
            throw std::invalid_argument("invariant series requires events at theta > 0");
        if (std::abs(ev.L_plus) > r + 1e-9)
            throw std::domain_error("invariant series: |L| exceeds the middle radius");
        InvariantPoint pt;
        pt.time = ev.time;
        pt.s_mid = r * ev.theta;
        pt.s_dot = std::clamp(ev.L_plus / r, -1.0, 1.0);
        pt.J = pt.s_mid * pt.s_mid * std::sqrt(1.0 - pt.s_dot * pt.s_dot);
        out.push_back(pt);
    }
    return out;
}

std::vector<TimeSample> angular_velocity_series(const TrajectoryRecord& rec,
                                                int samples_per_flight) {
    if (samples_per_flight < 1)
        throw std::invalid_argument("samples_per_flight must be at least 1");
    std::vector<TimeSample> out;
    const Vec2 c = rec.geometry.center_mid;

    auto add_flight = [&](const Vec2& p, const Vec2& v, double t0, double t1) {
        if (!(t1 > t0)) return;
        const double L = cross(p - c, v);
        const double span = t1 - t0;
        for (int i = 0; i < samples_per_flight; ++i) {
            const double dt = span * i / samples_per_flight;
            const Vec2 r = p + dt * v - c;
            out.push_back({t0 + dt, L / dot(r, r)});
        }
    };

    Vec2 p = rec.initial.position;
    Vec2 v = rec.initial.velocity;
    double t = rec.initial.time;
    for (const auto& ev : rec.events) {
        add_flight(p, v, t, ev.time);
        p = ev.point;
        v = ev.v_plus;
        t = ev.time;
    }
    add_flight(p, v, t, rec.final_state.time);
    {
        const Vec2 r = rec.final_state.position - c;
        const double L = cross(r, rec.final_state.velocity);
        out.push_back({rec.final_state.time, L / dot(r, r)});
    }
    return out;
}

ShapeStats shape_stats(const std::vector<TimeSample>& series) {
    ShapeStats st;
    st.n_samples = series.size();
    if (series.empty()) return st;

    st.min_value = st.max_value = series[0].value;
    for (const auto& s : series) {
        st.min_value = std::min(st.min_value, s.value);
        st.max_value = std::max(st.max_value, s.value);
    }
    const double scale = std::max(std::abs(st.min_value), std::abs(st.max_value));
    const double tol = 1e-12 * std::max(scale, 1e-300);

    int prev_sign = 0;
    int flips = 0;
    bool first_flip_neg_to_pos = false;
    for (const auto& s : series) {
        const int sign = (s.value > tol) ? 1 : (s.value < -tol) ? -1 : 0;
        if (sign == 0) continue;
        if (prev_sign != 0 && sign != prev_sign) {
            ++flips;
            if (flips == 1 && prev_sign < 0 && sign > 0) first_flip_neg_to_pos = true;
        }
        prev_sign = sign;
    }
    st.value_sign_changes = flips;
    st.single_flip_neg_to_pos = (flips == 1) && first_flip_neg_to_pos;

    std::size_t n_first = 0, ok_first = 0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        ++n_first;
        if (series[i + 1].value - series[i].value >= -tol) ++ok_first;
    }
    st.frac_first_diff_nonneg = n_first ? double(ok_first) / double(n_first) : 1.0;

    std::size_t n_second = 0, ok_second = 0;
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        ++n_second;
        const double dd = series[i + 1].value - 2 * series[i].value + series[i - 1].value;
        if (dd >= -tol) ++ok_second;
    }
    st.frac_second_diff_nonneg = n_second ? double(ok_second) / double(n_second) : 1.0;
    return st;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("loglog_slope size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("loglog_slope needs two positive pairs");
    const double denom = n * sxx - sx * sx;
    if (denom == 0) throw std::invalid_argument("loglog_slope degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

} // namespace horn
