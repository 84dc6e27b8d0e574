#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "horn/diagnostics.hpp"
#include "horn/dynamics.hpp"

using namespace horn;

namespace {

HornGeometry g21() { return build_horn(2.0, 1.0, 0.3); }

TrajectoryRecord record_with_thetas(std::initializer_list<double> thetas) {
    TrajectoryRecord rec;
    rec.geometry = summarize(g21());
    double t = 0;
    for (double th : thetas) {
        CollisionEvent ev;
        ev.index = static_cast<long>(rec.events.size());
        ev.time = t;
        ev.theta = th;
        rec.events.push_back(ev);
        t += 0.25;
    }
    return rec;
}

} // namespace

TEST_CASE("angular momentum sign convention") {
    CHECK(angular_momentum({1.5, 1.5}, {0, 1}, {0, 1.5}) == doctest::Approx(1.5));
    CHECK(angular_momentum({0, 0}, {1, 0}, {0, 1.5}) == doctest::Approx(1.5));

    // sliding toward the tip along the middle circle is clockwise, L < 0
    const HornGeometry g = g21();
    const Vec2 u = unit_from_down(0.2);
    const Vec2 p = g.center_mid + g.r_mid * u;
    const Vec2 cuspward = -1.0 * perp(u);
    CHECK(angular_momentum(p, cuspward, g.center_mid) ==
          doctest::Approx(-g.r_mid).epsilon(1e-12));
}

TEST_CASE("momentum-gain margins on synthetic events") {
    TrajectoryRecord rec;
    rec.geometry = summarize(g21());
    CollisionEvent ev;
    ev.index = 0;
    ev.wall = Wall::Outer;
    ev.theta = 0.1;
    ev.arc_s = 0.2;
    ev.v_dot_n = 0.3;
    ev.L_minus = -0.10;
    ev.L_plus = -0.05;
    rec.events.push_back(ev);

    const LemmaReport rep = lemma_check(rec, 0.9);
    CHECK(rep.n_events == 1);
    CHECK(rep.c_eff == doctest::Approx(0.225).epsilon(1e-15));
    CHECK(rep.min_delta_L == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(rep.min_margin == doctest::Approx(0.05 - 0.225 * 0.2 * 0.3).epsilon(1e-12));
    CHECK(rep.violations.empty());

    CHECK_THROWS_AS(lemma_check(rec, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lemma_check(rec, -1.0), std::invalid_argument);
}

TEST_CASE("far-side events are excluded by the angle filter") {
    TrajectoryRecord rec = record_with_thetas({3.14159, 3.14159, 3.14159});
    for (auto& ev : rec.events) {
        ev.L_minus = 0;
        ev.L_plus = 0; // degenerate axis orbit: no gain at all
        ev.v_dot_n = 1;
        ev.arc_s = 3.0;
    }
    const LemmaReport rep = lemma_check(rec, 0.9);
    CHECK(rep.n_events == 0);
    CHECK(rep.violations.empty());
}

TEST_CASE("momentum gain on real trajectories, and an over-tight constant") {
    const HornGeometry g = g21();
    const StopConditions stop;
    const TrajectoryRecord rec = simulate(g, launch_from_middle_circle(g, 0.28, -0.1), stop);
    REQUIRE(rec.events.size() > 5);

    const LemmaReport ok = lemma_check(rec, 0.9);
    CHECK(ok.n_events > 0);
    CHECK(ok.violations.empty());
    CHECK(ok.min_margin > 0);
    CHECK(ok.min_delta_L > 0);

    // the true gain is about twice the bound, so 2.5x must flag events
    const LemmaReport bad = lemma_check(rec, 2.5);
    CHECK(!bad.violations.empty());
    CHECK(bad.min_margin < 0);
}

TEST_CASE("small-angle identity residuals") {
    const HornGeometry g = g21();

    const SmallAngleReport zero = small_angle_identity_check(g, {0.0});
    CHECK(zero.alpha[0] == doctest::Approx(0.0));
    CHECK(zero.residual[0] == doctest::Approx(0.0));

    const SmallAngleReport rep = small_angle_identity_check(g, {0.2, 0.1, 0.05, 0.025});
    CHECK(rep.fitted_order >= 1.9);

    // the perpendicular length equals -r x n on the outer wall
    for (double s : {0.05, 0.3}) {
        const BoundarySample b = boundary_point(g, Wall::Outer, s);
        const Vec2 r = b.point - g.center_mid;
        const double lhs = -cross(r, b.outward_normal);
        const double phi = s / g.r_plus;
        const double alpha = std::atan2(g.d * std::sin(phi), g.r_plus - g.d * std::cos(phi));
        CHECK(lhs == doctest::Approx(norm(r) * std::sin(alpha)).epsilon(1e-10));
        CHECK(lhs >= 0);
    }

    const HornGeometry gp = build_horn(2.0, 1.0, 0.3, 0.05, 0.0);
    CHECK_THROWS_AS(small_angle_identity_check(gp, {0.1}), std::invalid_argument);
}

TEST_CASE("reciprocal gaps along decreasing angle stretches") {
    const TrajectoryRecord rec = record_with_thetas({0.3, 0.2, 0.15});
    const ThetaReport rep = theta_report(rec);
    REQUIRE(rep.reciprocal_gaps.size() == 2);
    CHECK(rep.reciprocal_gaps[0] == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(rep.reciprocal_gaps[1] == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(rep.c1_empirical == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(rep.sum_theta == doctest::Approx(0.65).epsilon(1e-12));

    const ThetaReport single = theta_report(record_with_thetas({0.2}));
    CHECK(single.reciprocal_gaps.empty());
    CHECK(std::isnan(single.c1_empirical));
    CHECK(single.sum_theta == 0.0);

    // rising stretch contributes no gaps
    const ThetaReport rising = theta_report(record_with_thetas({0.1, 0.2, 0.3}));
    CHECK(rising.reciprocal_gaps.empty());

    // an escaping dive has finitely many decreasing gaps, all finite
    const HornGeometry g = g21();
    const auto real = simulate(g, launch_from_middle_circle(g, 0.28, -0.15), StopConditions{});
    const ThetaReport rr = theta_report(real);
    REQUIRE(!rr.reciprocal_gaps.empty());
    CHECK(std::isfinite(rr.sum_theta));
    CHECK(std::isfinite(rr.c1_empirical));
    CHECK(rr.c1_empirical > 0);
}

TEST_CASE("invariant series per event") {
    TrajectoryRecord rec;
    rec.geometry = summarize(g21());
    CollisionEvent ev;
    ev.theta = 0.1 / 1.5; // s_mid = 0.1
    ev.L_plus = -0.75;    // s_dot = -0.5
    ev.time = 1.0;
    rec.events.push_back(ev);

    const InvariantSeries series = invariant_series(rec);
    REQUIRE(series.size() == 1);
    CHECK(series[0].s_mid == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(series[0].s_dot == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(series[0].J == doctest::Approx(0.0086603).epsilon(1e-5));

    rec.events[0].L_plus = 1.5;
    CHECK(invariant_series(rec)[0].J == doctest::Approx(0.0).epsilon(1e-12));

    rec.events[0].L_plus = 1.5 + 1e-6;
    CHECK_THROWS_AS(invariant_series(rec), std::domain_error);

    rec.events[0].L_plus = 0.5;
    rec.events[0].theta = -0.1;
    CHECK_THROWS_AS(invariant_series(rec), std::invalid_argument);
}

TEST_CASE("angular velocity sampling along flights") {
    const HornGeometry g = g21();

    // axis flight: L = 0 everywhere
    TrajectoryRecord axis;
    axis.geometry = summarize(g);
    axis.initial = {{0, 3}, {0, 1}, 0};
    axis.final_state = {{0, 4}, {0, 1}, 1.0};
    const auto flat = angular_velocity_series(axis, 5);
    REQUIRE(flat.size() == 6);
    for (const auto& smp : flat) CHECK(std::abs(smp.value) <= 1e-15);

    // generic flight: first sample is L / |r0|^2 at t = 0
    TrajectoryRecord one;
    one.geometry = summarize(g);
    one.initial = {{0.3, 0.1}, unit_from_down(2.0), 0};
    one.final_state = {one.initial.position + 0.5 * one.initial.velocity,
                       one.initial.velocity, 0.5};
    const auto series = angular_velocity_series(one, 3);
    REQUIRE(series.size() == 4);
    const Vec2 r0 = one.initial.position - g.center_mid;
    const double L = cross(r0, one.initial.velocity);
    CHECK(series[0].time == doctest::Approx(0.0));
    CHECK(series[0].value == doctest::Approx(L / norm2(r0)).epsilon(1e-12));

    CHECK_THROWS_AS(angular_velocity_series(one, 0), std::invalid_argument);
}

TEST_CASE("dive-and-climb shape of the angular velocity") {
    const HornGeometry g = g21();
    const auto rec = simulate(g, launch_from_middle_circle(g, 0.25, -0.12), StopConditions{});
    REQUIRE(rec.termination == Termination::Escaped);

    // One sample per flight: the angle's convexity shows as a nondecreasing
    // rate, since each collision only ever adds counterclockwise momentum.
    const ShapeStats flight = shape_stats(angular_velocity_series(rec, 1));
    CHECK(flight.n_samples > 40);
    CHECK(flight.min_value < 0);
    CHECK(flight.max_value > 0);
    CHECK(flight.value_sign_changes == 1);
    CHECK(flight.single_flip_neg_to_pos);
    CHECK(flight.frac_first_diff_nonneg >= 0.95);

    // Densely sampled, the within-flight 1/|r|^2 wiggle shows up in the
    // differences, but the single inbound-to-outbound flip survives.
    const ShapeStats dense = shape_stats(angular_velocity_series(rec, 8));
    CHECK(dense.value_sign_changes == 1);
    CHECK(dense.single_flip_neg_to_pos);
    CHECK(dense.frac_first_diff_nonneg > 0.5);
}
