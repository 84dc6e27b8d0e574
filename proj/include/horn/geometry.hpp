#pragma once

#include <optional>
#include <vector>

#include "horn/vec2.hpp"

namespace horn {

enum class Wall { Inner, Outer };
enum class Curve { Inner, Outer, Middle };

const char* to_string(Wall w);

/// Point sample of a wall, arc-length parametrized from the cusp tip O.
struct BoundarySample {
    Vec2 point;
    Vec2 outward_normal;  ///< unit, points out of the billiard domain
    Vec2 tangent;         ///< unit, direction of increasing arc length
    double curvature = 0; ///< magnitude, units 1/length
    double arc_s = 0;     ///< arc length from the cusp tip
};

/// Wall with curvature profile kappa(sigma) = kappa0 + kappa1*sigma along
/// arc length sigma, reconstructed by integrating the unit tangent of the
/// tangent-angle primitive tau(sigma) = kappa0*sigma + kappa1*sigma^2/2.
/// Checkpoint nodes are laid down every `node_step`; point queries run a
/// composite Simpson rule from the nearest node at steps <= `fine_step`,
/// which keeps the reconstruction at roundoff accuracy.
struct PerturbedWall {
    double kappa0 = 0;
    double kappa1 = 0;
    double sigma_max = 0; ///< reconstructed extent; queries beyond it error
    struct Node {
        double sigma = 0;
        Vec2 point;
    };
    std::vector<Node> nodes;

    static constexpr double node_step = 1e-2;
    static constexpr double fine_step = 1e-4;
};

/// Horn domain: the region inside a circle of radius r_plus and outside a
/// circle of radius r_minus, the two internally tangent at the cusp tip O.
///
/// Canonical frame: O at the origin, the common tangent line along the x
/// axis, both centers stacked on the positive y axis.  The middle circle
/// (center center_mid, radius r_mid) threads the gap between the walls;
/// experiments run on the x > 0 side of it.  Optional curvature slopes
/// kappa_perturb_* replace a circular wall by a reconstructed arc that
/// osculates it at O.
struct HornGeometry {
    double r_plus = 0;
    double r_minus = 0;
    double r_mid = 0;   ///< (r_plus + r_minus) / 2
    double d = 0;       ///< (r_plus - r_minus) / 2, half-gap between centers
    double lemma_c = 0; ///< d / r_plus, slope of the per-collision momentum gain
    double theta_max = 0;
    double kappa_perturb_plus = 0;
    double kappa_perturb_minus = 0;
    Vec2 center_plus;
    Vec2 center_minus;
    Vec2 center_mid;
    std::optional<PerturbedWall> perturbed_plus;
    std::optional<PerturbedWall> perturbed_minus;

    bool circle_model() const { return !perturbed_plus && !perturbed_minus; }
};

/// Validates radii (0 < r_minus < r_plus), theta_max in (0, pi/2), and for
/// perturbed walls that the curvature keeps its sign over the reconstructed
/// extent.  Throws std::invalid_argument otherwise.
HornGeometry build_horn(double r_plus, double r_minus, double theta_max,
                        double kappa_perturb_plus = 0.0,
                        double kappa_perturb_minus = 0.0);

/// Wall sample at arc distance arc_s from the cusp tip, on the x > 0 side.
/// Circular walls accept arc_s in [0, 2*pi*r_wall]; perturbed walls accept
/// [0, sigma_max].
BoundarySample boundary_point(const HornGeometry& g, Wall wall, double arc_s);

/// Signed polar angle of p about the middle-circle center, measured from
/// the direction toward the cusp tip, counterclockwise positive.  The
/// working side of the horn has theta > 0.  Throws for p == center_mid.
double theta_of(const HornGeometry& g, Vec2 p);

/// Arc length from the cusp tip to p along the named curve.  p must lie on
/// the curve within 1e-9.
double arc_distance_to_cusp(const HornGeometry& g, Curve curve, Vec2 p);

/// Gap between the two walls measured along the middle-circle normal at
/// middle-circle arc length arc_s.  Exact for both models; behaves like
/// (1/r_minus - 1/r_plus)/2 * arc_s^2 near the tip.
double width_at(const HornGeometry& g, double arc_s);

/// Width of the osculating circle model at middle-circle arc length arc_s,
/// clamped into the valid range.  Cheap estimate used for step budgets;
/// equals width_at for the circle model away from the range edges.
double circle_model_width(const HornGeometry& g, double arc_s);

/// Strict interior test.
bool contains(const HornGeometry& g, Vec2 p);

/// Signed distance from p to a wall: positive past the wall (outside the
/// domain through it), negative on the domain side.  Exact for circular
/// walls; nearest-point based for perturbed ones.
double signed_wall_distance(const HornGeometry& g, Wall wall, Vec2 p);

/// Arc parameter of the nearest point on a (perturbed) wall.  For circular
/// walls returns r_wall times the central angle from the tip.
double nearest_arc_on_wall(const HornGeometry& g, Wall wall, Vec2 p);

} // namespace horn
