#include "horn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace horn {

namespace {

constexpr double pi = std::numbers::pi;

double wall_radius(const HornGeometry& g, Wall w) {
    return w == Wall::Outer ? g.r_plus : g.r_minus;
}

Vec2 wall_center(const HornGeometry& g, Wall w) {
    return w == Wall::Outer ? g.center_plus : g.center_minus;
}

const std::optional<PerturbedWall>& perturbed_of(const HornGeometry& g, Wall w) {
    return w == Wall::Outer ? g.perturbed_plus : g.perturbed_minus;
}

double tangent_angle(const PerturbedWall& w, double sigma) {
    return sigma * (w.kappa0 + 0.5 * w.kappa1 * sigma);
}

/// Advance the curve point from (a, pa) to arc parameter b by composite
/// Simpson quadrature of the unit tangent.
Vec2 tangent_integral(const PerturbedWall& w, double a, Vec2 pa, double b) {
    const double len = b - a;
    if (len <= 0.0)
        return pa;
    const int halves = std::max(1, (int)std::ceil(len / (2.0 * PerturbedWall::fine_step)));
    const int n = 2 * halves;
    const double h = len / n;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double tau = tangent_angle(w, a + i * h);
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sx += c * std::cos(tau);
        sy += c * std::sin(tau);
    }
    return {pa.x + h / 3.0 * sx, pa.y + h / 3.0 * sy};
}

PerturbedWall make_perturbed_wall(double kappa0, double kappa1, double sigma_max) {
    PerturbedWall w;
    w.kappa0 = kappa0;
    w.kappa1 = kappa1;
    w.sigma_max = sigma_max;
    const int n_nodes = (int)std::ceil(sigma_max / PerturbedWall::node_step);
    w.nodes.reserve(n_nodes + 1);
    Vec2 p{0.0, 0.0};
    w.nodes.push_back({0.0, p});
    for (int k = 1; k <= n_nodes; ++k) {
        const double s = std::min(k * PerturbedWall::node_step, sigma_max);
        p = tangent_integral(w, w.nodes.back().sigma, w.nodes.back().point, s);
        w.nodes.push_back({s, p});
    }
    return w;
}

Vec2 perturbed_point(const PerturbedWall& w, double sigma) {
    const auto k = std::min((size_t)(sigma / PerturbedWall::node_step), w.nodes.size() - 1);
    return tangent_integral(w, w.nodes[k].sigma, w.nodes[k].point, sigma);
}

Vec2 perturbed_outward_normal(const PerturbedWall& w, Wall wall, double sigma) {
    const double tau = tangent_angle(w, sigma);
    const Vec2 t{std::cos(tau), std::sin(tau)};
    return wall == Wall::Outer ? Vec2{t.y, -t.x} : Vec2{-t.y, t.x};
}

double nearest_sigma(const PerturbedWall& w, Vec2 p) {
    double best = 0.0, best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& node : w.nodes) {
        const double d2 = norm2(p - node.point);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = node.sigma;
        }
    }
    // Newton on f(sigma) = (p - gamma).tangent = 0; f' = -1 + kappa*(p - gamma).perp(tangent)
    double sig = best;
    for (int it = 0; it < 40; ++it) {
        const Vec2 gamma = perturbed_point(w, sig);
        const double tau = tangent_angle(w, sig);
        const Vec2 t{std::cos(tau), std::sin(tau)};
        const Vec2 e = p - gamma;
        const double f = dot(e, t);
        const double fp = -1.0 + (w.kappa0 + w.kappa1 * sig) * dot(e, perp(t));
        if (std::abs(fp) < 1e-12)
            break;
        const double next = std::clamp(sig - f / fp, 0.0, w.sigma_max);
        if (std::abs(next - sig) < 1e-13) {
            sig = next;
            break;
        }
        sig = next;
    }
    return sig;
}

/// Central angle at the wall's own center between the cusp tip and p.
double central_angle_from_tip(const HornGeometry& g, Vec2 center, Vec2 p) {
    (void)g;
    const Vec2 a = -1.0 * center; // direction center -> tip (tip is the origin)
    const Vec2 b = p - center;
    return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

double circle_width(const HornGeometry& g, double theta) {
    const double ds = g.d * std::sin(theta);
    if (!(ds < g.r_minus))
        throw std::domain_error("width_at: normal ray misses the inner wall at this arc_s");
    return std::sqrt(g.r_plus * g.r_plus - ds * ds) -
           std::sqrt(g.r_minus * g.r_minus - ds * ds) - 2.0 * g.d * std::cos(theta);
}

/// First positive root of the signed wall distance along origin + t*dir,
/// found by bracket expansion and bisection.  sd(origin) must be < 0.
double ray_wall_crossing(const HornGeometry& g, Wall wall, Vec2 origin, Vec2 dir, double hint) {
    double lo = 0.0;
    double hi = std::max(hint, 1e-6);
    int guard = 0;
    while (signed_wall_distance(g, wall, origin + hi * dir) < 0.0) {
        lo = hi;
        hi *= 1.6;
        if (++guard > 80)
            throw std::runtime_error("width_at: bracket expansion failed");
    }
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (signed_wall_distance(g, wall, origin + mid * dir) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

const char* to_string(Wall w) {
    return w == Wall::Outer ? "outer" : "inner";
}

HornGeometry build_horn(double r_plus, double r_minus, double theta_max,
                        double kappa_perturb_plus, double kappa_perturb_minus) {
    if (!std::isfinite(r_plus) || !std::isfinite(r_minus) || !std::isfinite(theta_max) ||
        !std::isfinite(kappa_perturb_plus) || !std::isfinite(kappa_perturb_minus))
        throw std::invalid_argument("build_horn: parameters must be finite");
    if (r_minus <= 0.0 || r_plus <= 0.0)
        throw std::invalid_argument("radii must be positive");
    if (r_plus <= r_minus)
        throw std::invalid_argument("r_plus must exceed r_minus");
    if (theta_max <= 0.0 || theta_max >= 0.5 * pi)
        throw std::invalid_argument("theta_max must lie in (0, pi/2)");

    HornGeometry g;
    g.r_plus = r_plus;
    g.r_minus = r_minus;
    g.r_mid = 0.5 * (r_plus + r_minus);
    g.d = 0.5 * (r_plus - r_minus);
    g.lemma_c = g.d / r_plus;
    g.theta_max = theta_max;
    g.kappa_perturb_plus = kappa_perturb_plus;
    g.kappa_perturb_minus = kappa_perturb_minus;
    g.center_plus = {0.0, r_plus};
    g.center_minus = {0.0, r_minus};
    g.center_mid = {0.0, g.r_mid};

    // Reconstructed walls cover the neighborhood with margin so that flights
    // slightly past theta_max can still be resolved.
    const double extent_angle = std::min(1.5 * theta_max + 0.1, 0.45 * pi);
    auto setup = [&](Wall wall, double kappa1) {
        const double r = wall_radius(g, wall);
        const double sigma_max = r * extent_angle;
        if (1.0 / r + kappa1 * sigma_max <= 0.0)
            throw std::invalid_argument(
                "curvature perturbation must keep the wall curvature positive over the neighborhood");
        return make_perturbed_wall(1.0 / r, kappa1, sigma_max);
    };
    if (kappa_perturb_plus != 0.0)
        g.perturbed_plus = setup(Wall::Outer, kappa_perturb_plus);
    if (kappa_perturb_minus != 0.0)
        g.perturbed_minus = setup(Wall::Inner, kappa_perturb_minus);
    return g;
}

BoundarySample boundary_point(const HornGeometry& g, Wall wall, double arc_s) {
    const auto& pw = perturbed_of(g, wall);
    BoundarySample s;
    s.arc_s = arc_s;
    if (pw) {
        if (arc_s < 0.0 || arc_s > pw->sigma_max)
            throw std::domain_error("boundary_point: arc_s out of the reconstructed range");
        const double tau = tangent_angle(*pw, arc_s);
        s.point = perturbed_point(*pw, arc_s);
        s.tangent = {std::cos(tau), std::sin(tau)};
        s.outward_normal = perturbed_outward_normal(*pw, wall, arc_s);
        s.curvature = std::abs(pw->kappa0 + pw->kappa1 * arc_s);
        return s;
    }
    const double r = wall_radius(g, wall);
    if (arc_s < 0.0 || arc_s > 2.0 * pi * r)
        throw std::domain_error("boundary_point: arc_s out of range");
    const double phi = arc_s / r;
    const Vec2 u = unit_from_down(phi);
    s.point = wall_center(g, wall) + r * u;
    s.tangent = perp(u); // (cos phi, sin phi)
    s.outward_normal = wall == Wall::Outer ? u : -1.0 * u;
    s.curvature = 1.0 / r;
    return s;
}

double theta_of(const HornGeometry& g, Vec2 p) {
    const Vec2 b = p - g.center_mid;
    if (norm2(b) == 0.0)
        throw std::invalid_argument("theta_of: point coincides with the middle-circle center");
    return std::atan2(b.x, -b.y);
}

double arc_distance_to_cusp(const HornGeometry& g, Curve curve, Vec2 p) {
    if (curve != Curve::Middle) {
        const Wall wall = curve == Curve::Outer ? Wall::Outer : Wall::Inner;
        const auto& pw = perturbed_of(g, wall);
        if (pw) {
            const double sig = nearest_sigma(*pw, p);
            const Vec2 gamma = perturbed_point(*pw, sig);
            const Vec2 n = perturbed_outward_normal(*pw, wall, sig);
            if (std::abs(dot(p - gamma, n)) > 1e-9)
                throw std::invalid_argument("arc_distance_to_cusp: point is off the named curve");
            return sig;
        }
    }
    const Vec2 center = curve == Curve::Outer   ? g.center_plus
                        : curve == Curve::Inner ? g.center_minus
                                                : g.center_mid;
    const double r = curve == Curve::Outer   ? g.r_plus
                     : curve == Curve::Inner ? g.r_minus
                                             : g.r_mid;
    if (std::abs(norm(p - center) - r) > 1e-9)
        throw std::invalid_argument("arc_distance_to_cusp: point is off the named curve");
    return r * central_angle_from_tip(g, center, p);
}

double width_at(const HornGeometry& g, double arc_s) {
    if (arc_s < 0.0)
        throw std::domain_error("width_at: arc_s must be nonnegative");
    if (arc_s == 0.0)
        return 0.0;
    const double theta = arc_s / g.r_mid;
    if (theta > 0.5 * pi + 1e-12)
        throw std::domain_error("width_at: arc_s out of range");
    if (g.circle_model())
        return circle_width(g, theta);
    const Vec2 u = unit_from_down(theta);
    const Vec2 m = g.center_mid + g.r_mid * u;
    const double w_circle = circle_width(g, theta);
    const double t_out = ray_wall_crossing(g, Wall::Outer, m, u, 0.75 * w_circle);
    const double t_in = ray_wall_crossing(g, Wall::Inner, m, -1.0 * u, 0.75 * w_circle);
    return t_out + t_in;
}

double circle_model_width(const HornGeometry& g, double arc_s) {
    const double theta_cap = std::min(0.5 * pi, std::asin(std::min(1.0, 0.999 * g.r_minus / g.d)));
    const double theta = std::clamp(arc_s / g.r_mid, 0.0, theta_cap);
    return circle_width(g, theta);
}

bool contains(const HornGeometry& g, Vec2 p) {
    return signed_wall_distance(g, Wall::Outer, p) < 0.0 &&
           signed_wall_distance(g, Wall::Inner, p) < 0.0;
}

double signed_wall_distance(const HornGeometry& g, Wall wall, Vec2 p) {
    const auto& pw = perturbed_of(g, wall);
    if (pw) {
        const double sig = nearest_sigma(*pw, p);
        return dot(p - perturbed_point(*pw, sig), perturbed_outward_normal(*pw, wall, sig));
    }
    const double dist = norm(p - wall_center(g, wall));
    return wall == Wall::Outer ? dist - g.r_plus : g.r_minus - dist;
}

double nearest_arc_on_wall(const HornGeometry& g, Wall wall, Vec2 p) {
    const auto& pw = perturbed_of(g, wall);
    if (pw)
        return nearest_sigma(*pw, p);
    return wall_radius(g, wall) * central_angle_from_tip(g, wall_center(g, wall), p);
}

} // namespace horn
