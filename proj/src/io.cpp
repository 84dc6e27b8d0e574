#include "horn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace horn {

namespace {

struct File {
    std::FILE* f = nullptr;
    explicit File(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
        if (!f) throw std::runtime_error("cannot open output file: " + path);
    }
    ~File() {
        if (f) std::fclose(f);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void provenance(std::FILE* f, std::uint64_t seed, double r_plus, double r_minus) {
    std::fprintf(f, "# seed=%llu r_plus=%s r_minus=%s\n",
                 static_cast<unsigned long long>(seed), fmt(r_plus).c_str(),
                 fmt(r_minus).c_str());
}

double event_J(const TrajectoryRecord& rec, const CollisionEvent& ev) {
    const double r = rec.geometry.r_mid;
    if (std::abs(ev.L_plus) > r + 1e-9) return std::numeric_limits<double>::quiet_NaN();
    const double s = r * ev.theta;
    const double u = std::clamp(ev.L_plus / r, -1.0, 1.0);
    return s * s * std::sqrt(1.0 - u * u);
}

} // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          std::uint64_t seed) {
    File out(path);
    provenance(out.f, seed, rec.geometry.r_plus, rec.geometry.r_minus);
    std::fprintf(out.f,
                 "n,t,wall,x,y,s_wall,s_mid,theta,vmx,vmy,vpx,vpy,v_dot_n,"
                 "L_minus,L_plus,delta_L,J\n");
    for (const auto& ev : rec.events) {
        std::fprintf(out.f, "%ld,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s\n",
                     ev.index, fmt(ev.time).c_str(), to_string(ev.wall),
                     fmt(ev.point.x).c_str(), fmt(ev.point.y).c_str(),
                     fmt(ev.arc_s).c_str(), fmt(rec.geometry.r_mid * ev.theta).c_str(),
                     fmt(ev.theta).c_str(), fmt(ev.v_minus.x).c_str(),
                     fmt(ev.v_minus.y).c_str(), fmt(ev.v_plus.x).c_str(),
                     fmt(ev.v_plus.y).c_str(), fmt(ev.v_dot_n).c_str(),
                     fmt(ev.L_minus).c_str(), fmt(ev.L_plus).c_str(),
                     fmt(ev.L_plus - ev.L_minus).c_str(), fmt(event_J(rec, ev)).c_str());
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     std::uint64_t seed, const HornGeometry& g) {
    File out(path);
    provenance(out.f, seed, g.r_plus, g.r_minus);
    std::fprintf(out.f, "i,theta0,psi0,termination,n_collisions,min_theta,j_drift\n");
    for (const auto& r : rows) {
        std::fprintf(out.f, "%ld,%s,%s,%s,%ld,%s,%s\n", r.index, fmt(r.theta0).c_str(),
                     fmt(r.psi0).c_str(), to_string(r.termination), r.n_collisions,
                     fmt(r.min_theta).c_str(), fmt(r.j_drift).c_str());
    }
}

void write_margins_csv(const std::string& path, const std::vector<MarginRow>& rows,
                       std::uint64_t seed, const HornGeometry& g) {
    File out(path);
    provenance(out.f, seed, g.r_plus, g.r_minus);
    std::fprintf(out.f, "traj,event,wall,arc_s,theta,v_dot_n,delta_L,margin\n");
    for (const auto& r : rows) {
        std::fprintf(out.f, "%ld,%ld,%s,%s,%s,%s,%s,%s\n", r.traj, r.event,
                     to_string(r.wall), fmt(r.arc_s).c_str(), fmt(r.theta).c_str(),
                     fmt(r.v_dot_n).c_str(), fmt(r.delta_L).c_str(),
                     fmt(r.margin).c_str());
    }
}

void write_adiabatic_csv(const std::string& path, const std::vector<AdiabaticRow>& rows,
                         std::uint64_t seed, const HornGeometry& g) {
    File out(path);
    provenance(out.f, seed, g.r_plus, g.r_minus);
    std::fprintf(out.f, "s0,j_drift,s_min,s_min_pred,n_collisions\n");
    for (const auto& r : rows) {
        std::fprintf(out.f, "%s,%s,%s,%s,%ld\n", fmt(r.s0).c_str(),
                     fmt(r.j_drift).c_str(), fmt(r.s_min).c_str(),
                     fmt(r.s_min_pred).c_str(), r.n_collisions);
    }
}

void write_ode_csv(const std::string& path, const OdeRun& run, std::uint64_t seed,
                   double r_plus, double r_minus) {
    File out(path);
    provenance(out.f, seed, r_plus, r_minus);
    std::fprintf(out.f, "t,s,s_dot,J\n");
    for (const auto& y : run.states) {
        std::fprintf(out.f, "%s,%s,%s,%s\n", fmt(y.t).c_str(), fmt(y.s).c_str(),
                     fmt(y.s_dot).c_str(), fmt(invariant(y)).c_str());
    }
}

namespace {

std::string svg_coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// SVG y grows downward; the scene is emitted with y negated so the tip sits
// at the bottom as in the plane.
std::string points_attr(const std::vector<Vec2>& pts) {
    std::string s;
    for (const auto& p : pts) {
        if (!s.empty()) s += ' ';
        s += svg_coord(p.x);
        s += ',';
        s += svg_coord(-p.y);
    }
    return s;
}

} // namespace

void write_trajectory_svg(const std::string& path, const HornGeometry& g,
                          const TrajectoryRecord& rec) {
    const int n_arc = 257;
    auto wall_polyline = [&](Wall w) {
        std::vector<Vec2> pts;
        const double radius = (w == Wall::Outer) ? g.r_plus : g.r_minus;
        const Vec2 center = (w == Wall::Outer) ? g.center_plus : g.center_minus;
        const auto& pw = (w == Wall::Outer) ? g.perturbed_plus : g.perturbed_minus;
        if (pw) {
            for (int i = 0; i < n_arc; ++i)
                pts.push_back(boundary_point(g, w, pw->sigma_max * i / (n_arc - 1)).point);
        } else {
            const double ext =
                std::min(1.5 * g.theta_max + 0.1, 0.45 * std::numbers::pi);
            for (int i = 0; i < n_arc; ++i) {
                const double phi = -ext + 2 * ext * i / (n_arc - 1);
                pts.push_back(center + radius * Vec2{std::sin(phi), -std::cos(phi)});
            }
        }
        return pts;
    };

    const std::vector<Vec2> outer = wall_polyline(Wall::Outer);
    const std::vector<Vec2> inner = wall_polyline(Wall::Inner);

    std::vector<Vec2> middle;
    {
        const double ext = std::min(1.5 * g.theta_max + 0.1, 0.45 * std::numbers::pi);
        for (int i = 0; i < n_arc; ++i) {
            const double phi = -ext + 2 * ext * i / (n_arc - 1);
            middle.push_back(g.center_mid + g.r_mid * Vec2{std::sin(phi), -std::cos(phi)});
        }
    }

    std::vector<Vec2> traj;
    traj.push_back(rec.initial.position);
    for (const auto& ev : rec.events) traj.push_back(ev.point);
    traj.push_back(rec.final_state.position);

    double min_x = outer[0].x, max_x = outer[0].x;
    double min_y = outer[0].y, max_y = outer[0].y;
    auto expand = [&](const std::vector<Vec2>& pts) {
        for (const auto& p : pts) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
    };
    expand(outer);
    expand(inner);
    expand(traj);
    const double pad = 0.05 * std::max(max_x - min_x, max_y - min_y);
    min_x -= pad;
    max_x += pad;
    min_y -= pad;
    max_y += pad;
    const double span = std::max(max_x - min_x, max_y - min_y);
    const double stroke = 0.003 * span;
    const double marker_r = 0.004 * span;

    File out(path);
    std::fprintf(out.f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%s %s %s %s\">\n",
                 svg_coord(min_x).c_str(), svg_coord(-max_y).c_str(),
                 svg_coord(max_x - min_x).c_str(), svg_coord(max_y - min_y).c_str());
    std::fprintf(out.f, "<g fill=\"none\">\n");
    std::fprintf(out.f,
                 "<polyline id=\"outer-wall\" stroke=\"black\" stroke-width=\"%s\" "
                 "points=\"%s\"/>\n",
                 svg_coord(stroke).c_str(), points_attr(outer).c_str());
    std::fprintf(out.f,
                 "<polyline id=\"inner-wall\" stroke=\"black\" stroke-width=\"%s\" "
                 "points=\"%s\"/>\n",
                 svg_coord(stroke).c_str(), points_attr(inner).c_str());
    std::fprintf(out.f,
                 "<polyline id=\"middle-circle\" stroke=\"#999999\" "
                 "stroke-width=\"%s\" stroke-dasharray=\"%s\" points=\"%s\"/>\n",
                 svg_coord(0.5 * stroke).c_str(), svg_coord(4 * stroke).c_str(),
                 points_attr(middle).c_str());
    std::fprintf(out.f,
                 "<polyline id=\"trajectory\" stroke=\"#1f6fb2\" stroke-width=\"%s\" "
                 "points=\"%s\"/>\n",
                 svg_coord(0.7 * stroke).c_str(), points_attr(traj).c_str());

    // marker stride keeps huge records viewable
    const std::size_t n_ev = rec.events.size();
    const std::size_t stride = n_ev > 800 ? n_ev / 800 + 1 : 1;
    for (std::size_t i = 0; i < n_ev; i += stride) {
        const Vec2& p = rec.events[i].point;
        std::fprintf(out.f, "<circle cx=\"%s\" cy=\"%s\" r=\"%s\" fill=\"#c0392b\"/>\n",
                     svg_coord(p.x).c_str(), svg_coord(-p.y).c_str(),
                     svg_coord(marker_r).c_str());
    }
    std::fprintf(out.f, "</g>\n</svg>\n");
}

} // namespace horn
