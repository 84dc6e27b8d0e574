#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "horn/continuum.hpp"
#include "horn/diagnostics.hpp"
#include "horn/dynamics.hpp"
#include "horn/experiment.hpp"
#include "horn/geometry.hpp"
#include "horn/io.hpp"

namespace {

// exit codes: 0 ok, 1 bad config, 2 degenerate termination, 3 budget
// exhausted, 4 momentum-bound violation (lemma-check only)
constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_degenerate = 2;
constexpr int exit_budget = 3;
constexpr int exit_violation = 4;

struct Options {
    double r_plus = 2.0;
    double r_minus = 1.0;
    double theta_max = 0.3;
    double kappa_plus = 0.0;
    double kappa_minus = 0.0;
    std::uint64_t seed = 12345;
    long max_collisions = 1000000;
    std::string out;
    std::string svg;

    double theta0 = 0.25;
    double psi0 = 0.1;
    // explicit start overrides (theta0, psi0) when all four are given
    double x0 = std::nan("");
    double y0 = std::nan("");
    double vx = std::nan("");
    double vy = std::nan("");

    long samples = 1000;
    double relax = 0.9;
    std::vector<double> depths = {0.2, 0.1, 0.05};
    double sdot0 = -0.5;
    double s0 = 0.1;
    double dt = 1e-4;
    double t_end = 0.0; // 0 = integrate one full excursion
};

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid value for config key " + key);
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid value for config key " + key);
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

/// Flat key=value file; '#' starts a comment line.  Flags given on the
/// command line override anything set here.
void apply_config_file(const std::string& path, Options& o) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "r_plus") o.r_plus = parse_double(key, value);
        else if (key == "r_minus") o.r_minus = parse_double(key, value);
        else if (key == "theta_max") o.theta_max = parse_double(key, value);
        else if (key == "kappa_plus") o.kappa_plus = parse_double(key, value);
        else if (key == "kappa_minus") o.kappa_minus = parse_double(key, value);
        else if (key == "seed") o.seed = static_cast<std::uint64_t>(parse_long(key, value));
        else if (key == "max_collisions") o.max_collisions = parse_long(key, value);
        else if (key == "out") o.out = value;
        else if (key == "svg") o.svg = value;
        else if (key == "theta0") o.theta0 = parse_double(key, value);
        else if (key == "psi0") o.psi0 = parse_double(key, value);
        else if (key == "x0") o.x0 = parse_double(key, value);
        else if (key == "y0") o.y0 = parse_double(key, value);
        else if (key == "vx") o.vx = parse_double(key, value);
        else if (key == "vy") o.vy = parse_double(key, value);
        else if (key == "samples") o.samples = parse_long(key, value);
        else if (key == "relax") o.relax = parse_double(key, value);
        else if (key == "sdot0") o.sdot0 = parse_double(key, value);
        else if (key == "s0") o.s0 = parse_double(key, value);
        else if (key == "dt") o.dt = parse_double(key, value);
        else if (key == "t_end") o.t_end = parse_double(key, value);
        else if (key == "depths") {
            std::vector<double> ds;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) ds.push_back(parse_double(key, trim(item)));
            if (ds.empty()) throw std::invalid_argument("config key depths needs values");
            o.depths = ds;
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
}

horn::HornGeometry make_geometry(const Options& o) {
    return horn::build_horn(o.r_plus, o.r_minus, o.theta_max, o.kappa_plus, o.kappa_minus);
}

horn::StopConditions make_stop(const Options& o) {
    horn::StopConditions stop;
    stop.theta_max = o.theta_max;
    stop.max_collisions = o.max_collisions;
    return stop;
}

int exit_for(horn::Termination t) {
    switch (t) {
    case horn::Termination::Escaped: return exit_ok;
    case horn::Termination::MaxCollisions: return exit_budget;
    default: return exit_degenerate;
    }
}

int worst_exit(const std::vector<horn::SweepRow>& rows) {
    int worst = exit_ok;
    for (const auto& r : rows) worst = std::max(worst, exit_for(r.termination));
    return worst;
}

int cmd_simulate(const Options& o) {
    const horn::HornGeometry g = make_geometry(o);
    horn::ParticleState start;
    const bool explicit_start = !std::isnan(o.x0) || !std::isnan(o.y0) ||
                                !std::isnan(o.vx) || !std::isnan(o.vy);
    if (explicit_start) {
        if (std::isnan(o.x0) || std::isnan(o.y0) || std::isnan(o.vx) || std::isnan(o.vy))
            throw std::invalid_argument("explicit start needs all of x0, y0, vx, vy");
        const horn::Vec2 v{o.vx, o.vy};
        if (norm(v) == 0) throw std::invalid_argument("vx, vy must not both be zero");
        start = {{o.x0, o.y0}, normalized(v), 0.0};
    } else {
        start = horn::launch_from_middle_circle(g, o.theta0, o.psi0);
    }

    const horn::TrajectoryRecord rec = horn::simulate(g, start, make_stop(o));
    const std::string out = o.out.empty() ? "trajectory.csv" : o.out;
    horn::write_trajectory_csv(out, rec, o.seed);
    if (!o.svg.empty()) horn::write_trajectory_svg(o.svg, g, rec);

    double min_theta = horn::theta_of(g, start.position);
    for (const auto& ev : rec.events) min_theta = std::min(min_theta, ev.theta);
    std::printf("simulate: %zu collisions, termination=%s, min theta=%.6g, t=%.6g\n",
                rec.events.size(), to_string(rec.termination), min_theta,
                rec.final_state.time);
    std::printf("wrote %s\n", out.c_str());
    return exit_for(rec.termination);
}

horn::SweepParams sweep_params(const Options& o, const horn::HornGeometry& g) {
    horn::SweepParams p;
    p.seed = o.seed;
    p.n_samples = o.samples;
    p.theta0_min = 0.5 * g.theta_max;
    p.theta0_max = g.theta_max;
    p.psi0_min = -0.3;
    p.psi0_max = 0.3;
    return p;
}

int cmd_sweep(const Options& o) {
    const horn::HornGeometry g = make_geometry(o);
    const auto rows = horn::run_sweep(g, make_stop(o), sweep_params(o, g));
    const std::string out = o.out.empty() ? "sweep.csv" : o.out;
    horn::write_sweep_csv(out, rows, o.seed, g);

    long escaped = 0, budget = 0, degenerate = 0, max_n = 0;
    for (const auto& r : rows) {
        max_n = std::max(max_n, r.n_collisions);
        if (r.termination == horn::Termination::Escaped) ++escaped;
        else if (r.termination == horn::Termination::MaxCollisions) ++budget;
        else ++degenerate;
    }
    std::printf("sweep: %zu trajectories, escaped=%ld, budget=%ld, degenerate=%ld, "
                "max collisions=%ld\n",
                rows.size(), escaped, budget, degenerate, max_n);
    std::printf("wrote %s\n", out.c_str());
    return worst_exit(rows);
}

int cmd_lemma_check(const Options& o) {
    if (!(o.relax > 0)) throw std::invalid_argument("relax must be positive");
    const horn::HornGeometry g = make_geometry(o);

    std::vector<horn::MarginRow> margins;
    long violations = 0, checked = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    const auto rows = horn::run_sweep(
        g, make_stop(o), sweep_params(o, g),
        [&](const horn::SweepRow& row, const horn::TrajectoryRecord& rec) {
            const horn::LemmaReport rep = horn::lemma_check(rec, o.relax);
            violations += static_cast<long>(rep.violations.size());
            checked += rep.n_events;
            min_margin = std::min(min_margin, rep.min_margin);
            for (const auto& ev : rec.events) {
                if (ev.theta > rec.geometry.theta_max) continue;
                horn::MarginRow m;
                m.traj = row.index;
                m.event = ev.index;
                m.wall = ev.wall;
                m.arc_s = ev.arc_s;
                m.theta = ev.theta;
                m.v_dot_n = ev.v_dot_n;
                m.delta_L = ev.L_plus - ev.L_minus;
                m.margin = m.delta_L - rep.c_eff * ev.arc_s * ev.v_dot_n;
                margins.push_back(m);
            }
        });

    const std::string out = o.out.empty() ? "margins.csv" : o.out;
    horn::write_margins_csv(out, margins, o.seed, g);
    std::printf("lemma-check: relax=%.6g, events=%ld, min margin=%.6g, violations=%ld\n",
                o.relax, checked, checked ? min_margin : 0.0, violations);
    std::printf("wrote %s\n", out.c_str());
    if (violations > 0) return exit_violation;
    return worst_exit(rows);
}

int cmd_adiabatic(const Options& o) {
    if (!(o.sdot0 > -1 && o.sdot0 < 0))
        throw std::invalid_argument("sdot0 must lie in (-1, 0) for a cuspward dive");
    const horn::HornGeometry g = make_geometry(o);
    const horn::StopConditions stop = make_stop(o);
    const double psi0 = std::acos(-o.sdot0);

    std::vector<horn::AdiabaticRow> rows;
    int worst = exit_ok;
    for (double s0 : o.depths) {
        if (!(s0 > 0)) throw std::invalid_argument("depth must be positive");
        const double theta0 = s0 / g.r_mid;
        if (theta0 > g.theta_max)
            throw std::invalid_argument("depth must lie inside the tip neighborhood");
        const auto start = horn::launch_from_middle_circle(g, theta0, psi0);
        const auto rec = horn::simulate(g, start, stop);
        worst = std::max(worst, exit_for(rec.termination));

        const double j0 = s0 * s0 * std::sqrt(1.0 - o.sdot0 * o.sdot0);
        horn::AdiabaticRow row;
        row.s0 = s0;
        row.j_drift = horn::cuspward_j_drift(rec, j0, s0);
        row.s_min_pred = std::sqrt(j0);
        row.n_collisions = static_cast<long>(rec.events.size());
        double min_theta = theta0;
        for (const auto& ev : rec.events) min_theta = std::min(min_theta, ev.theta);
        row.s_min = g.r_mid * min_theta;
        rows.push_back(row);
        std::printf("adiabatic: s0=%.6g drift=%.6g s_min=%.6g predicted=%.6g (%ld events)\n",
                    row.s0, row.j_drift, row.s_min, row.s_min_pred, row.n_collisions);
    }
    const std::string out = o.out.empty() ? "adiabatic.csv" : o.out;
    horn::write_adiabatic_csv(out, rows, o.seed, g);
    std::printf("wrote %s\n", out.c_str());
    return worst;
}

int cmd_ode(const Options& o) {
    if (!(o.s0 > 0)) throw std::invalid_argument("s0 must be positive");
    if (!(std::abs(o.sdot0) <= 1)) throw std::invalid_argument("sdot0 must lie in [-1, 1]");
    if (!(o.dt > 0)) throw std::invalid_argument("dt must be positive");
    if (o.t_end < 0) throw std::invalid_argument("t_end must be nonnegative");

    const horn::OdeState y0{o.s0, o.sdot0, 0.0};
    const horn::OdeRun run = (o.t_end > 0)
                                 ? horn::integrate(y0, o.dt, o.t_end)
                                 : horn::integrate_excursion(y0, o.dt, o.s0);

    const std::string out = o.out.empty() ? "ode.csv" : o.out;
    horn::write_ode_csv(out, run, o.seed, o.r_plus, o.r_minus);

    const double j0 = horn::invariant(y0);
    double drift = 0, min_s = y0.s;
    for (const auto& y : run.states) {
        min_s = std::min(min_s, y.s);
        if (j0 > 0) drift = std::max(drift, std::abs(horn::invariant(y) - j0) / j0);
    }
    std::printf("ode: %zu states, J0=%.17g, max relative J drift=%.3g, min s=%.17g%s\n",
                run.states.size(), j0, drift, min_s,
                run.hit_floor ? ", stopped at the s floor" : "");
    std::printf("wrote %s\n", out.c_str());
    return exit_ok;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", "flat key=value file; flags override it")
        ->type_name("FILE");
    cmd->add_option("--r-plus", o.r_plus, "outer wall radius");
    cmd->add_option("--r-minus", o.r_minus, "inner wall radius");
    cmd->add_option("--theta-max", o.theta_max, "tip neighborhood half-angle");
    cmd->add_option("--kappa-plus", o.kappa_plus, "outer wall curvature slope");
    cmd->add_option("--kappa-minus", o.kappa_minus, "inner wall curvature slope");
    cmd->add_option("--seed", o.seed, "RNG seed, recorded in outputs");
    cmd->add_option("--max-collisions", o.max_collisions, "collision budget");
    cmd->add_option("--out", o.out, "output CSV path");
}

} // namespace

int main(int argc, char** argv) {
    Options o;

    // --config is applied before regular parsing so flags can override it
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
        if (!path.empty()) {
            try {
                apply_config_file(path, o);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return exit_config;
            }
        }
    }

    CLI::App app{"billiard horn simulator"};
    app.require_subcommand(1);

    CLI::App* sim = app.add_subcommand("simulate", "run one trajectory to CSV/SVG");
    add_common(sim, o);
    sim->add_option("--theta0", o.theta0, "launch angle on the middle circle");
    sim->add_option("--psi0", o.psi0, "tilt from the cuspward tangent");
    sim->add_option("--x0", o.x0, "explicit start x");
    sim->add_option("--y0", o.y0, "explicit start y");
    sim->add_option("--vx", o.vx, "explicit velocity x (normalized)");
    sim->add_option("--vy", o.vy, "explicit velocity y (normalized)");
    sim->add_option("--svg", o.svg, "also write an SVG figure");

    CLI::App* swp = app.add_subcommand("sweep", "randomized launch ensemble to CSV");
    add_common(swp, o);
    swp->add_option("--samples", o.samples, "number of trajectories");

    CLI::App* lem = app.add_subcommand("lemma-check",
                                       "per-collision momentum-gain bound over a sweep");
    add_common(lem, o);
    lem->add_option("--samples", o.samples, "number of trajectories");
    lem->add_option("--relax", o.relax, "slack factor on the bound constant");

    CLI::App* adi = app.add_subcommand("adiabatic", "J drift versus entry depth");
    add_common(adi, o);
    adi->add_option("--depths", o.depths, "entry depths s0")->expected(-1)->delimiter(',');
    adi->add_option("--sdot0", o.sdot0, "entry radial speed (negative)");

    CLI::App* ode = app.add_subcommand("ode", "integrate the continuum cusp equation");
    add_common(ode, o);
    ode->add_option("--s0", o.s0, "initial arc coordinate");
    ode->add_option("--sdot0", o.sdot0, "initial rate, in [-1, 1]");
    ode->add_option("--dt", o.dt, "integration step");
    ode->add_option("--t-end", o.t_end, "end time; 0 runs one full excursion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (swp->parsed()) return cmd_sweep(o);
        if (lem->parsed()) return cmd_lemma_check(o);
        if (adi->parsed()) return cmd_adiabatic(o);
        if (ode->parsed()) return cmd_ode(o);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_degenerate;
    }
    return exit_config;
}
