#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horn/continuum.hpp"
#include "horn/dynamics.hpp"
#include "horn/experiment.hpp"

namespace horn {

/// Every CSV starts with `# seed=<seed> r_plus=<..> r_minus=<..>` so a file
/// is reproducible on its own.  Numbers are written with 17 significant
/// digits (lossless for doubles).

/// Header: n,t,wall,x,y,s_wall,s_mid,theta,vmx,vmy,vpx,vpy,v_dot_n,L_minus,L_plus,delta_L,J
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          std::uint64_t seed);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     std::uint64_t seed, const HornGeometry& g);

/// One row per collision of a momentum-bound check.
struct MarginRow {
    long traj = 0;
    long event = 0;
    Wall wall = Wall::Outer;
    double arc_s = 0;
    double theta = 0;
    double v_dot_n = 0;
    double delta_L = 0;
    double margin = 0;
};

void write_margins_csv(const std::string& path, const std::vector<MarginRow>& rows,
                       std::uint64_t seed, const HornGeometry& g);

struct AdiabaticRow {
    double s0 = 0;
    double j_drift = 0;
    double s_min = 0;
    double s_min_pred = 0; ///< sqrt(J0), the turning depth the invariant forces
    long n_collisions = 0;
};

void write_adiabatic_csv(const std::string& path, const std::vector<AdiabaticRow>& rows,
                         std::uint64_t seed, const HornGeometry& g);

void write_ode_csv(const std::string& path, const OdeRun& run, std::uint64_t seed,
                   double r_plus, double r_minus);

/// Static figure: both walls, the middle circle, the trajectory polyline
/// and small collision markers, in a viewBox fitted to the scene.
void write_trajectory_svg(const std::string& path, const HornGeometry& g,
                          const TrajectoryRecord& rec);

} // namespace horn
