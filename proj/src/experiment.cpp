#include "horn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace horn {

std::vector<SweepRow> run_sweep(
    const HornGeometry& g, const StopConditions& stop, const SweepParams& params,
    const std::function<void(const SweepRow&, const TrajectoryRecord&)>& on_record) {
    if (params.n_samples < 0) throw std::invalid_argument("n_samples must be nonnegative");
    if (!(params.theta0_min > 0) || !(params.theta0_max >= params.theta0_min))
        throw std::invalid_argument("theta0 range must be positive and ordered");
    if (!(params.psi0_max >= params.psi0_min))
        throw std::invalid_argument("psi0 range must be ordered");

    Uniform01 rng(params.seed);
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(params.n_samples));
    for (long i = 0; i < params.n_samples; ++i) {
        const double theta0 = rng.next_in(params.theta0_min, params.theta0_max);
        const double psi0 = rng.next_in(params.psi0_min, params.psi0_max);
        const ParticleState start = launch_from_middle_circle(g, theta0, psi0);
        const TrajectoryRecord rec = simulate(g, start, stop);

        SweepRow row;
        row.index = i;
        row.theta0 = theta0;
        row.psi0 = psi0;
        row.termination = rec.termination;
        row.n_collisions = static_cast<long>(rec.events.size());
        row.min_theta = theta0;
        for (const auto& ev : rec.events) row.min_theta = std::min(row.min_theta, ev.theta);

        const double s_entry = g.r_mid * theta0;
        const double j_ref = s_entry * s_entry * std::abs(std::sin(psi0));
        row.j_drift = cuspward_j_drift(rec, j_ref, s_entry);

        if (on_record) on_record(row, rec);
        rows.push_back(row);
    }
    return rows;
}

double cuspward_j_drift(const TrajectoryRecord& rec, double j_ref, double s_entry) {
    if (!(j_ref > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double r = rec.geometry.r_mid;
    double worst = 0;
    bool any = false;
    for (const auto& ev : rec.events) {
        const double s = r * ev.theta;
        if (s > s_entry) {
            if (any) break; // climbed back out, excursion over
            continue;
        }
        if (std::abs(ev.L_plus) > r + 1e-9) continue;
        const double u = std::clamp(ev.L_plus / r, -1.0, 1.0);
        const double J = s * s * std::sqrt(1.0 - u * u);
        worst = std::max(worst, std::abs(J - j_ref) / j_ref);
        any = true;
    }
    return any ? worst : std::numeric_limits<double>::quiet_NaN();
}

} // namespace horn
