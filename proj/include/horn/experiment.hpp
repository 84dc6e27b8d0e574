#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "horn/dynamics.hpp"

namespace horn {

/// Deterministic uniform draws on [0,1) from the 64-bit Mersenne engine.
/// The top 53 bits are used so results are identical across platforms.
class Uniform01 {
  public:
    explicit Uniform01(std::uint64_t seed) : gen_(seed) {}
    double next() { return double(gen_() >> 11) * 0x1.0p-53; }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next(); }

  private:
    std::mt19937_64 gen_;
};

struct SweepParams {
    std::uint64_t seed = 12345;
    long n_samples = 1000;
    double theta0_min = 0.15; ///< launch angle range on the middle circle
    double theta0_max = 0.3;
    double psi0_min = -0.3; ///< tilt from the cuspward middle-circle tangent
    double psi0_max = 0.3;
};

struct SweepRow {
    long index = 0;
    double theta0 = 0;
    double psi0 = 0;
    Termination termination = Termination::Escaped;
    long n_collisions = 0;
    double min_theta = 0;
    double j_drift = 0; ///< max relative drift of s^2 sqrt(1-s_dot^2) while diving
};

/// Runs n_samples trajectories from randomized middle-circle launches.
/// Draw order per sample is theta0 then psi0, so output is reproducible
/// from the seed alone.  The optional callback sees each full record.
std::vector<SweepRow> run_sweep(
    const HornGeometry& g, const StopConditions& stop, const SweepParams& params,
    const std::function<void(const SweepRow&, const TrajectoryRecord&)>& on_record = nullptr);

/// Max relative deviation of J from j_ref over the cuspward excursion: the
/// events up to the point where s_mid first climbs back above s_entry.
/// Events whose |L_plus| exceeds the middle radius beyond roundoff are
/// skipped (they occur only at the shallow end, where the arc coordinate
/// stops being meaningful).  NaN when j_ref is not positive.
double cuspward_j_drift(const TrajectoryRecord& rec, double j_ref, double s_entry);

} // namespace horn
