#pragma once

#include <cstdint>

#include "hopf/errors.hpp"
#include "hopf/params.hpp"

namespace hopf {

struct SimConfig {
    double dt = 1e-3;
    std::int64_t n_steps = 2'000'000;  // post burn-in; dt * n_steps = horizon T
    std::int64_t burn_in_steps = 200'000;
    std::uint64_t seed = 0;
    std::int64_t renorm_interval = 64;
    double r_floor = 1e-4;
};

// dt=1e-3, T=2000 per batch, 10% burn-in.
SimConfig desk_config();

const SimConfig& validate(const SimConfig& cfg);

struct Matrix2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
};

struct FtleSample {
    double value = 0.0;    // log growth per unit time
    double horizon = 0.0;  // dt_effective * n_steps
    std::uint64_t seed_used = 0;
    double dt_effective = 0.0;
    std::int64_t reflections = 0;     // r_floor hits (polar/frame only)
    bool reflection_flagged = false;  // reflections > 0.1% of steps
    double mean_r2 = 0.0;             // time average of r^2 over the window
    double mean_inv_r2 = 0.0;         // time average of r^-2 (polar/frame)
};

// min(cfg.dt, 0.05 / (omega_term + |b| M + 3 a M)), M = max(1, mu/a + sigma).
// The omega term applies only to the cartesian equations; the polar and frame
// systems do not contain omega, and including it there would break the exact
// omega-independence of their paths.
double effective_dt(const Params& p, const SimConfig& cfg, bool include_omega);

FtleSample simulate_cartesian_ftle(const Params& p, const SimConfig& cfg);
FtleSample simulate_polar_ftle(const Params& p, const SimConfig& cfg);
FtleSample simulate_frame_ftle(const Params& p, const SimConfig& cfg);
// dY = drift Y dt + noise Y dW, scalar Wiener process, no step guard.
FtleSample simulate_linear2d_ftle(const Matrix2& drift, const Matrix2& noise,
                                  const SimConfig& cfg);

}  // namespace hopf
