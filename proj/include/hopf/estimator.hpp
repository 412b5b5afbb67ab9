#pragma once

#include <cstdint>
#include <vector>

#include "hopf/params.hpp"
#include "hopf/sim.hpp"

namespace hopf {

enum class Method { cartesian, polar, frame, linear2d };

const char* method_name(Method m);

struct FtleEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample sd of batch values / sqrt(n_batches)
    int n_batches = 0;
    Method method = Method::cartesian;
    std::int64_t total_steps = 0;  // including burn-in, all batches
    bool reflections_flagged = false;
    double horizon_per_batch = 0.0;
    double dt_effective = 0.0;
    double mean_r2 = 0.0;      // batch-averaged diagnostics
    double mean_inv_r2 = 0.0;  // polar/frame only
    std::vector<double> batch_values;
};

// |m1 - m2| / sqrt(s1^2 + s2^2); 0 when both spreads vanish and means agree.
double z_score(const FtleEstimate& e1, const FtleEstimate& e2);

// Threads actually used when `requested` is 0: HOPF_LYAP_THREADS if set,
// otherwise hardware concurrency.
int resolve_threads(int requested);

// n_batches independent trajectories, seeds derived from (cfg.seed, index),
// combined in index order. Deterministic for fixed inputs at any thread count.
FtleEstimate estimate_lyapunov(const Params& p, const SimConfig& cfg, Method method,
                               int n_batches, int threads = 0);

FtleEstimate estimate_linear2d(const Matrix2& drift, const Matrix2& noise,
                               const SimConfig& cfg, int n_batches, int threads = 0);

struct CrossReport {
    FtleEstimate cartesian;
    FtleEstimate polar;
    FtleEstimate frame;
    double z_cartesian_polar = 0.0;
    double z_cartesian_frame = 0.0;
    double z_polar_frame = 0.0;
    double max_z = 0.0;
};

CrossReport cross_validate(const Params& p, const SimConfig& cfg, int n_batches,
                           int threads = 0);

struct OmegaReport {
    std::vector<double> omegas;
    std::vector<FtleEstimate> estimates;
    double max_z = 0.0;
};

OmegaReport omega_invariance_check(const Params& p, const SimConfig& cfg,
                                   const std::vector<double>& omegas, int n_batches,
                                   int threads = 0);

}  // namespace hopf
