#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hopf/estimator.hpp"
#include "hopf/sim.hpp"

namespace hopf {

// Stability diagram lives in the (mu, b) half plane at a = sigma = 1.
struct GridSpec {
    double mu_min = 0.0;
    double mu_max = 0.0;
    int mu_steps = 1;
    double b_min = 0.0;
    double b_max = 0.0;
    int b_steps = 1;
};

const GridSpec& validate(const GridSpec& spec);

enum class Certificate { provably_negative, none };

struct DiagramPoint {
    double mu = 0.0;
    double b = 0.0;
    double lambda_hat = 0.0;
    double std_error = 0.0;
    Certificate certificate = Certificate::none;
    double ce_reference = 0.0;  // b - mu sqrt(2 c*) for mu > 0, else NaN
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::int64_t steps = 0;  // post-burn-in steps per batch
    int n_batches = 0;
    bool failed = false;
    std::string error;
};

// One point per cell, row-major by mu then b; per-point seeds derived from
// (cfg.seed, cell index). Failures are recorded in the point, never thrown.
std::vector<DiagramPoint> scan_grid(const GridSpec& spec, const SimConfig& cfg,
                                    int n_batches, int threads = 0);

// CI-gated bisection for lambda(mu,1,b,1) = 0 between b_lo and b_hi.
// Both endpoints must resolve sign (|mean| > 3 stderr) and disagree, else
// BracketError. Ambiguous midpoints double the batch count up to 4 times,
// then the sign of the mean is accepted; AmbiguityError only when the mean
// is exactly zero after the budget.
double find_zero_b(double mu, double b_lo, double b_hi, const SimConfig& cfg,
                   int n_batches, double tol_b, int threads = 0);

// Exact header `mu,b,lambda,stderr,certificate,ce_reference,seed,dt,steps,batches`,
// 17 significant digits, LF endings, rows in scan order.
void write_csv(const std::vector<DiagramPoint>& points, const std::filesystem::path& path);

}  // namespace hopf
