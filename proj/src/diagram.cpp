#include "hopf/diagram.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hopf/analytic.hpp"
#include "hopf/errors.hpp"
#include "hopf/rng.hpp"

namespace hopf {

const GridSpec& validate(const GridSpec& spec) {
    if (!std::isfinite(spec.mu_min) || !std::isfinite(spec.mu_max) ||
        !std::isfinite(spec.b_min) || !std::isfinite(spec.b_max)) {
        throw DomainError("grid: bounds must be finite");
    }
    if (spec.mu_min > spec.mu_max) throw DomainError("grid: mu_min must be <= mu_max");
    if (spec.b_min < 0.0 || spec.b_min > spec.b_max) {
        throw DomainError("grid: need 0 <= b_min <= b_max");
    }
    if (spec.mu_steps < 1 || spec.b_steps < 1) throw DomainError("grid: steps must be >= 1");
    return spec;
}

namespace {

double grid_value(double lo, double hi, int steps, int i) {
    if (steps == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

Params diagram_params(double mu, double b) {
    Params p;
    p.mu = mu;
    p.omega = 0.0;
    p.a = 1.0;
    p.b = b;
    p.sigma = 1.0;
    return p;
}

double ce_reference_for(double mu, double b) {
    if (mu > 0.0) return b - mu * std::sqrt(2.0 * c_star());
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<DiagramPoint> scan_grid(const GridSpec& spec, const SimConfig& cfg,
                                    int n_batches, int threads) {
    validate(spec);
    validate(cfg);
    std::vector<DiagramPoint> points;
    points.reserve(static_cast<std::size_t>(spec.mu_steps) * spec.b_steps);
    for (int i = 0; i < spec.mu_steps; ++i) {
        for (int j = 0; j < spec.b_steps; ++j) {
            const std::uint64_t cell =
                static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(spec.b_steps) + j;
            DiagramPoint pt;
            pt.mu = grid_value(spec.mu_min, spec.mu_max, spec.mu_steps, i);
            pt.b = grid_value(spec.b_min, spec.b_max, spec.b_steps, j);
            pt.seed = rng::derive_stream(cfg.seed, cell);
            pt.n_batches = n_batches;
            pt.steps = cfg.n_steps;
            const Params p = diagram_params(pt.mu, pt.b);
            pt.certificate = negativity_certificate(p) ? Certificate::provably_negative
                                                       : Certificate::none;
            pt.ce_reference = ce_reference_for(pt.mu, pt.b);
            SimConfig cell_cfg = cfg;
            cell_cfg.seed = pt.seed;
            try {
                const FtleEstimate est =
                    estimate_lyapunov(p, cell_cfg, Method::cartesian, n_batches, threads);
                pt.lambda_hat = est.mean;
                pt.std_error = est.std_error;
                pt.dt = est.dt_effective;
            } catch (const std::exception& e) {
                pt.failed = true;
                pt.error = e.what();
                pt.lambda_hat = std::numeric_limits<double>::quiet_NaN();
                pt.std_error = std::numeric_limits<double>::quiet_NaN();
                pt.dt = effective_dt(p, cfg, true);
            }
            points.push_back(std::move(pt));
        }
    }
    return points;
}

namespace {

struct SignedEstimate {
    double mean;
    double std_error;
    bool resolved;  // |mean| > 3 stderr
};

SignedEstimate zero_eval(double mu, double b, const SimConfig& cfg, int n_batches,
                         int threads, std::uint64_t master, std::uint64_t* counter) {
    SimConfig eval_cfg = cfg;
    eval_cfg.seed = rng::derive_stream(master, (*counter)++);
    const FtleEstimate est = estimate_lyapunov(diagram_params(mu, b), eval_cfg,
                                               Method::cartesian, n_batches, threads);
    return SignedEstimate{est.mean, est.std_error,
                          std::abs(est.mean) > 3.0 * est.std_error};
}

}  // namespace

double find_zero_b(double mu, double b_lo, double b_hi, const SimConfig& cfg,
                   int n_batches, double tol_b, int threads) {
    validate(cfg);
    if (!(b_lo < b_hi)) throw DomainError("find_zero_b: need b_lo < b_hi");
    if (!(tol_b > 0.0)) throw DomainError("find_zero_b: tol_b must be positive");
    std::uint64_t counter = 0;
    const SignedEstimate at_lo = zero_eval(mu, b_lo, cfg, n_batches, threads, cfg.seed, &counter);
    const SignedEstimate at_hi = zero_eval(mu, b_hi, cfg, n_batches, threads, cfg.seed, &counter);
    if (!at_lo.resolved || !at_hi.resolved) {
        throw BracketError("find_zero_b: endpoint sign unresolved (|mean| <= 3 stderr)");
    }
    if ((at_lo.mean < 0.0) == (at_hi.mean < 0.0)) {
        throw BracketError("find_zero_b: no sign change across [b_lo, b_hi]");
    }
    const bool lo_negative = at_lo.mean < 0.0;
    double lo = b_lo;
    double hi = b_hi;
    while (hi - lo > tol_b) {
        const double mid = 0.5 * (lo + hi);
        int batches = n_batches;
        SignedEstimate est = zero_eval(mu, mid, cfg, batches, threads, cfg.seed, &counter);
        for (int doubling = 0; doubling < 4 && !est.resolved; ++doubling) {
            batches *= 2;
            est = zero_eval(mu, mid, cfg, batches, threads, cfg.seed, &counter);
        }
        if (est.mean == 0.0) {
            throw AmbiguityError("find_zero_b: sign unresolved at b=" + std::to_string(mid));
        }
        if ((est.mean < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void write_csv(const std::vector<DiagramPoint>& points, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    out << "mu,b,lambda,stderr,certificate,ce_reference,seed,dt,steps,batches\n";
    char buf[512];
    for (const DiagramPoint& pt : points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%s,%.17g,%llu,%.17g,%lld,%d\n",
                      pt.mu, pt.b, pt.lambda_hat, pt.std_error,
                      pt.certificate == Certificate::provably_negative ? "provably_negative"
                                                                       : "none",
                      pt.ce_reference, static_cast<unsigned long long>(pt.seed), pt.dt,
                      static_cast<long long>(pt.steps), pt.n_batches);
        out << buf;
    }
    out.flush();
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

}  // namespace hopf
