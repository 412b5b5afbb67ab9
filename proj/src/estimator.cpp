#include "hopf/estimator.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>

#include "hopf/errors.hpp"
#include "hopf/rng.hpp"

namespace hopf {

const char* method_name(Method m) {
    switch (m) {
        case Method::cartesian: return "cartesian";
        case Method::polar: return "polar";
        case Method::frame: return "frame";
        case Method::linear2d: return "linear2d";
    }
    return "unknown";
}

double z_score(const FtleEstimate& e1, const FtleEstimate& e2) {
    const double spread = std::sqrt(e1.std_error * e1.std_error + e2.std_error * e2.std_error);
    const double gap = std::abs(e1.mean - e2.mean);
    if (spread == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return gap / spread;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HOPF_LYAP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

FtleEstimate combine(const std::vector<FtleSample>& samples, Method method,
                     const SimConfig& cfg) {
    FtleEstimate est;
    est.method = method;
    est.n_batches = static_cast<int>(samples.size());
    est.total_steps =
        static_cast<std::int64_t>(samples.size()) * (cfg.burn_in_steps + cfg.n_steps);
    est.batch_values.reserve(samples.size());
    double sum = 0.0;
    for (const FtleSample& s : samples) {
        est.batch_values.push_back(s.value);
        sum += s.value;
        est.reflections_flagged = est.reflections_flagged || s.reflection_flagged;
        est.mean_r2 += s.mean_r2;
        est.mean_inv_r2 += s.mean_inv_r2;
        est.horizon_per_batch = s.horizon;
        est.dt_effective = s.dt_effective;
    }
    const double n = static_cast<double>(samples.size());
    est.mean = sum / n;
    est.mean_r2 /= n;
    est.mean_inv_r2 /= n;
    double ss = 0.0;
    for (double v : est.batch_values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return est;
}

// Runs one sample per batch index on a small worker pool; exceptions are
// captured per batch and the lowest failing index is reported.
std::vector<FtleSample> run_batches(const std::function<FtleSample(const SimConfig&)>& runner,
                                    const SimConfig& cfg, int n_batches, int threads) {
    if (n_batches < 2) throw DomainError("estimate: n_batches must be >= 2");
    std::vector<FtleSample> samples(n_batches);
    std::vector<std::exception_ptr> failures(n_batches);
    const int workers = std::min(resolve_threads(threads), n_batches);
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_batches) return;
            SimConfig batch_cfg = cfg;
            batch_cfg.seed = rng::derive_stream(cfg.seed, static_cast<std::uint64_t>(i));
            try {
                samples[i] = runner(batch_cfg);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (int i = 0; i < n_batches; ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const NumericalBlowup& e) {
                throw NumericalBlowup("batch " + std::to_string(i) + ": " + e.what());
            }
        }
    }
    return samples;
}

}  // namespace

FtleEstimate estimate_lyapunov(const Params& p, const SimConfig& cfg, Method method,
                               int n_batches, int threads) {
    validate(p);
    validate(cfg);
    auto runner = [&p, method](const SimConfig& c) {
        switch (method) {
            case Method::cartesian: return simulate_cartesian_ftle(p, c);
            case Method::polar: return simulate_polar_ftle(p, c);
            case Method::frame: return simulate_frame_ftle(p, c);
            default: throw DomainError("estimate_lyapunov: method must be a hopf system");
        }
    };
    return combine(run_batches(runner, cfg, n_batches, threads), method, cfg);
}

FtleEstimate estimate_linear2d(const Matrix2& drift, const Matrix2& noise,
                               const SimConfig& cfg, int n_batches, int threads) {
    validate(cfg);
    auto runner = [&drift, &noise](const SimConfig& c) {
        return simulate_linear2d_ftle(drift, noise, c);
    };
    return combine(run_batches(runner, cfg, n_batches, threads), Method::linear2d, cfg);
}

CrossReport cross_validate(const Params& p, const SimConfig& cfg, int n_batches,
                           int threads) {
    CrossReport report;
    report.cartesian = estimate_lyapunov(p, cfg, Method::cartesian, n_batches, threads);
    report.polar = estimate_lyapunov(p, cfg, Method::polar, n_batches, threads);
    report.frame = estimate_lyapunov(p, cfg, Method::frame, n_batches, threads);
    report.z_cartesian_polar = z_score(report.cartesian, report.polar);
    report.z_cartesian_frame = z_score(report.cartesian, report.frame);
    report.z_polar_frame = z_score(report.polar, report.frame);
    report.max_z = std::max({report.z_cartesian_polar, report.z_cartesian_frame,
                             report.z_polar_frame});
    return report;
}

OmegaReport omega_invariance_check(const Params& p, const SimConfig& cfg,
                                   const std::vector<double>& omegas, int n_batches,
                                   int threads) {
    if (omegas.size() < 2) throw DomainError("omega_invariance_check: need >= 2 omegas");
    OmegaReport report;
    report.omegas = omegas;
    for (double w : omegas) {
        Params q = p;
        q.omega = w;
        report.estimates.push_back(
            estimate_lyapunov(q, cfg, Method::cartesian, n_batches, threads));
    }
    for (std::size_t i = 0; i < report.estimates.size(); ++i) {
        for (std::size_t j = i + 1; j < report.estimates.size(); ++j) {
            report.max_z = std::max(report.max_z,
                                    z_score(report.estimates[i], report.estimates[j]));
        }
    }
    return report;
}

}  // namespace hopf
