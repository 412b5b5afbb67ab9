#include "hopf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hopf/rng.hpp"

namespace hopf {

SimConfig desk_config() { return SimConfig{}; }

const SimConfig& validate(const SimConfig& cfg) {
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0) throw DomainError("config: dt must be positive");
    if (cfg.n_steps <= 0) throw DomainError("config: n_steps must be positive");
    if (cfg.burn_in_steps < 0) throw DomainError("config: burn_in_steps must be >= 0");
    if (cfg.renorm_interval <= 0) throw DomainError("config: renorm_interval must be positive");
    if (!std::isfinite(cfg.r_floor) || cfg.r_floor <= 0.0) {
        throw DomainError("config: r_floor must be positive");
    }
    return cfg;
}

double effective_dt(const Params& p, const SimConfig& cfg, bool include_omega) {
    const double m = std::max(1.0, p.mu / p.a + p.sigma);
    const double rate = (include_omega ? std::abs(p.omega) : 0.0) +
                        std::abs(p.b) * m + 3.0 * p.a * m;
    return std::min(cfg.dt, 0.05 / rate);
}

namespace {

[[noreturn]] void blowup(const char* where, std::int64_t step) {
    throw NumericalBlowup(std::string(where) + ": state non-finite at step " +
                          std::to_string(step));
}

double initial_radius(const Params& p) {
    return std::sqrt(std::max(p.mu, 0.0) / p.a) + p.sigma;
}

}  // namespace

FtleSample simulate_cartesian_ftle(const Params& p, const SimConfig& cfg) {
    validate(p);
    validate(cfg);
    const double dt = effective_dt(p, cfg, true);
    const double sq = std::sqrt(dt);
    rng::Stream stream(cfg.seed);

    double x1 = initial_radius(p), x2 = 0.0;
    double u1 = 1.0, u2 = 0.0;
    double log_sum = 0.0;
    double sum_r2 = 0.0;
    const std::int64_t total = cfg.burn_in_steps + cfg.n_steps;
    std::int64_t since_renorm = 0;

    for (std::int64_t step = 0; step < total; ++step) {
        if (step == cfg.burn_in_steps) {
            const double n = std::sqrt(u1 * u1 + u2 * u2);
            u1 /= n;
            u2 /= n;
            log_sum = 0.0;
            since_renorm = 0;
        }
        const double r2 = x1 * x1 + x2 * x2;
        if (step >= cfg.burn_in_steps) sum_r2 += r2;

        const double g1 = stream.next_gaussian();
        const double g2 = stream.next_gaussian();
        // dX = ([mu,-omega;omega,mu] + r^2 [-a,-b;b,-a]) X dt + sigma dW
        const double dx1 = (p.mu * x1 - p.omega * x2 + r2 * (-p.a * x1 - p.b * x2)) * dt +
                           p.sigma * sq * g1;
        const double dx2 = (p.omega * x1 + p.mu * x2 + r2 * (p.b * x1 - p.a * x2)) * dt +
                           p.sigma * sq * g2;
        // dU = ([mu,-omega;omega,mu] + r^2 B) U dt + 2 <X,U> B X dt, B = [-a,-b;b,-a]
        const double xu = x1 * u1 + x2 * u2;
        const double bx1 = -p.a * x1 - p.b * x2;
        const double bx2 = p.b * x1 - p.a * x2;
        const double du1 = (p.mu * u1 - p.omega * u2 + r2 * (-p.a * u1 - p.b * u2) +
                            2.0 * xu * bx1) * dt;
        const double du2 = (p.omega * u1 + p.mu * u2 + r2 * (p.b * u1 - p.a * u2) +
                            2.0 * xu * bx2) * dt;
        x1 += dx1;
        x2 += dx2;
        u1 += du1;
        u2 += du2;

        if (++since_renorm == cfg.renorm_interval) {
            since_renorm = 0;
            const double n = std::sqrt(u1 * u1 + u2 * u2);
            if (!std::isfinite(n) || n == 0.0 || !std::isfinite(x1) || !std::isfinite(x2)) {
                blowup("cartesian", step);
            }
            if (step >= cfg.burn_in_steps) log_sum += std::log(n);
            u1 /= n;
            u2 /= n;
        }
    }
    const double n = std::sqrt(u1 * u1 + u2 * u2);
    if (!std::isfinite(n) || n == 0.0) blowup("cartesian", total);
    log_sum += std::log(n);

    FtleSample out;
    out.dt_effective = dt;
    out.horizon = dt * static_cast<double>(cfg.n_steps);
    out.value = log_sum / out.horizon;
    out.seed_used = cfg.seed;
    out.mean_r2 = sum_r2 / static_cast<double>(cfg.n_steps);
    if (!std::isfinite(out.value)) blowup("cartesian", total);
    return out;
}

FtleSample simulate_polar_ftle(const Params& p, const SimConfig& cfg) {
    validate(p);
    validate(cfg);
    const double dt = effective_dt(p, cfg, false);
    const double sq = std::sqrt(dt);
    rng::Stream stream(cfg.seed);

    double r = initial_radius(p);
    double psi = 1.57079632679489661923;  // pi/2
    double q_sum = 0.0;
    double sum_r2 = 0.0, sum_inv_r2 = 0.0;
    std::int64_t reflections = 0;
    const std::int64_t total = cfg.burn_in_steps + cfg.n_steps;

    for (std::int64_t step = 0; step < total; ++step) {
        const bool live = step >= cfg.burn_in_steps;
        if (live) {
            q_sum += q_integrand(r, psi, p) * dt;
            sum_r2 += r * r;
            sum_inv_r2 += 1.0 / (r * r);
        }
        const double g1 = stream.next_gaussian();
        const double g2 = stream.next_gaussian();
        const double r2 = r * r;
        // dr = (mu r - a r^3 + sigma^2/(2r)) dt + sigma dW^r
        const double dr = (p.mu * r - p.a * r2 * r + p.sigma * p.sigma / (2.0 * r)) * dt +
                          p.sigma * sq * g1;
        // dpsi = 2 r^2 cos(psi)(b cos(psi) + a sin(psi)) dt - (sigma/r) dW^phi
        const double c = std::cos(psi);
        const double s = std::sin(psi);
        const double dpsi = 2.0 * r2 * c * (p.b * c + p.a * s) * dt - (p.sigma / r) * sq * g2;
        r += dr;
        psi = wrap_psi(psi + dpsi);
        if (r < cfg.r_floor) {
            r = 2.0 * cfg.r_floor - r;
            ++reflections;
        }
        if ((step & 63) == 63 && !std::isfinite(r)) blowup("polar", step);
    }
    if (!std::isfinite(r) || !std::isfinite(q_sum)) blowup("polar", total);

    FtleSample out;
    out.dt_effective = dt;
    out.horizon = dt * static_cast<double>(cfg.n_steps);
    out.value = q_sum / out.horizon;
    out.seed_used = cfg.seed;
    out.reflections = reflections;
    out.reflection_flagged = reflections > total / 1000;
    out.mean_r2 = sum_r2 / static_cast<double>(cfg.n_steps);
    out.mean_inv_r2 = sum_inv_r2 / static_cast<double>(cfg.n_steps);
    if (!std::isfinite(out.value)) blowup("polar", total);
    return out;
}

FtleSample simulate_frame_ftle(const Params& p, const SimConfig& cfg) {
    validate(p);
    validate(cfg);
    const double dt = effective_dt(p, cfg, false);
    const double sq = std::sqrt(dt);
    rng::Stream stream(cfg.seed);

    double r = initial_radius(p);
    double v1 = 0.0, v2 = 1.0;
    double log_sum = 0.0;
    double sum_r2 = 0.0, sum_inv_r2 = 0.0;
    std::int64_t reflections = 0;
    const std::int64_t total = cfg.burn_in_steps + cfg.n_steps;
    std::int64_t since_renorm = 0;

    for (std::int64_t step = 0; step < total; ++step) {
        if (step == cfg.burn_in_steps) {
            const double n = std::sqrt(v1 * v1 + v2 * v2);
            v1 /= n;
            v2 /= n;
            log_sum = 0.0;
            since_renorm = 0;
        }
        if (step >= cfg.burn_in_steps) {
            sum_r2 += r * r;
            sum_inv_r2 += 1.0 / (r * r);
        }
        const double g1 = stream.next_gaussian();
        const double g2 = stream.next_gaussian();
        const double r2 = r * r;
        const double ir2 = 1.0 / r2;
        // dV = [[mu-3ar^2-sigma^2/2r^2, 0],[2br^2, mu-ar^2-sigma^2/2r^2]] V dt
        //      + (sigma/r) [[0,1],[-1,0]] V dW^phi
        const double d11 = p.mu - 3.0 * p.a * r2 - 0.5 * p.sigma * p.sigma * ir2;
        const double d22 = p.mu - p.a * r2 - 0.5 * p.sigma * p.sigma * ir2;
        const double noise = (p.sigma / r) * sq * g2;
        const double dv1 = d11 * v1 * dt + noise * v2;
        const double dv2 = (2.0 * p.b * r2 * v1 + d22 * v2) * dt - noise * v1;
        const double dr = (p.mu * r - p.a * r2 * r + p.sigma * p.sigma / (2.0 * r)) * dt +
                          p.sigma * sq * g1;
        r += dr;
        v1 += dv1;
        v2 += dv2;
        if (r < cfg.r_floor) {
            r = 2.0 * cfg.r_floor - r;
            ++reflections;
        }

        if (++since_renorm == cfg.renorm_interval) {
            since_renorm = 0;
            const double n = std::sqrt(v1 * v1 + v2 * v2);
            if (!std::isfinite(n) || n == 0.0 || !std::isfinite(r)) blowup("frame", step);
            if (step >= cfg.burn_in_steps) log_sum += std::log(n);
            v1 /= n;
            v2 /= n;
        }
    }
    const double n = std::sqrt(v1 * v1 + v2 * v2);
    if (!std::isfinite(n) || n == 0.0) blowup("frame", total);
    log_sum += std::log(n);

    FtleSample out;
    out.dt_effective = dt;
    out.horizon = dt * static_cast<double>(cfg.n_steps);
    out.value = log_sum / out.horizon;
    out.seed_used = cfg.seed;
    out.reflections = reflections;
    out.reflection_flagged = reflections > total / 1000;
    out.mean_r2 = sum_r2 / static_cast<double>(cfg.n_steps);
    out.mean_inv_r2 = sum_inv_r2 / static_cast<double>(cfg.n_steps);
    if (!std::isfinite(out.value)) blowup("frame", total);
    return out;
}

FtleSample simulate_linear2d_ftle(const Matrix2& drift, const Matrix2& noise,
                                  const SimConfig& cfg) {
    validate(cfg);
    const double dt = cfg.dt;
    const double sq = std::sqrt(dt);
    rng::Stream stream(cfg.seed);

    double y1 = 1.0, y2 = 0.0;
    double log_sum = 0.0;
    const std::int64_t total = cfg.burn_in_steps + cfg.n_steps;
    std::int64_t since_renorm = 0;

    for (std::int64_t step = 0; step < total; ++step) {
        if (step == cfg.burn_in_steps) {
            const double n = std::sqrt(y1 * y1 + y2 * y2);
            y1 /= n;
            y2 /= n;
            log_sum = 0.0;
            since_renorm = 0;
        }
        const double dw = sq * stream.next_gaussian();
        const double ny1 = y1 + (drift.a11 * y1 + drift.a12 * y2) * dt +
                           (noise.a11 * y1 + noise.a12 * y2) * dw;
        const double ny2 = y2 + (drift.a21 * y1 + drift.a22 * y2) * dt +
                           (noise.a21 * y1 + noise.a22 * y2) * dw;
        y1 = ny1;
        y2 = ny2;

        if (++since_renorm == cfg.renorm_interval) {
            since_renorm = 0;
            const double n = std::sqrt(y1 * y1 + y2 * y2);
            if (!std::isfinite(n) || n == 0.0) blowup("linear2d", step);
            if (step >= cfg.burn_in_steps) log_sum += std::log(n);
            y1 /= n;
            y2 /= n;
        }
    }
    const double n = std::sqrt(y1 * y1 + y2 * y2);
    if (!std::isfinite(n) || n == 0.0) blowup("linear2d", total);
    log_sum += std::log(n);

    FtleSample out;
    out.dt_effective = dt;
    out.horizon = dt * static_cast<double>(cfg.n_steps);
    out.value = log_sum / out.horizon;
    out.seed_used = cfg.seed;
    if (!std::isfinite(out.value)) blowup("linear2d", total);
    return out;
}

}  // namespace hopf
