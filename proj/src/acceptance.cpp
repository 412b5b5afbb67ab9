#include "hopf/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "hopf/analytic.hpp"
#include "hopf/diagram.hpp"
#include "hopf/errors.hpp"
#include "hopf/estimator.hpp"
#include "hopf/params.hpp"
#include "hopf/rng.hpp"
#include "hopf/sim.hpp"

namespace hopf::acceptance {

namespace {

// Reference value of pi / (2^{1/3} 3^{1/6} Gamma(1/3)^2).
constexpr double kGamma0 = 0.28930825983423926;

std::string num(double v) {
    char b[48];
    std::snprintf(b, sizeof(b), "%.9g", v);
    return b;
}

std::uint64_t salt(std::uint64_t seed, std::uint64_t k) {
    return rng::derive_stream(seed, 1000 + k);
}

SimConfig cfg_horizon(double dt, double horizon, std::uint64_t seed) {
    SimConfig c;
    c.dt = dt;
    c.n_steps = static_cast<std::int64_t>(std::llround(horizon / dt));
    c.burn_in_steps = c.n_steps / 10;
    c.seed = seed;
    return c;
}

Params make_params(double mu, double omega, double a, double b, double sigma) {
    Params p;
    p.mu = mu;
    p.omega = omega;
    p.a = a;
    p.b = b;
    p.sigma = sigma;
    return p;
}

CheckResult guarded(const std::string& id, const std::string& name,
                    const std::function<CheckResult()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return CheckResult{id, name, false, std::string("exception: ") + e.what()};
    }
}

CheckResult check_constants(std::uint64_t, int) {
    const double g = gamma0();
    const double cs = c_star();
    const bool g_ok = std::abs(g - kGamma0) <= 1e-5;
    const bool c_ok = cs >= 3.52 && cs <= 3.56;
    return CheckResult{"C1", "constants", g_ok && c_ok,
                       "gamma0=" + num(g) + " delta=" + num(g - kGamma0) +
                           " tol=1e-05; c_star=" + num(cs) + " in [3.52,3.56]=" +
                           (c_ok ? "yes" : "no")};
}

CheckResult check_gamma0_sim(std::uint64_t seed, int threads) {
    const Matrix2 drift{0.0, 0.0, 1.0, 0.0};
    const Matrix2 noise{0.0, 1.0, 0.0, 0.0};
    const SimConfig cfg = cfg_horizon(1e-3, 5000.0, salt(seed, 2));
    const FtleEstimate est = estimate_linear2d(drift, noise, cfg, 8, threads);
    const double tol = std::max(0.01, 3.0 * est.std_error);
    const double err = std::abs(est.mean - 0.28933);
    return CheckResult{"C2", "gamma0 by simulation", err <= tol,
                       "mean=" + num(est.mean) + " stderr=" + num(est.std_error) +
                           " err=" + num(err) + " tol=" + num(tol)};
}

CheckResult check_psi(std::uint64_t seed, int threads) {
    const double p1 = psi_big(1.0);
    const double pc = psi_big(c_star());
    const double p10 = psi_big(10.0);
    const bool signs = p1 < 0.0 && std::abs(pc) <= 1e-6 && p10 > 0.0;

    const double zeta = 2.0;
    const Matrix2 drift{-1.0, 0.0, std::cbrt(zeta), 0.0};
    const Matrix2 noise{0.0, std::pow(zeta, 1.0 / 6.0), 0.0, 0.0};
    const SimConfig cfg = cfg_horizon(1e-3, 5000.0, salt(seed, 3));
    const FtleEstimate est = estimate_linear2d(drift, noise, cfg, 8, threads);
    const double target = psi_big(zeta);
    const double tol = std::max(0.02, 3.0 * est.std_error);
    const double err = std::abs(est.mean - target);
    return CheckResult{"C3", "psi validation", signs && err <= tol,
                       "psi(1)=" + num(p1) + " psi(c*)=" + num(pc) + " psi(10)=" + num(p10) +
                           "; yb_mean=" + num(est.mean) + " target=" + num(target) +
                           " err=" + num(err) + " tol=" + num(tol)};
}

CheckResult check_analytic_oracles(std::uint64_t, int) {
    const double mus[] = {-2.0, 0.0, 2.0};
    const double as[] = {0.5, 1.0, 2.0};
    const double sigmas[] = {0.5, 1.0, 2.0};
    double worst_rel = 0.0;
    double worst_mass = 0.0;
    double worst_dom = -1e300;  // max of (variance - bound); must stay <= tiny
    for (double mu : mus) {
        for (double a : as) {
            for (double sigma : sigmas) {
                const DensityModel model = make_density(mu, a, sigma);
                const double m2q = moment(model, 2.0);
                const double m2c = moment_r2_closed(model);
                worst_rel = std::max(worst_rel, std::abs(m2q - m2c) / std::abs(m2c));
                worst_mass = std::max(worst_mass, std::abs(moment(model, 0.0) - 1.0));
                if (mu > 0.0) {
                    const double mbar = mu / a;
                    const double var =
                        moment(model, 4.0) - 2.0 * mbar * m2q + mbar * mbar;
                    const double bound = 2.0 * sigma * sigma / a;
                    worst_dom = std::max(worst_dom, var - bound);
                }
            }
        }
    }
    const bool ok = worst_rel <= 1e-8 && worst_mass <= 1e-10 && worst_dom <= 1e-10;
    return CheckResult{"C4", "analytic oracle pair", ok,
                       "worst_moment_rel_err=" + num(worst_rel) +
                           " worst_mass_err=" + num(worst_mass) +
                           " worst_domination_excess=" + num(worst_dom)};
}

CheckResult check_small_sigma(std::uint64_t seed, int threads) {
    std::string detail;
    bool ok = true;
    int k = 0;
    for (double b : {0.0, 1.0}) {
        const Params p = make_params(1.0, 0.0, 1.0, b, 0.2);
        SimConfig cfg = desk_config();
        cfg.seed = salt(seed, 50 + k++);
        const FtleEstimate est = estimate_lyapunov(p, cfg, Method::cartesian, 16, threads);
        const double pred = predict_small_sigma(p);
        const double tol = std::max(0.012, 3.0 * est.std_error);
        const double err = std::abs(est.mean - pred);
        ok = ok && err <= tol;
        detail += "b=" + num(b) + " mean=" + num(est.mean) + " pred=" + num(pred) +
                  " err=" + num(err) + " tol=" + num(tol) + "; ";
    }
    const Params p = make_params(-1.0, 0.0, 1.0, 0.0, 0.1);
    SimConfig cfg = desk_config();
    cfg.seed = salt(seed, 50 + k);
    const FtleEstimate est = estimate_lyapunov(p, cfg, Method::cartesian, 16, threads);
    const double err = std::abs(est.mean + 1.0);
    ok = ok && err <= 0.05;
    detail += "mu=-1 mean=" + num(est.mean) + " err=" + num(err) + " tol=0.05";
    return CheckResult{"C5", "small-sigma regime", ok, detail};
}

CheckResult check_certificates(std::uint64_t seed, int threads) {
    rng::Stream draw(salt(seed, 6));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * draw.next_unit(); };
    int negative = 0;
    double worst_upper = -1e300;
    bool all_bounded = true;
    for (int i = 0; i < 20; ++i) {
        const double mu = uniform(-3.0, 3.0);
        const double a = uniform(0.5, 2.0);
        const double sigma = uniform(0.5, 2.0);
        const double z = mu / (sigma * std::sqrt(2.0 * a));
        const double b = 0.9 * a * jhat(z) * draw.next_unit();
        const Params p = make_params(mu, 0.0, a, b, sigma);
        if (!negativity_certificate(p)) {
            return CheckResult{"C6", "negativity certificates", false,
                               "sampler produced an uncertified point"};
        }
        SimConfig cfg = cfg_horizon(1e-3, 1500.0, salt(seed, 600 + i));
        const FtleEstimate est = estimate_lyapunov(p, cfg, Method::cartesian, 8, threads);
        const double upper = est.mean + 4.0 * est.std_error;
        worst_upper = std::max(worst_upper, upper);
        all_bounded = all_bounded && upper < 0.05;
        if (est.mean < 0.0) ++negative;
    }
    const bool ok = all_bounded && negative >= 19;
    return CheckResult{"C6", "negativity certificates", ok,
                       "negative=" + std::to_string(negative) + "/20 worst_mean_plus_4se=" +
                           num(worst_upper) + " limit=0.05"};
}

CheckResult check_large_b(std::uint64_t seed, int threads) {
    const Params p = make_params(0.0, 0.0, 1.0, 2000.0, 1.0);
    SimConfig cfg = desk_config();
    cfg.seed = salt(seed, 7);
    const FtleEstimate est = estimate_lyapunov(p, cfg, Method::cartesian, 8, threads);
    const double scaled = est.mean / std::pow(2.0 * p.b * p.sigma, 2.0 / 3.0);
    const double target = gamma0() * moment(make_density(0.0, 1.0, 1.0), 2.0 / 3.0);
    const double err = std::abs(scaled - target);
    const double tol = 0.15 * target;
    return CheckResult{"C7", "large-b asymptote", err <= tol,
                       "scaled_mean=" + num(scaled) + " target=" + num(target) +
                           " err=" + num(err) + " tol=" + num(tol) +
                           " dt_eff=" + num(est.dt_effective)};
}

CheckResult check_ce(std::uint64_t seed, int threads) {
    const Params p40 = make_params(1.0, 0.0, 1.0, 40.0, 0.05);
    SimConfig cfg = desk_config();
    cfg.seed = salt(seed, 8);
    const FtleEstimate e40 = estimate_lyapunov(p40, cfg, Method::cartesian, 16, threads);
    const double target = 2.0 * psi_big(2.0);
    const double tol = std::max(0.1 * std::abs(target), 3.0 * e40.std_error);
    const double err = std::abs(e40.mean - target);

    const Params p80 = make_params(1.0, 0.0, 1.0, 80.0, 0.05);
    SimConfig cfg80 = desk_config();
    cfg80.seed = salt(seed, 80);
    const FtleEstimate e80 = estimate_lyapunov(p80, cfg80, Method::cartesian, 16, threads);
    const bool positive = e80.mean > 0.0 && e80.mean > 3.0 * e80.std_error;

    return CheckResult{"C8", "ce regime", err <= tol && positive,
                       "zeta2_mean=" + num(e40.mean) + " target=" + num(target) +
                           " err=" + num(err) + " tol=" + num(tol) +
                           "; zeta8_mean=" + num(e80.mean) + " stderr=" + num(e80.std_error)};
}

CheckResult check_diagram_anchors(std::uint64_t seed, int threads) {
    struct Anchor {
        double mu, b_lo, b_hi, tol_b, lo, hi;
    };
    const Anchor anchors[] = {
        {0.0, 6.0, 12.0, 0.5, 8.5, 9.7},
        {2.0, 4.0, 9.0, 0.6, 5.7, 7.1},
        {4.0, 9.0, 16.0, 0.8, 10.8, 13.2},
    };
    std::string detail;
    bool ok = true;
    int k = 0;
    for (const Anchor& a : anchors) {
        SimConfig cfg = cfg_horizon(1e-3, 1000.0, salt(seed, 900 + k++));
        const double root = find_zero_b(a.mu, a.b_lo, a.b_hi, cfg, 8, a.tol_b, threads);
        const bool in_range = root >= a.lo && root <= a.hi;
        ok = ok && in_range;
        detail += "mu=" + num(a.mu) + " root=" + num(root) + " want=[" + num(a.lo) + "," +
                  num(a.hi) + "]; ";
    }
    if (!detail.empty()) detail.pop_back(), detail.pop_back();
    return CheckResult{"C9", "stability-diagram anchors", ok, detail};
}

CheckResult check_symmetry_scaling(std::uint64_t seed, int threads) {
    rng::Stream draw(salt(seed, 10));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * draw.next_unit(); };
    double worst_omega_z = 0.0, worst_reflect_z = 0.0, worst_scale_z = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double mu = uniform(-1.5, 1.5);
        const double a = uniform(0.5, 2.0);
        const double b = uniform(0.5, 3.0);
        const double sigma = uniform(0.5, 1.5);
        const Params p = make_params(mu, 0.0, a, b, sigma);
        SimConfig cfg = cfg_horizon(5e-4, 500.0, salt(seed, 100 + i));

        const OmegaReport omega_rep = omega_invariance_check(p, cfg, {0.0, 5.0}, 8, threads);
        worst_omega_z = std::max(worst_omega_z, omega_rep.max_z);

        const FtleEstimate plus = estimate_lyapunov(p, cfg, Method::cartesian, 8, threads);
        Params p_neg = p;
        p_neg.b = -b;
        SimConfig cfg_neg = cfg;
        cfg_neg.seed = rng::derive_stream(cfg.seed, 1);
        const FtleEstimate minus =
            estimate_lyapunov(p_neg, cfg_neg, Method::cartesian, 8, threads);
        worst_reflect_z = std::max(worst_reflect_z, z_score(plus, minus));

        const CanonicalForm canon = canonicalize(p);
        const Params p_canon = make_params(canon.mu_hat, 0.0, 1.0, canon.b_hat, 1.0);
        SimConfig cfg_canon = cfg;
        cfg_canon.seed = rng::derive_stream(cfg.seed, 2);
        const FtleEstimate scaled =
            estimate_lyapunov(p_canon, cfg_canon, Method::cartesian, 8, threads);
        const double k = canon.multiplier;
        const double gap = std::abs(plus.mean - k * scaled.mean);
        const double spread = std::sqrt(plus.std_error * plus.std_error +
                                        k * k * scaled.std_error * scaled.std_error);
        worst_scale_z = std::max(worst_scale_z, spread > 0.0 ? gap / spread : 0.0);
    }
    const bool ok = worst_omega_z <= 4.0 && worst_reflect_z <= 4.0 && worst_scale_z <= 4.0;
    return CheckResult{"C10", "symmetry and scaling", ok,
                       "worst_omega_z=" + num(worst_omega_z) + " worst_reflection_z=" +
                           num(worst_reflect_z) + " worst_scaling_z=" + num(worst_scale_z) +
                           " limit=4"};
}

CheckResult check_cross_method(std::uint64_t seed, int threads) {
    rng::Stream draw(salt(seed, 11));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * draw.next_unit(); };
    double worst_z = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double mu = uniform(-1.0, 1.5);
        const double a = uniform(0.5, 1.5);
        const double b = uniform(-2.0, 2.0);
        const double sigma = uniform(0.5, 1.5);
        const Params p = make_params(mu, 0.0, a, b, sigma);
        SimConfig cfg = cfg_horizon(5e-4, 500.0, salt(seed, 200 + i));
        const CrossReport rep = cross_validate(p, cfg, 8, threads);
        worst_z = std::max(worst_z, rep.max_z);
    }
    return CheckResult{"C11", "cross-method agreement", worst_z <= 4.0,
                       "worst_pairwise_z=" + num(worst_z) + " limit=4"};
}

CheckResult check_cli_determinism(std::uint64_t seed, int threads,
                                  const std::string& cli_path) {
    if (cli_path.empty()) {
        return CheckResult{"C12", "verify determinism", false,
                           "cli binary path not provided"};
    }
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    const fs::path f1 = dir / ("hopf_verify_rep1_" + std::to_string(seed) + ".json");
    const fs::path f2 = dir / ("hopf_verify_rep2_" + std::to_string(seed) + ".json");
    auto run_once = [&](const fs::path& out) {
        const std::string cmd = "\"" + cli_path + "\" verify --suite quick --seed " +
                                std::to_string(seed) + " --threads " +
                                std::to_string(threads) + " --out \"" + out.string() +
                                "\" >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const int rc1 = run_once(f1);
    const int rc2 = run_once(f2);
    std::ifstream in1(f1, std::ios::binary), in2(f2, std::ios::binary);
    if (!in1 || !in2) {
        return CheckResult{"C12", "verify determinism", false,
                           "verify run produced no output file"};
    }
    std::stringstream s1, s2;
    s1 << in1.rdbuf();
    s2 << in2.rdbuf();
    const bool identical = !s1.str().empty() && s1.str() == s2.str();
    const bool same_rc = rc1 == rc2;
    std::error_code ec;
    fs::remove(f1, ec);
    fs::remove(f2, ec);
    return CheckResult{"C12", "verify determinism", identical && same_rc,
                       std::string("byte_identical=") + (identical ? "yes" : "no") +
                           " bytes=" + std::to_string(s1.str().size()) +
                           " exit_codes_equal=" + (same_rc ? "yes" : "no")};
}

}  // namespace

std::vector<CheckResult> run_quick(std::uint64_t seed, int threads) {
    std::vector<CheckResult> out;
    out.push_back(guarded("C1", "constants", [&] { return check_constants(seed, threads); }));
    out.push_back(
        guarded("C2", "gamma0 by simulation", [&] { return check_gamma0_sim(seed, threads); }));
    out.push_back(guarded("C3", "psi validation", [&] { return check_psi(seed, threads); }));
    out.push_back(guarded("C4", "analytic oracle pair",
                          [&] { return check_analytic_oracles(seed, threads); }));
    out.push_back(
        guarded("C5", "small-sigma regime", [&] { return check_small_sigma(seed, threads); }));
    return out;
}

std::vector<CheckResult> run_full(std::uint64_t seed, int threads,
                                  const std::string& cli_path) {
    std::vector<CheckResult> out = run_quick(seed, threads);
    out.push_back(guarded("C6", "negativity certificates",
                          [&] { return check_certificates(seed, threads); }));
    out.push_back(
        guarded("C7", "large-b asymptote", [&] { return check_large_b(seed, threads); }));
    out.push_back(guarded("C8", "ce regime", [&] { return check_ce(seed, threads); }));
    out.push_back(guarded("C9", "stability-diagram anchors",
                          [&] { return check_diagram_anchors(seed, threads); }));
    out.push_back(guarded("C10", "symmetry and scaling",
                          [&] { return check_symmetry_scaling(seed, threads); }));
    out.push_back(guarded("C11", "cross-method agreement",
                          [&] { return check_cross_method(seed, threads); }));
    out.push_back(guarded("C12", "verify determinism",
                          [&] { return check_cli_determinism(seed, threads, cli_path); }));
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

std::string format_line(const CheckResult& r) {
    return std::string(r.passed ? "[PASS] " : "[FAIL] ") + r.id + " " + r.name + ": " +
           r.detail;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char b[8];
                    std::snprintf(b, sizeof(b), "\\u%04x", c);
                    out += b;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

std::string to_json(const std::vector<CheckResult>& results) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const CheckResult& r = results[i];
        out += "  {\"id\": \"" + json_escape(r.id) + "\", \"name\": \"" + json_escape(r.name) +
               "\", \"passed\": " + (r.passed ? "true" : "false") + ", \"detail\": \"" +
               json_escape(r.detail) + "\"}";
        if (i + 1 < results.size()) out += ",";
        out += "\n";
    }
    out += "]\n";
    return out;
}

}  // namespace hopf::acceptance
