#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopf/acceptance.hpp"
#include "hopf/analytic.hpp"
#include "hopf/diagram.hpp"
#include "hopf/errors.hpp"
#include "hopf/estimator.hpp"
#include "hopf/params.hpp"
#include "hopf/sim.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

// Flags shared by every simulating subcommand. burn_in < 0 means 10% of steps.
struct SimFlags {
    double dt = 1e-3;
    std::int64_t steps = 2'000'000;
    std::int64_t burn_in = -1;
    int batches = 16;
    std::uint64_t seed = 12345;
    int threads = 0;
    std::int64_t renorm = 64;
    double r_floor = 1e-4;

    void attach(CLI::App* cmd, bool with_batches = true) {
        cmd->add_option("--dt", dt, "integrator time step");
        cmd->add_option("--steps", steps, "post-burn-in steps per batch");
        cmd->add_option("--burn-in", burn_in, "burn-in steps (default: steps/10)");
        if (with_batches) cmd->add_option("--batches", batches, "independent batches");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--threads", threads, "worker threads (0 = HOPF_LYAP_THREADS or all cores)");
        cmd->add_option("--renorm-interval", renorm, "steps between tangent renormalizations");
        cmd->add_option("--r-floor", r_floor, "radial reflection barrier");
    }

    hopf::SimConfig to_config() const {
        hopf::SimConfig c;
        c.dt = dt;
        c.n_steps = steps;
        c.burn_in_steps = burn_in >= 0 ? burn_in : steps / 10;
        c.seed = seed;
        c.renorm_interval = renorm;
        c.r_floor = r_floor;
        return c;
    }

    void echo(json& j) const {
        j["dt"] = dt;
        j["steps"] = steps;
        j["burn_in"] = burn_in >= 0 ? burn_in : steps / 10;
        j["batches"] = batches;
        j["seed"] = seed;
        j["threads"] = threads;
        j["renorm_interval"] = renorm;
        j["r_floor"] = r_floor;
    }
};

void write_manifest(const fs::path& out_path, const std::string& command, const json& params,
                    std::uint64_t seed, double duration_seconds) {
    json m;
    m["command"] = command;
    m["parameters"] = params;
    m["master_seed"] = seed;
    m["tool_version"] = kVersion;
    m["duration_seconds"] = duration_seconds;
    std::ofstream f(out_path.string() + ".manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

hopf::Method parse_method(const std::string& name) {
    if (name == "cartesian") return hopf::Method::cartesian;
    if (name == "polar") return hopf::Method::polar;
    if (name == "frame") return hopf::Method::frame;
    throw hopf::DomainError("--method must be cartesian, polar, frame, or all");
}

void fill_estimate(json& j, const std::string& prefix, const hopf::FtleEstimate& est) {
    j[prefix + "mean"] = est.mean;
    j[prefix + "stderr"] = est.std_error;
    j[prefix + "n_batches"] = est.n_batches;
    j[prefix + "total_steps"] = est.total_steps;
    j[prefix + "reflections_flagged"] = est.reflections_flagged;
    j[prefix + "dt_effective"] = est.dt_effective;
    j[prefix + "horizon_per_batch"] = est.horizon_per_batch;
}

// --config PATH is applied before CLI11 sees the command line: each config key
// becomes a trailing --flag unless the flag was given explicitly, so explicit
// flags always win and CLI11 still validates everything.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw hopf::DomainError("--config requires a path");
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
        } else {
            ++i;
        }
    }
    if (config_path.empty()) return args;
    std::ifstream in(config_path);
    if (!in) throw hopf::DomainError("--config: cannot open " + config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw hopf::DomainError("--config: invalid JSON in " + config_path + ": " + e.what());
    }
    if (!cfg.is_object()) throw hopf::DomainError("--config: top level must be an object");
    for (const auto& [key, value] : cfg.items()) {
        std::string flag = "--";
        for (char c : key) flag += (c == '_') ? '-' : c;
        bool given = false;
        for (const std::string& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                given = true;
                break;
            }
        }
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_string()) {
            args.push_back(flag);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back(flag);
            args.push_back(value.dump());
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Top Lyapunov exponent of the additively noised Hopf normal form"};
    app.require_subcommand(1);
    app.footer("Every subcommand also accepts --config PATH (JSON object of flag values;\n"
               "explicit flags take precedence).");

    std::function<int()> action;
    const std::string self_path = argc > 0 ? argv[0] : "";

    // lyapunov
    auto* lyap = app.add_subcommand("lyapunov", "Monte Carlo estimate of lambda");
    {
        auto mu = std::make_shared<double>(0.0);
        auto omega = std::make_shared<double>(0.0);
        auto a = std::make_shared<double>(1.0);
        auto b = std::make_shared<double>(0.0);
        auto sigma = std::make_shared<double>(1.0);
        auto method = std::make_shared<std::string>("cartesian");
        auto flags = std::make_shared<SimFlags>();
        lyap->add_option("--mu", *mu, "linear growth rate")->required();
        lyap->add_option("--omega", *omega, "rotation rate");
        lyap->add_option("--a", *a, "radial contraction (> 0)");
        lyap->add_option("--b", *b, "shear");
        lyap->add_option("--sigma", *sigma, "noise intensity (> 0)");
        lyap->add_option("--method", *method, "cartesian|polar|frame|all");
        flags->attach(lyap);
        lyap->callback([=, &action] {
            action = [=] {
                hopf::Params p;
                p.mu = *mu;
                p.omega = *omega;
                p.a = *a;
                p.b = *b;
                p.sigma = *sigma;
                const hopf::SimConfig cfg = flags->to_config();
                json j;
                j["mu"] = p.mu;
                j["omega"] = p.omega;
                j["a"] = p.a;
                j["b"] = p.b;
                j["sigma"] = p.sigma;
                flags->echo(j);
                if (*method == "all") {
                    const hopf::CrossReport rep =
                        hopf::cross_validate(p, cfg, flags->batches, flags->threads);
                    fill_estimate(j, "cartesian_", rep.cartesian);
                    fill_estimate(j, "polar_", rep.polar);
                    fill_estimate(j, "frame_", rep.frame);
                    j["z_cartesian_polar"] = rep.z_cartesian_polar;
                    j["z_cartesian_frame"] = rep.z_cartesian_frame;
                    j["z_polar_frame"] = rep.z_polar_frame;
                    j["max_z"] = rep.max_z;
                } else {
                    const hopf::FtleEstimate est = hopf::estimate_lyapunov(
                        p, cfg, parse_method(*method), flags->batches, flags->threads);
                    j["method"] = hopf::method_name(est.method);
                    fill_estimate(j, "", est);
                }
                emit(j);
                return 0;
            };
        });
    }

    // density
    auto* dens = app.add_subcommand("density", "Tabulate the stationary radial density");
    {
        auto mu = std::make_shared<double>(0.0);
        auto a = std::make_shared<double>(1.0);
        auto sigma = std::make_shared<double>(1.0);
        auto r_max = std::make_shared<double>(0.0);
        auto points = std::make_shared<int>(512);
        auto out = std::make_shared<std::string>();
        auto seed = std::make_shared<std::uint64_t>(12345);
        dens->add_option("--mu", *mu, "linear growth rate")->required();
        dens->add_option("--a", *a, "radial contraction (> 0)");
        dens->add_option("--sigma", *sigma, "noise intensity (> 0)");
        dens->add_option("--r-max", *r_max, "upper end of the r grid")->required();
        dens->add_option("--points", *points, "grid points");
        dens->add_option("--out", *out, "output CSV path")->required();
        dens->add_option("--seed", *seed, "echoed in the manifest");
        dens->callback([=, &action] {
            action = [=] {
                if (*points < 2) throw hopf::DomainError("--points must be >= 2");
                if (!(*r_max > 0.0)) throw hopf::DomainError("--r-max must be positive");
                const auto start = std::chrono::steady_clock::now();
                const hopf::DensityModel model = hopf::make_density(*mu, *a, *sigma);
                std::ofstream f(*out, std::ios::binary);
                if (!f) throw std::runtime_error("density: cannot open " + *out);
                f << "r,rho\n";
                char buf[80];
                for (int i = 0; i < *points; ++i) {
                    const double r = *r_max * static_cast<double>(i + 1) /
                                     static_cast<double>(*points);
                    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", r, hopf::rho(model, r));
                    f << buf;
                }
                f.flush();
                if (!f) throw std::runtime_error("density: write failed for " + *out);
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
                json params;
                params["mu"] = *mu;
                params["a"] = *a;
                params["sigma"] = *sigma;
                params["r_max"] = *r_max;
                params["points"] = *points;
                params["out"] = *out;
                write_manifest(*out, "density", params, *seed, secs);
                json j;
                j["out"] = *out;
                j["points"] = *points;
                j["mu"] = *mu;
                j["a"] = *a;
                j["sigma"] = *sigma;
                j["r_max"] = *r_max;
                j["seed"] = *seed;
                emit(j);
                return 0;
            };
        });
    }

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Rigorous negativity threshold and J value");
    {
        auto mu = std::make_shared<double>(0.0);
        auto a = std::make_shared<double>(1.0);
        auto sigma = std::make_shared<double>(1.0);
        auto b = std::make_shared<double>(std::nan(""));
        auto seed = std::make_shared<std::uint64_t>(12345);
        bounds->add_option("--mu", *mu, "linear growth rate")->required();
        bounds->add_option("--a", *a, "radial contraction (> 0)");
        bounds->add_option("--sigma", *sigma, "noise intensity (> 0)");
        bounds->add_option("--b", *b, "shear to classify (default: the threshold itself)");
        bounds->add_option("--seed", *seed, "echoed");
        bounds->callback([=, &action] {
            action = [=] {
                hopf::Params p;
                p.mu = *mu;
                p.a = *a;
                p.sigma = *sigma;
                p.b = 0.0;
                hopf::validate(p);
                const double z = *mu / (*sigma * std::sqrt(2.0 * *a));
                const double threshold = *a * hopf::jhat(z);
                const double b_eval = std::isnan(*b) ? threshold : *b;
                p.b = b_eval;
                json j;
                j["mu"] = *mu;
                j["a"] = *a;
                j["sigma"] = *sigma;
                j["b"] = b_eval;
                j["z"] = z;
                j["jhat_threshold_b"] = threshold;
                j["j_value_at_b"] = hopf::bound_J(z, b_eval / *a);
                j["certificate"] = hopf::negativity_certificate(p);
                j["seed"] = *seed;
                emit(j);
                return 0;
            };
        });
    }

    // psi
    auto* psi = app.add_subcommand("psi", "Evaluate the twist-limit exponent Psi");
    {
        auto zeta = std::make_shared<double>(0.0);
        auto scan = std::make_shared<std::vector<double>>();
        auto seed = std::make_shared<std::uint64_t>(12345);
        auto* zopt = psi->add_option("--zeta", *zeta, "single evaluation point (> 0)");
        auto* sopt = psi->add_option("--scan", *scan, "ZMIN ZMAX N")->expected(3);
        zopt->excludes(sopt);
        psi->add_option("--seed", *seed, "echoed");
        psi->callback([=, &action] {
            const bool have_zeta = zopt->count() > 0;
            const bool have_scan = sopt->count() > 0;
            action = [=] {
                if (!have_zeta && !have_scan) {
                    throw hopf::DomainError("psi: provide --zeta or --scan");
                }
                json j;
                if (have_zeta) {
                    j["zeta"] = *zeta;
                    j["psi"] = hopf::psi_big(*zeta);
                } else {
                    const double lo = (*scan)[0];
                    const double hi = (*scan)[1];
                    const int n = static_cast<int>((*scan)[2]);
                    if (n < 2) throw hopf::DomainError("--scan: N must be >= 2");
                    if (!(lo > 0.0) || !(hi > lo)) {
                        throw hopf::DomainError("--scan: need 0 < ZMIN < ZMAX");
                    }
                    std::vector<double> zs, ps;
                    for (int i = 0; i < n; ++i) {
                        const double z = lo + (hi - lo) * i / static_cast<double>(n - 1);
                        zs.push_back(z);
                        ps.push_back(hopf::psi_big(z));
                    }
                    j["zeta_min"] = lo;
                    j["zeta_max"] = hi;
                    j["n"] = n;
                    j["zeta_values"] = zs;
                    j["psi_values"] = ps;
                }
                j["seed"] = *seed;
                emit(j);
                return 0;
            };
        });
    }

    // cstar
    auto* cst = app.add_subcommand("cstar", "Root of Psi (sign change of the twist limit)");
    {
        auto seed = std::make_shared<std::uint64_t>(12345);
        cst->add_option("--seed", *seed, "echoed");
        cst->callback([=, &action] {
            action = [=] {
                json j;
                const double c = hopf::c_star();
                j["c_star"] = c;
                j["sqrt_2_c_star"] = std::sqrt(2.0 * c);
                j["seed"] = *seed;
                emit(j);
                return 0;
            };
        });
    }

    // predict
    auto* pred = app.add_subcommand("predict", "Asymptotic lambda predictors");
    {
        auto mu = std::make_shared<double>(0.0);
        auto a = std::make_shared<double>(1.0);
        auto b = std::make_shared<double>(0.0);
        auto sigma = std::make_shared<double>(1.0);
        auto regime = std::make_shared<std::string>("");
        pred->add_option("--mu", *mu, "linear growth rate")->required();
        pred->add_option("--a", *a, "radial contraction (> 0)");
        pred->add_option("--b", *b, "shear");
        pred->add_option("--sigma", *sigma, "noise intensity (> 0)");
        pred->add_option("--regime", *regime, "large-b|small-sigma|ce (default: all valid)");
        auto seed = std::make_shared<std::uint64_t>(12345);
        pred->add_option("--seed", *seed, "echoed");
        pred->callback([=, &action] {
            action = [=] {
                hopf::Params p;
                p.mu = *mu;
                p.a = *a;
                p.b = *b;
                p.sigma = *sigma;
                hopf::validate(p);
                json j;
                j["mu"] = *mu;
                j["a"] = *a;
                j["b"] = *b;
                j["sigma"] = *sigma;
                if (*regime == "large-b") {
                    j["regime"] = "large-b";
                    j["prediction"] = hopf::predict_large_b(p);
                } else if (*regime == "small-sigma") {
                    j["regime"] = "small-sigma";
                    j["prediction"] = hopf::predict_small_sigma(p);
                } else if (*regime == "ce") {
                    j["regime"] = "ce";
                    j["zeta"] = p.b * p.b * p.sigma * p.sigma / (2.0 * p.mu * p.mu * p.a);
                    j["prediction"] = hopf::predict_ce(p);
                } else if (regime->empty()) {
                    if (p.b > 0.0) j["large_b"] = hopf::predict_large_b(p);
                    if (p.mu > 0.0) {
                        j["small_sigma"] = hopf::predict_small_sigma(p);
                        j["ce"] = hopf::predict_ce(p);
                        j["zeta"] =
                            p.b * p.b * p.sigma * p.sigma / (2.0 * p.mu * p.mu * p.a);
                    }
                } else {
                    throw hopf::DomainError("--regime must be large-b, small-sigma, or ce");
                }
                j["seed"] = *seed;
                emit(j);
                return 0;
            };
        });
    }

    // diagram
    auto* diag = app.add_subcommand("diagram", "Scan the (mu, b) stability diagram to CSV");
    {
        auto spec = std::make_shared<hopf::GridSpec>();
        auto out = std::make_shared<std::string>();
        auto flags = std::make_shared<SimFlags>();
        diag->add_option("--mu-min", spec->mu_min)->required();
        diag->add_option("--mu-max", spec->mu_max)->required();
        diag->add_option("--mu-steps", spec->mu_steps)->required();
        diag->add_option("--b-min", spec->b_min)->required();
        diag->add_option("--b-max", spec->b_max)->required();
        diag->add_option("--b-steps", spec->b_steps)->required();
        diag->add_option("--out", *out, "output CSV path")->required();
        flags->attach(diag);
        diag->callback([=, &action] {
            action = [=] {
                const auto start = std::chrono::steady_clock::now();
                const hopf::SimConfig cfg = flags->to_config();
                const std::vector<hopf::DiagramPoint> points =
                    hopf::scan_grid(*spec, cfg, flags->batches, flags->threads);
                hopf::write_csv(points, *out);
                int failed = 0;
                for (const auto& pt : points) failed += pt.failed ? 1 : 0;
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
                json params;
                params["mu_min"] = spec->mu_min;
                params["mu_max"] = spec->mu_max;
                params["mu_steps"] = spec->mu_steps;
                params["b_min"] = spec->b_min;
                params["b_max"] = spec->b_max;
                params["b_steps"] = spec->b_steps;
                params["out"] = *out;
                flags->echo(params);
                write_manifest(*out, "diagram", params, flags->seed, secs);
                json j;
                j["out"] = *out;
                j["rows"] = points.size();
                j["failed_points"] = failed;
                j["seed"] = flags->seed;
                emit(j);
                return failed == 0 ? 0 : 1;
            };
        });
    }

    // zero
    auto* zero = app.add_subcommand("zero", "Locate lambda(mu,1,b,1) = 0 by gated bisection");
    {
        auto mu = std::make_shared<double>(0.0);
        auto b_lo = std::make_shared<double>(0.0);
        auto b_hi = std::make_shared<double>(0.0);
        auto tol = std::make_shared<double>(0.5);
        auto flags = std::make_shared<SimFlags>();
        zero->add_option("--mu", *mu, "linear growth rate")->required();
        zero->add_option("--b-lo", *b_lo, "lower bracket")->required();
        zero->add_option("--b-hi", *b_hi, "upper bracket")->required();
        zero->add_option("--tol", *tol, "bracket width target");
        flags->attach(zero);
        zero->callback([=, &action] {
            action = [=] {
                const hopf::SimConfig cfg = flags->to_config();
                const double root = hopf::find_zero_b(*mu, *b_lo, *b_hi, cfg, flags->batches,
                                                      *tol, flags->threads);
                json j;
                j["mu"] = *mu;
                j["b_lo"] = *b_lo;
                j["b_hi"] = *b_hi;
                j["tol_b"] = *tol;
                j["b_zero"] = root;
                flags->echo(j);
                emit(j);
                return 0;
            };
        });
    }

    // verify
    auto* ver = app.add_subcommand("verify", "Run the acceptance property suites");
    {
        auto suite = std::make_shared<std::string>("quick");
        auto out = std::make_shared<std::string>();
        auto seed = std::make_shared<std::uint64_t>(12345);
        auto threads = std::make_shared<int>(0);
        ver->add_option("--suite", *suite, "quick|full");
        ver->add_option("--out", *out, "write the results JSON here");
        ver->add_option("--seed", *seed, "master seed for all checks");
        ver->add_option("--threads", *threads, "worker threads (0 = auto)");
        ver->callback([=, &action] {
            action = [=] {
                const auto start = std::chrono::steady_clock::now();
                std::vector<hopf::acceptance::CheckResult> results;
                if (*suite == "quick") {
                    results = hopf::acceptance::run_quick(*seed, *threads);
                } else if (*suite == "full") {
                    results = hopf::acceptance::run_full(*seed, *threads, self_path);
                } else {
                    throw hopf::DomainError("--suite must be quick or full");
                }
                for (const auto& r : results) {
                    std::cerr << hopf::acceptance::format_line(r) << "\n";
                }
                const std::string body = hopf::acceptance::to_json(results);
                std::cout << body;
                if (!out->empty()) {
                    std::ofstream f(*out, std::ios::binary);
                    if (!f) throw std::runtime_error("verify: cannot open " + *out);
                    f << body;
                    f.flush();
                    if (!f) throw std::runtime_error("verify: write failed for " + *out);
                    const double secs = std::chrono::duration<double>(
                                            std::chrono::steady_clock::now() - start)
                                            .count();
                    json params;
                    params["suite"] = *suite;
                    params["out"] = *out;
                    params["threads"] = *threads;
                    write_manifest(*out, "verify", params, *seed, secs);
                }
                return hopf::acceptance::all_passed(results) ? 0 : 1;
            };
        });
    }

    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        args = apply_config_file(std::move(args));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    // CLI11 consumes arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const hopf::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
