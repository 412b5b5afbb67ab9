#include "hopf/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hopf/quadrature.hpp"

namespace hopf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.77245385090551602730;

// Laplace continued fraction for sqrt(pi) e^{x^2} erfc(x), x >= 5:
//   1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
// Fixed depth keeps evaluation deterministic; depth 64 is far past
// convergence at x = 5.
double erfcx_cf(double x) {
    double t = 0.0;
    for (int k = 64; k >= 1; --k) t = (0.5 * k) / (x + t);
    return 1.0 / (kSqrtPi * (x + t));
}

}  // namespace

double erfcx_scaled(double x) {
    if (std::isnan(x)) return x;
    if (x >= 5.0) return erfcx_cf(x);
    if (x >= 0.0) return std::exp(x * x) * std::erfc(x);
    // erfc(-|x|) = 2 - erfc(|x|); e^{x^2} overflows for x < -26.64, where the
    // true value exceeds double range.
    const double ex2 = std::exp(x * x);
    return 2.0 * ex2 - erfcx_scaled(-x);
}

double log_erfc_neg(double z) {
    if (z < 6.0) {
        // erfc(-z) = erfcx(-z) e^{-z^2}; erfcx(-z) finite for z > -26.6 and
        // for z << 0 this is the only branch that stays in range.
        return std::log(erfcx_scaled(-z)) - z * z;
    }
    // erfc(-z) = 2 - erfc(z) with erfc(z) <= 2e-17.
    const double tail = erfcx_scaled(z) * std::exp(-z * z);
    return std::log(2.0) + std::log1p(-0.5 * tail);
}

DensityModel make_density(double mu, double a, double sigma) {
    if (!std::isfinite(mu) || !std::isfinite(a) || !std::isfinite(sigma)) {
        throw DomainError("make_density: parameters must be finite");
    }
    if (a <= 0.0) throw DomainError("make_density: a must be positive");
    if (sigma <= 0.0) throw DomainError("make_density: sigma must be positive");
    DensityModel m;
    m.mu = mu;
    m.a = a;
    m.sigma = sigma;
    m.z_param = mu / (sigma * std::sqrt(2.0 * a));
    m.log_normalizer =
        0.5 * std::log(kPi * sigma * sigma / (2.0 * a)) + log_erfc_neg(m.z_param);
    return m;
}

double rho(const DensityModel& model, double r) {
    if (!(r > 0.0)) throw DomainError("rho: r must be positive");
    const double m = model.mu / model.a;
    const double d = r * r - m;
    const double expo = std::log(2.0 * r) -
                        (model.a / (2.0 * model.sigma * model.sigma)) * d * d -
                        model.log_normalizer;
    return std::exp(expo);
}

double rho_cdf(const DensityModel& model, double r) {
    if (!(r > 0.0)) return 0.0;
    const double m = model.mu / model.a;
    const double v = model.sigma * model.sigma / model.a;
    const double z = model.z_param;
    const double y = (r * r - m) / std::sqrt(2.0 * v);
    if (z >= -1.0) {
        return (std::erf(y) + std::erf(z)) / (1.0 + std::erf(z));
    }
    // z << 0: both erf terms are near -1; rewrite via upper tails.
    // cdf = 1 - erfc(y)/erfc(-z) with y >= -z > 0.
    const double ratio = (erfcx_scaled(y) / erfcx_scaled(-z)) * std::exp(z * z - y * y);
    return 1.0 - ratio;
}

double moment(const DensityModel& model, double kappa) {
    if (!std::isfinite(kappa) || kappa <= -2.0) {
        throw DomainError("moment: kappa must be finite and > -2");
    }
    // s = r^2 turns the integrand into s^{kappa/2} x Gaussian(m, v).
    const double m = model.mu / model.a;
    const double v = model.sigma * model.sigma / model.a;
    const double sd = std::sqrt(v);
    const double lo = std::max(0.0, m - 17.0 * sd);
    const double hi = std::max(m, 0.0) + (17.0 + std::sqrt(std::max(kappa, 0.0))) * sd;
    // Largest exponent on [lo, hi], factored out so the scaled integrand is O(1).
    const double s_peak = std::clamp(m, lo, hi);
    const double peak_log = -(s_peak - m) * (s_peak - m) / (2.0 * v);
    const double half_kappa = 0.5 * kappa;
    auto integrand = [&](double s) {
        const double d = s - m;
        return std::exp(half_kappa * std::log(s) - d * d / (2.0 * v) - peak_log);
    };
    auto res = quad::integrate(integrand, lo, hi, 1e-300, 1e-11);
    if (!res.converged) {
        throw QuadratureFailure("moment: quadrature did not converge for kappa=" +
                                std::to_string(kappa));
    }
    // N_s = sqrt(pi v / 2) erfc(-z) equals the r-space normalizer.
    return res.value * std::exp(peak_log - model.log_normalizer);
}

double moment_r2_closed(const DensityModel& model) {
    const double term = std::sqrt(2.0 * model.sigma * model.sigma / (kPi * model.a)) /
                        erfcx_scaled(-model.z_param);
    return model.mu / model.a + term;
}

double bound_J(double z, double b_ratio) {
    const double inner = z + 1.0 / (kSqrtPi * erfcx_scaled(-z));
    return z + (-2.0 + std::sqrt(1.0 + b_ratio * b_ratio)) * inner;
}

double jhat(double z) {
    const double q = 1.0 / (1.0 + kSqrtPi * z * erfcx_scaled(-z));
    return std::sqrt(q * (q + 2.0));
}

bool negativity_certificate(const Params& p) {
    validate(p);
    const double z = p.mu / (p.sigma * std::sqrt(2.0 * p.a));
    return std::abs(p.b) <= p.a * jhat(z);
}

namespace {

// g(u) = u^3/6 - u/2; minimum g(1) = -1/3.
double psi_g(double u) { return u * u * u / 6.0 - 0.5 * u; }

// Smallest u > 1 with (g(u) - g(1))/zeta >= 780: past it the integrand is
// below e^-745 relative to its maximum.
double psi_upper_cutoff(double zeta) {
    const double target = 780.0 * zeta - 1.0 / 3.0;
    double u = std::cbrt(6.0 * std::max(target, 1.0)) + 2.0;
    for (int i = 0; i < 4; ++i) u = std::cbrt(6.0 * (target + 0.5 * u));
    return u + 1.0;
}

struct PsiPair {
    double plus;
    double minus;
};

// I± up to the common factor e^{g(1)/zeta}, split at the interior maximum u=1.
PsiPair psi_integrals(double zeta) {
    auto weight = [&](double u) { return std::exp(-(psi_g(u) + 1.0 / 3.0) / zeta); };
    auto f_plus = [&](double u) { return std::sqrt(u) * weight(u); };
    auto f_minus = [&](double u) { return weight(u) / std::sqrt(u); };
    const double umax = psi_upper_cutoff(zeta);
    PsiPair out{0.0, 0.0};
    for (auto* part : {&out.plus, &out.minus}) {
        const bool plus = (part == &out.plus);
        auto lo_res = plus ? quad::integrate(f_plus, 0.0, 1.0, 1e-300, 1e-11)
                           : quad::integrate(f_minus, 0.0, 1.0, 1e-300, 1e-11);
        auto hi_res = plus ? quad::integrate(f_plus, 1.0, umax, 1e-300, 1e-11)
                           : quad::integrate(f_minus, 1.0, umax, 1e-300, 1e-11);
        if (!lo_res.converged || !hi_res.converged) {
            throw QuadratureFailure("psi_big: integral did not converge at zeta=" +
                                    std::to_string(zeta));
        }
        *part = lo_res.value + hi_res.value;
    }
    return out;
}

// Same ratio after u = 1 + sqrt(zeta) v: exponent becomes v^2/2 + sqrt(zeta) v^3/6
// exactly. Sharp-peak control for small zeta.
double psi_small_zeta(double zeta) {
    const double sz = std::sqrt(zeta);
    auto weight = [&](double v) { return std::exp(-(0.5 * v * v + sz * v * v * v / 6.0)); };
    const double v_lo = -1.0 / sz;
    const double v_hi = 40.0;
    auto f_plus = [&](double v) { return std::sqrt(1.0 + sz * v) * weight(v); };
    auto f_minus = [&](double v) { return weight(v) / std::sqrt(1.0 + sz * v); };
    auto plus = quad::integrate(f_plus, v_lo, v_hi, 1e-300, 1e-11);
    auto minus = quad::integrate(f_minus, v_lo, v_hi, 1e-300, 1e-11);
    if (!plus.converged || !minus.converged) {
        throw QuadratureFailure("psi_big: small-zeta cross-check did not converge");
    }
    return 0.5 * (plus.value / minus.value - 1.0);
}

}  // namespace

double psi_big(const PsiInput& in) {
    if (!std::isfinite(in.zeta) || in.zeta <= 0.0) {
        throw DomainError("psi_big: zeta must be positive and finite");
    }
    const PsiPair integrals = psi_integrals(in.zeta);
    const double value = 0.5 * (integrals.plus / integrals.minus - 1.0);
    if (in.zeta < 0.05) {
        const double check = psi_small_zeta(in.zeta);
        if (std::abs(value - check) > 1e-6 * std::max(1.0, std::abs(value))) {
            throw QuadratureFailure("psi_big: evaluation paths disagree at zeta=" +
                                    std::to_string(in.zeta));
        }
    }
    return value;
}

double c_star() {
    static const double root = [] {
        double lo = 1.0;
        double hi = 10.0;
        if (!(psi_big(lo) < 0.0) || !(psi_big(hi) > 0.0)) {
            throw QuadratureFailure("c_star: bracket [1,10] does not straddle the root");
        }
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            (psi_big(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return root;
}

double gamma0() {
    // Gamma(1/3) = integral_0^inf t^{-2/3} e^{-t} dt, to 20 significant digits.
    const double gamma_one_third = 2.6789385347077476337;
    return kPi / (std::cbrt(2.0) * std::pow(3.0, 1.0 / 6.0) * gamma_one_third * gamma_one_third);
}

double phi_shear(double w) {
    if (std::isnan(w)) throw DomainError("phi_shear: w must not be NaN");
    if (std::isinf(w) || std::abs(w) > 1e8) {
        // Phi(w) = 1/2 + 1/w + O(1/w^2).
        return std::isinf(w) ? 0.5 : 0.5 + 1.0 / w;
    }
    const double w2 = w * w;
    const double d = 1.0 + w2;
    return w / d - w2 * (1.0 - w2) / (2.0 * d * d);
}

double predict_large_b(const Params& p) {
    validate(p);
    if (!(p.b > 0.0)) throw DomainError("predict_large_b: b must be positive");
    const DensityModel model = make_density(p.mu, p.a, p.sigma);
    return std::pow(2.0 * p.b * p.sigma, 2.0 / 3.0) * gamma0() * moment(model, 2.0 / 3.0);
}

double predict_small_sigma(const Params& p) {
    validate(p);
    if (!(p.mu > 0.0)) throw DomainError("predict_small_sigma: mu must be positive");
    return -(p.a * p.a + p.b * p.b) * p.sigma * p.sigma / (2.0 * p.mu * p.a);
}

double predict_ce(const Params& p) {
    validate(p);
    if (!(p.mu > 0.0)) throw DomainError("predict_ce: mu must be positive");
    const double zeta = p.b * p.b * p.sigma * p.sigma / (2.0 * p.mu * p.mu * p.a);
    if (zeta == 0.0) return 0.0;
    return 2.0 * p.mu * psi_big(zeta);
}

}  // namespace hopf
