#pragma once

#include "hopf/errors.hpp"
#include "hopf/params.hpp"

namespace hopf {

// e^{x^2} erfc(x). Finite for x > -26.6; +infinity past that (the true value
// exceeds double range). Relative error <= 1e-12 for |x| <= 40.
double erfcx_scaled(double x);

// log(erfc(-z)), valid for all finite z including z << 0 where erfc(-z)
// underflows.
double log_erfc_neg(double z);

// Stationary r-marginal: rho(r) = 2r exp(-(a/2sigma^2)(r^2 - mu/a)^2) / N.
struct DensityModel {
    double mu;
    double a;
    double sigma;
    double z_param;         // mu / (sigma sqrt(2a))
    double log_normalizer;  // log N, overflow-safe
};

DensityModel make_density(double mu, double a, double sigma);
double rho(const DensityModel& model, double r);
// P(R <= r) under rho; stable for strongly negative z_param.
double rho_cdf(const DensityModel& model, double r);
// E[r^kappa] by adaptive quadrature in s = r^2. Requires kappa > -2.
double moment(const DensityModel& model, double kappa);
// E[r^2] closed form: mu/a + sqrt(2 sigma^2 / (pi a)) / erfcx(-z).
double moment_r2_closed(const DensityModel& model);

// J(z, b) = z + (-2 + sqrt(1+b^2)) (z + 1/(sqrt(pi) erfcx(-z))).
// lambda(mu,a,b,sigma) < sqrt(2 a sigma^2) J(mu/sqrt(2 a sigma^2), b/a).
double bound_J(double z, double b_ratio);
// Positive root threshold of J in its second argument; J(z, jhat(z)) = 0.
double jhat(double z);
// True iff |b| <= a jhat(mu/(sigma sqrt(2a))): a rigorous lambda < 0 witness.
bool negativity_certificate(const Params& p);

struct PsiInput {
    double zeta;  // shear-to-contraction ratio, > 0
};

// Psi(zeta) = (1/2)(I+ / I- - 1) with I± = ∫ u^{±1/2} exp(-(u^3/6 - u/2)/zeta) du.
double psi_big(const PsiInput& in);
inline double psi_big(double zeta) { return psi_big(PsiInput{zeta}); }

// Unique positive root of Psi, located by bisection on [1, 10]; cached.
double c_star();

// pi / (2^{1/3} 3^{1/6} Gamma(1/3)^2) = 0.2893082598...
double gamma0();

// Phi(w) = w/(1+w^2) - w^2(1-w^2)/(2(1+w^2)^2); Phi(±inf) = 1/2.
double phi_shear(double w);

// lambda ~ (2 b sigma)^{2/3} gamma0 E[r^{2/3}] as b -> infinity.
double predict_large_b(const Params& p);
// lambda ~ -(a^2+b^2) sigma^2 / (2 mu a) as sigma -> 0, mu > 0.
double predict_small_sigma(const Params& p);
// lambda -> 2 mu Psi(b^2 sigma^2 / (2 mu^2 a)) in the twist limit, mu > 0.
double predict_ce(const Params& p);

}  // namespace hopf
