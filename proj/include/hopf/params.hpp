#pragma once

#include <cmath>

#include "hopf/errors.hpp"

namespace hopf {

// dX = ([mu, -omega; omega, mu] X + |X|^2 [-a, -b; b, -a] X) dt + sigma dW,
// with two independent Brownian components. `a` and `sigma` must be positive.
struct Params {
    double mu = 0.0;
    double omega = 0.0;
    double a = 1.0;
    double b = 0.0;
    double sigma = 1.0;
};

inline const Params& validate(const Params& p) {
    if (!std::isfinite(p.mu) || !std::isfinite(p.omega) || !std::isfinite(p.a) ||
        !std::isfinite(p.b) || !std::isfinite(p.sigma)) {
        throw DomainError("params: all fields must be finite");
    }
    if (p.a <= 0.0) throw DomainError("params: a must be positive");
    if (p.sigma <= 0.0) throw DomainError("params: sigma must be positive");
    return p;
}

// Growth-rate integrand of the phase-averaged formulation:
//   Q(r, psi) = mu - a r^2 + 2 r^2 cos(psi) (b sin(psi) - a cos(psi)).
// Equal to mu - 2 a r^2 + r^2 (b sin 2psi - a cos 2psi); omega does not appear.
inline double q_integrand(double r, double psi, const Params& p) {
    const double r2 = r * r;
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return p.mu - p.a * r2 + 2.0 * r2 * c * (p.b * s - p.a * c);
}

// Angle variable lives on the half circle; reduce into [0, pi).
inline double wrap_psi(double psi) {
    const double pi = 3.14159265358979323846;
    double w = std::fmod(psi, pi);
    if (w < 0.0) w += pi;
    if (w >= pi) w = 0.0;
    return w;
}

// lambda(p) = multiplier * lambda(mu_hat, omega', 1, b_hat, 1): amplitude and
// time units chosen so a = sigma = 1, shear reflected to b_hat >= 0.
struct CanonicalForm {
    double mu_hat;
    double b_hat;
    double multiplier;
};

inline CanonicalForm canonicalize(const Params& p) {
    validate(p);
    const double mult = p.sigma * std::sqrt(p.a);
    return CanonicalForm{p.mu / mult, std::abs(p.b) / p.a, mult};
}

// Two-parameter exact rescaling. lambda(p) = exponent_multiplier * lambda(params).
struct Rescaled {
    Params params;
    double exponent_multiplier;
};

inline Rescaled rescale(const Params& p, double A, double B) {
    validate(p);
    if (!std::isfinite(A) || A <= 0.0) throw DomainError("rescale: A must be positive");
    if (!std::isfinite(B) || B <= 0.0) throw DomainError("rescale: B must be positive");
    Params q;
    q.mu = A * p.mu;
    q.omega = A * p.omega;
    q.a = A * p.a / (B * B);
    q.b = A * p.b / (B * B);
    q.sigma = std::sqrt(A) * B * p.sigma;
    return Rescaled{q, 1.0 / A};
}

}  // namespace hopf
