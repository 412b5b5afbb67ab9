#pragma once

#include <cmath>
#include <queue>
#include <utility>
#include <vector>

namespace hopf::quad {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

namespace detail {

// Gauss 7 / Kronrod 15 pair on [-1, 1]. Nodes are interior, so integrable
// endpoint singularities are never evaluated.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment evaluate(F& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double sum = f(c - x) + f(c + x);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= h;
    gauss *= h;
    return Segment{lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

// Adaptive bisection driven by the Gauss/Kronrod discrepancy of the worst
// segment. Converged when total error <= max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, double abs_tol, double rel_tol,
                           int max_subdivisions = 4000) {
    QuadratureResult out;
    if (lo == hi) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (lo > hi) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    std::priority_queue<detail::Segment> segments;
    segments.push(detail::evaluate(f, lo, hi));
    double total = segments.top().value;
    double error = segments.top().error;
    int splits = 0;
    while (error > std::max(abs_tol, rel_tol * std::abs(total)) && splits < max_subdivisions) {
        detail::Segment worst = segments.top();
        segments.pop();
        total -= worst.value;
        error -= worst.error;
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            // Interval at floating-point resolution, keep its estimate.
            total += worst.value;
            error += worst.error;
            break;
        }
        detail::Segment left = detail::evaluate(f, worst.lo, mid);
        detail::Segment right = detail::evaluate(f, mid, worst.hi);
        total += left.value + right.value;
        error += left.error + right.error;
        segments.push(left);
        segments.push(right);
        ++splits;
    }
    out.value = sign * total;
    out.error_estimate = error;
    out.subdivisions = splits;
    out.converged = error <= std::max(abs_tol, rel_tol * std::abs(total));
    return out;
}

}  // namespace hopf::quad
