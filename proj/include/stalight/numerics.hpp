#ifndef STALIGHT_NUMERICS_HPP
#define STALIGHT_NUMERICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <utility>

#include "stalight/grid.hpp"

namespace stalight {

// ---------------------------------------------------------------------------
// quadrature on the xi grid (trapezoidal; exact for affine integrands)

// Cumulative integral of f over xi. from_left: g(xi) = int_0^xi f;
// otherwise g(xi) = int_1^xi f (so g <= 0 for positive f).
inline carray integrate_xi(const carray& f, bool from_left, const Grid& g) {
    if (static_cast<int>(f.size()) != g.n_xi)
        throw shape_error("integrate_xi: array does not match grid");
    const double h = g.dxi();
    carray out(f.size());
    out[0] = 0.0;
    for (size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    if (!from_left) {
        const complexd total = out.back();
        for (auto& v : out) v -= total;
    }
    return out;
}

inline complexd trapz(const carray& f, const Grid& g) {
    const double h = g.dxi();
    complexd acc = 0.0;
    for (size_t i = 1; i < f.size(); ++i) acc += 0.5 * h * (f[i - 1] + f[i]);
    return acc;
}

inline double trapz_abs2(const carray& f, const Grid& g) {
    const double h = g.dxi();
    double acc = 0.0;
    for (size_t i = 1; i < f.size(); ++i)
        acc += 0.5 * h * (std::norm(f[i - 1]) + std::norm(f[i]));
    return acc;
}

inline double l2_norm(const carray& f, const Grid& g) { return std::sqrt(trapz_abs2(f, g)); }

inline double rel_l2_diff(const carray& a, const carray& b, const Grid& g) {
    require_same_grid(a, b, "rel_l2_diff");
    carray d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double den = l2_norm(b, g);
    if (den == 0.0) return l2_norm(d, g) == 0.0 ? 0.0 : INFINITY;
    return l2_norm(d, g) / den;
}

// ---------------------------------------------------------------------------
// envelope moments

// First moment and amplitude-profile variance of an envelope, weighted by
// |f|^2. width_sq is reported as twice the intensity-weighted variance so
// that a Gaussian amplitude of variance s^2 has width_sq = s^2; under the
// drift-diffusion equation this quantity grows by 2 D t.
struct EnvelopeMoments {
    double norm = 0.0;      // int |f|^2 dxi
    double centroid = 0.0;  // <xi>
    double width_sq = 0.0;  // 2 Var(xi)
};

inline EnvelopeMoments envelope_moments(const carray& f, const Grid& g) {
    EnvelopeMoments m;
    const double h = g.dxi();
    double w0 = 0.0, w1 = 0.0, w2 = 0.0;
    for (size_t i = 1; i < f.size(); ++i) {
        const double xa = g.xi(static_cast<int>(i - 1)), xb = g.xi(static_cast<int>(i));
        const double fa = std::norm(f[i - 1]), fb = std::norm(f[i]);
        w0 += 0.5 * h * (fa + fb);
        w1 += 0.5 * h * (xa * fa + xb * fb);
        w2 += 0.5 * h * (xa * xa * fa + xb * xb * fb);
    }
    m.norm = w0;
    if (w0 > 0.0) {
        m.centroid = w1 / w0;
        m.width_sq = 2.0 * std::max(0.0, w2 / w0 - m.centroid * m.centroid);
    }
    return m;
}

// ---------------------------------------------------------------------------
// fits

// Least-squares slope/intercept of y(x).
inline std::pair<double, double> linear_fit(const darray& x, const darray& y) {
    const size_t n = std::min(x.size(), y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / n;
    return {slope, icept};
}

// Decay rate from a log-linear fit of |y(t)|; returns +rate for decay.
inline double fitted_decay_rate(const darray& t, const darray& abs_y) {
    darray ln(abs_y.size());
    for (size_t i = 0; i < abs_y.size(); ++i) ln[i] = std::log(std::max(abs_y[i], 1e-300));
    return -linear_fit(t, ln).first;
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices (used by the frequency-domain solver)

struct Mat2 {
    complexd a, b, c, d;  // [[a, b], [c, d]]

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 scaled(complexd s) const { return {a * s, b * s, c * s, d * s}; }
    complexd trace() const { return a + d; }
    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

// Matrix exponential by scaling and squaring with a Taylor kernel. For the
// 2x2 systems here the scaled norm is <= 0.5, so 12 terms reach double
// precision before the squarings.
inline Mat2 expm(const Mat2& m) {
    int s = 0;
    double nrm = m.max_abs();
    while (nrm > 0.5 && s < 60) {
        nrm *= 0.5;
        ++s;
    }
    const double scale = std::ldexp(1.0, -s);
    const Mat2 a = m.scaled(scale);
    Mat2 term = Mat2::identity();
    Mat2 sum = Mat2::identity();
    for (int k = 1; k <= 12; ++k) {
        term = (term * a).scaled(1.0 / k);
        sum = sum + term;
    }
    for (int k = 0; k < s; ++k) sum = sum * sum;
    return sum;
}

inline bool all_finite(const carray& v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

} // namespace stalight

#endif
