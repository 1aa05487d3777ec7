#ifndef STALIGHT_EIT_HPP
#define STALIGHT_EIT_HPP

#include <cmath>

#include "stalight/numerics.hpp"
#include "stalight/types.hpp"

namespace stalight {

// EIT stationary-light reduction: with resonant controls and adiabatic
// excited states, the spinwave obeys a drift-diffusion equation
//
//   (d/dt + Gamma tan^2(theta) (cos(2 phi) d/dxi - (1/d) d^2/dxi^2)) S = 0
//
// with tan^2(theta) = (|W+|^2 + |W-|^2)/(d Gamma^2) and
// tan^2(phi) = |W-|^2/|W+|^2.

struct MixingAngles {
    double theta = 0.0;
    double phi = 0.0;
    bool degenerate = false; // both controls zero; phi is conventional

    double tan2_theta() const { return std::tan(theta) * std::tan(theta); }
    double drift_velocity(double gamma_val = kGamma) const {
        return gamma_val * tan2_theta() * std::cos(2.0 * phi);
    }
    double diffusion(double d, double gamma_val = kGamma) const { return gamma_val * tan2_theta() / d; }
};

inline MixingAngles mixing_angles(complexd omega_plus, complexd omega_minus, double d, double gamma_val = kGamma) {
    if (!(d > 0.0)) throw range_error("mixing_angles: d must be > 0");
    MixingAngles a;
    const double wp2 = std::norm(omega_plus);
    const double wm2 = std::norm(omega_minus);
    a.theta = std::atan(std::sqrt((wp2 + wm2) / (d * gamma_val * gamma_val)));
    if (wp2 == 0.0 && wm2 == 0.0) {
        a.degenerate = true;
        a.phi = 0.0;
    } else if (wp2 == 0.0) {
        a.phi = M_PI / 2.0;
    } else {
        a.phi = std::atan(std::sqrt(wm2 / wp2));
    }
    return a;
}

// Advance the drift-diffusion equation by t with outflow boundaries.
// Explicit upwind drift + centered diffusion; the internal step obeys
// 0.5 * min(dxi/|v|, dxi^2/(2 D)).
inline carray evolve_diffusion(const carray& s0, const MixingAngles& angles, double d, double gamma_val, double t,
                               double dt_override = 0.0) {
    if (t < 0.0) throw range_error("evolve_diffusion: t must be >= 0");
    const Grid g(static_cast<int>(s0.size()));
    if (t == 0.0) return s0;
    const double v = angles.drift_velocity(gamma_val);
    const double D = angles.diffusion(d, gamma_val);
    const double h = g.dxi();
    double dt = 0.5 * h * h / std::max(2.0 * D, 1e-300);
    if (v != 0.0) dt = std::min(dt, 0.5 * h / std::abs(v));
    dt = std::min(dt, t);
    if (dt_override > 0.0) dt = std::min(dt_override, t);
    const int n_steps = static_cast<int>(std::ceil(t / dt - 1e-12));
    dt = t / n_steps;

    carray s = s0;
    carray next(s.size());
    const int n = g.n_xi;
    for (int k = 0; k < n_steps; ++k) {
        for (int i = 0; i < n; ++i) {
            // upwind first derivative, one-sided at the edges (outflow)
            complexd ds;
            if (v >= 0.0)
                ds = (i == 0) ? (s[1] - s[0]) : (s[i] - s[i - 1]);
            else
                ds = (i == n - 1) ? (s[n - 1] - s[n - 2]) : (s[i + 1] - s[i]);
            complexd d2s;
            if (i == 0)
                d2s = s[1] - s[0]; // ghost value s[-1] = s[0]
            else if (i == n - 1)
                d2s = s[n - 2] - s[n - 1];
            else
                d2s = s[i + 1] - 2.0 * s[i] + s[i - 1];
            next[i] = s[i] + dt * (-v * ds / h + D * d2s / (h * h));
        }
        s.swap(next);
        if (!all_finite(s)) throw diverged_error("evolve_diffusion: non-finite values at step " + std::to_string(k));
    }
    return s;
}

// Dark-state polariton Psi_D = sin(theta) (E+ cos(phi) + E- sin(phi)) - S cos(theta).
inline carray dark_polariton(const FieldState& state, const MixingAngles& angles) {
    if (!state.shapes_consistent()) throw shape_error("dark_polariton: inconsistent state shapes");
    const double st = std::sin(angles.theta), ct = std::cos(angles.theta);
    const double cp = std::cos(angles.phi), sp = std::sin(angles.phi);
    carray psi(state.s.size());
    for (size_t i = 0; i < psi.size(); ++i)
        psi[i] = st * (state.e_plus[i] * cp + state.e_minus[i] * sp) - state.s[i] * ct;
    return psi;
}

// Complex effective polariton mass m* = 2 (d Gamma / Omega)^2 / (Delta - i Gamma),
// hbar = 1 in code units.
inline complexd effective_mass(double d, double gamma_val, complexd omega, double delta) {
    if (omega == complexd(0.0, 0.0)) throw domain_error("effective_mass: Omega must be nonzero");
    const double dg_over_w = d * gamma_val / std::abs(omega);
    return 2.0 * dg_over_w * dg_over_w / complexd(delta, -gamma_val);
}

struct PolaritonDiagnostics {
    carray psi_d;
    double centroid = 0.0;
    double width_sq = 0.0;
    complexd effective_mass_value;
};

inline PolaritonDiagnostics polariton_diagnostics(const FieldState& state, const MixingAngles& angles, double d,
                                                  double gamma_val, complexd omega, double delta) {
    PolaritonDiagnostics diag;
    diag.psi_d = dark_polariton(state, angles);
    const Grid g(state.n_xi());
    const EnvelopeMoments m = envelope_moments(state.s, g);
    diag.centroid = m.centroid;
    diag.width_sq = m.width_sq;
    diag.effective_mass_value =
        (omega == complexd(0.0, 0.0)) ? complexd(0.0, 0.0) : effective_mass(d, gamma_val, omega, delta);
    return diag;
}

} // namespace stalight

#endif
