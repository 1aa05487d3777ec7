#ifndef STALIGHT_RAMAN_HPP
#define STALIGHT_RAMAN_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "stalight/numerics.hpp"
#include "stalight/types.hpp"

namespace stalight {

// Raman stationary light: far-detuned counterpropagating controls with equal
// drive Omega and opposite detunings Delta+ = -Delta- = Delta. After
// adiabatic elimination and the rotating spatial frame, the probes are
// integrals of the spinwave,
//
//   E+(xi) =  i sqrt(d) (W/Delta) int_0^xi S
//   E-(xi) = -i sqrt(d) (W/Delta) int_1^xi S
//
// and the spinwave obeys (d/dt + gamma) S = -d Gamma (|W|/Delta)^2 int_0^1 S.
// A spinwave with zero mean is stationary up to the global gamma decay; the
// spatial mean decays at the extra rate d Gamma |W|^2 / Delta^2.
//
// The light shift -i (|W+|^2/Delta+ + |W-|^2/Delta-) S cancels under the
// equal-and-opposite detunings assumed here; this module does not support
// unequal drives, where that term would survive (use the mbe module).
// Incoherent control scattering is folded into gamma and not added again.

struct RamanParams {
    complexd omega;     // common control Rabi frequency
    double delta = 0.0; // Delta+ = +delta, Delta- = -delta
    double gamma = 0.0; // spinwave decay (includes control scattering)

    // Adiabaticity requires |Delta| well above Gamma. Below 10 Gamma the
    // elimination is invalid; between 10 and 25 Gamma a warning is reported.
    std::optional<std::string> validate() const {
        if (delta == 0.0) throw domain_error("raman: Delta must be nonzero");
        if (!std::isfinite(std::abs(omega))) throw range_error("raman: Omega must be finite");
        if (std::abs(delta) < 10.0 * kGamma)
            throw domain_error("raman: |Delta| must be >= 10 Gamma for the adiabatic elimination");
        if (gamma < 0.0) throw range_error("raman: gamma must be >= 0");
        if (std::abs(delta) < 25.0 * kGamma)
            return "raman: |Delta| < 25 Gamma; adiabatic elimination is marginal";
        return std::nullopt;
    }

    double sl_rate(double d, double gamma_excited = kGamma) const {
        return d * gamma_excited * std::norm(omega) / (delta * delta);
    }
};

struct SpinwaveDecomposition {
    carray stationary; // zero-mean part
    complexd uniform;  // spatial mean
};

inline SpinwaveDecomposition decompose(const carray& s, const Grid& g) {
    SpinwaveDecomposition dec;
    dec.uniform = trapz(s, g); // xi-interval has unit length
    dec.stationary.resize(s.size());
    for (size_t i = 0; i < s.size(); ++i) dec.stationary[i] = s[i] - dec.uniform;
    return dec;
}

// Probe fields generated by a spinwave in the rotating spatial frame. An
// optional mismatch phase (radians per unit xi) on the backward coupling
// shifts which spinwaves are stationary.
inline std::pair<carray, carray> probe_fields_from_spinwave(const carray& s, double d, const RamanParams& params,
                                                            const Grid& g, double mismatch = 0.0) {
    params.validate();
    const complexd pref = complexd(0.0, std::sqrt(d)) * (params.omega / params.delta);
    if (mismatch == 0.0) {
        carray ep = integrate_xi(s, true, g);
        carray em = integrate_xi(s, false, g);
        for (auto& v : ep) v *= pref;
        for (auto& v : em) v *= -pref;
        return {std::move(ep), std::move(em)};
    }
    carray ep = integrate_xi(s, true, g);
    carray sm(s.size());
    for (size_t i = 0; i < s.size(); ++i)
        sm[i] = s[i] * std::polar(1.0, mismatch * g.xi(static_cast<int>(i)));
    carray em = integrate_xi(sm, false, g);
    for (auto& v : ep) v *= pref;
    for (auto& v : em) v *= -pref;
    return {std::move(ep), std::move(em)};
}

// Closed-form solution S(xi, t) = [S_xi(xi) + S_t0 exp(-t d Gamma |W|^2/Delta^2)] exp(-gamma t).
inline carray evolve_raman_analytic(const carray& s0, double d, double gamma_excited, const RamanParams& params,
                                    double t) {
    params.validate();
    if (t < 0.0) throw range_error("evolve_raman_analytic: t must be >= 0");
    const Grid g(static_cast<int>(s0.size()));
    const SpinwaveDecomposition dec = decompose(s0, g);
    const complexd uniform_t = dec.uniform * std::exp(-t * params.sl_rate(d, gamma_excited));
    const double global = std::exp(-params.gamma * t);
    carray s(s0.size());
    for (size_t i = 0; i < s.size(); ++i) s[i] = (dec.stationary[i] + uniform_t) * global;
    return s;
}

// Numerical integration of dS/dt = i sqrt(d) Gamma (conj(W)/Delta)(E+ + E-) - gamma S
// with the probe integrals re-evaluated every stage (explicit midpoint).
// Serves as the independent check on the closed form and the bridge to mbe.
inline carray evolve_raman_numeric(const carray& s0, double d, double gamma_excited, const RamanParams& params,
                                   double t, double mismatch = 0.0,
                                   const std::function<void(double, const carray&)>& observer = nullptr) {
    params.validate();
    if (t < 0.0) throw range_error("evolve_raman_numeric: t must be >= 0");
    const Grid g(static_cast<int>(s0.size()));
    carray s = s0;
    if (t == 0.0) return s;
    const double rate = std::max(params.sl_rate(d, gamma_excited), params.gamma);
    double dt = 0.05 / std::max(rate, 1e-12);
    dt = std::min(dt, t);
    const int n_steps = static_cast<int>(std::ceil(t / dt - 1e-12));
    dt = t / n_steps;

    const complexd coef = complexd(0.0, std::sqrt(d)) * gamma_excited * (std::conj(params.omega) / params.delta);
    carray half(s.size()), rhs(s.size());
    auto eval_rhs = [&](const carray& sv, carray& out) {
        auto [ep, em] = probe_fields_from_spinwave(sv, d, params, g, mismatch);
        for (size_t i = 0; i < sv.size(); ++i) {
            complexd drive = ep[i] + em[i];
            if (mismatch != 0.0)
                drive = ep[i] + em[i] * std::polar(1.0, -mismatch * g.xi(static_cast<int>(i)));
            out[i] = coef * drive - params.gamma * sv[i];
        }
    };
    double tn = 0.0;
    if (observer) observer(0.0, s);
    for (int k = 0; k < n_steps; ++k) {
        eval_rhs(s, rhs);
        for (size_t i = 0; i < s.size(); ++i) half[i] = s[i] + 0.5 * dt * rhs[i];
        eval_rhs(half, rhs);
        for (size_t i = 0; i < s.size(); ++i) s[i] += dt * rhs[i];
        tn += dt;
        if (!all_finite(s))
            throw diverged_error("evolve_raman_numeric: non-finite values at t = " + std::to_string(tn));
        if (observer) observer(tn, s);
    }
    return s;
}

// Map mbe-frame fields into the rotating spatial frame of this module:
// S -> S exp(-i d Gamma xi / Delta), E+ -> E+ exp(-i d Gamma xi / Delta),
// E- -> -E- exp(-i d Gamma xi / Delta).
inline FieldState raman_frame_from_mbe(const FieldState& st, double d, double delta) {
    FieldState out = st;
    const Grid g(st.n_xi());
    for (int i = 0; i < g.n_xi; ++i) {
        const complexd ph = std::polar(1.0, -d * kGamma * g.xi(i) / delta);
        out.s[i] = st.s[i] * ph;
        out.e_plus[i] = st.e_plus[i] * ph;
        out.e_minus[i] = -st.e_minus[i] * ph;
        out.p_plus[i] = st.p_plus[i] * ph;
        out.p_minus[i] = -st.p_minus[i] * ph;
    }
    return out;
}

} // namespace stalight

#endif
