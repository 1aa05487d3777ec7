#ifndef STALIGHT_SPECTRA_HPP
#define STALIGHT_SPECTRA_HPP

#include <cmath>
#include <vector>

#include "stalight/numerics.hpp"
#include "stalight/parallel.hpp"
#include "stalight/schedule.hpp"
#include "stalight/types.hpp"

namespace stalight {

// Frequency-domain steady state: substituting d/dt -> -i delta into the
// coherence equations and eliminating P+- and S algebraically leaves a
// linear 2x2 spatial system d/dxi (E+, E-)^T = M(delta) (E+, E-)^T with
//
//   Dp = Gamma + i (Delta+ - delta),  Dm = Gamma + i (Delta- - delta)
//   W  = gamma - i delta + |W+|^2/Dp + |W-|^2/Dm
//   M11 = -d G/Dp + d G |W+|^2 / (W Dp^2)      M12 =  d G W+ conj(W-)/(W Dp Dm)
//   M21 = -d G W- conj(W+)/(W Dp Dm)           M22 =  d G/Dm - d G |W-|^2/(W Dm^2) - i Dk
//
// (the -i Dk term absorbs a phase-mismatched backward coupling after the
// gauge E- -> E- exp(-i Dk xi), which leaves |E-| unchanged).
//
// The two-point boundary problem E+(0) = 1, E-(1) = 0 is solved through the
// matrix exponential Phi = expm(M): r = -Phi21/Phi22 and, using
// det Phi = exp(tr M), t = exp(tr M)/Phi22. This form avoids the huge
// cancellations of the naive t = Phi11 + Phi12 r deep inside a bandgap.

struct SpectrumResult {
    darray delta_grid;
    carray t_amp, r_amp;
    darray T, R;
    int regularized_points = 0; // delta values where the elimination was at an exact pole
};

namespace detail {
inline Mat2 response_matrix(double d, double gamma, complexd wp, complexd wm, double delta_plus, double delta_minus,
                            double mismatch, double delta, bool* regularized) {
    constexpr double eps = 1e-12 * kGamma;
    const complexd Dp = complexd(kGamma, delta_plus - delta);
    const complexd Dm = complexd(kGamma, delta_minus - delta);
    complexd W = complexd(gamma, -delta) + std::norm(wp) / Dp + std::norm(wm) / Dm;
    if (std::abs(W) < eps) {
        W += eps;
        if (regularized) *regularized = true;
    }
    const double dG = d * kGamma;
    Mat2 m;
    m.a = -dG / Dp + dG * std::norm(wp) / (W * Dp * Dp);
    m.b = dG * wp * std::conj(wm) / (W * Dp * Dm);
    m.c = -dG * wm * std::conj(wp) / (W * Dp * Dm);
    m.d = dG / Dm - dG * std::norm(wm) / (W * Dm * Dm) - complexd(0.0, mismatch);
    return m;
}

inline void amplitudes_from_transfer(const Mat2& phi, complexd det_phi, complexd& t, complexd& r) {
    r = -phi.c / phi.d;
    t = det_phi / phi.d;
}
} // namespace detail

// delta grid used when a scan does not specify one: 2001 points over
// +-10 Gamma tan^2(theta).
inline darray default_delta_grid(double d, complexd wp, complexd wm, int n_points = 2001) {
    const double tan2 = (std::norm(wp) + std::norm(wm)) / (d * kGamma * kGamma);
    const double span = 10.0 * kGamma * std::max(tan2, 1e-6);
    darray grid(static_cast<size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        grid[static_cast<size_t>(i)] = -span + 2.0 * span * i / (n_points - 1);
    return grid;
}

inline SpectrumResult steady_state_response(const EnsembleConfig& cfg, const ControlSchedule& ctrl,
                                            const darray& delta_grid, int max_threads = 0) {
    cfg.validate();
    if (!ctrl.constant_controls())
        throw unsupported_error("steady_state_response: controls must be time-independent");
    const complexd wp = ctrl.omega_plus.value(0.0);
    const complexd wm = ctrl.omega_minus.value(0.0);

    SpectrumResult res;
    res.delta_grid = delta_grid;
    const int n = static_cast<int>(delta_grid.size());
    res.t_amp.resize(delta_grid.size());
    res.r_amp.resize(delta_grid.size());
    res.T.resize(delta_grid.size());
    res.R.resize(delta_grid.size());
    std::vector<char> reg(delta_grid.size(), 0);

    parallel_for(
        n,
        [&](int i) {
            bool flagged = false;
            const Mat2 m = detail::response_matrix(cfg.d, cfg.gamma, wp, wm, ctrl.delta_plus, ctrl.delta_minus,
                                                   ctrl.mismatch, delta_grid[static_cast<size_t>(i)], &flagged);
            const Mat2 phi = expm(m);
            complexd t, r;
            detail::amplitudes_from_transfer(phi, std::exp(m.trace()), t, r);
            res.t_amp[static_cast<size_t>(i)] = t;
            res.r_amp[static_cast<size_t>(i)] = r;
            res.T[static_cast<size_t>(i)] = std::norm(t);
            res.R[static_cast<size_t>(i)] = std::norm(r);
            reg[static_cast<size_t>(i)] = flagged ? 1 : 0;
        },
        max_threads);
    for (char c : reg) res.regularized_points += c;
    return res;
}

// Independent route to t and r: slice the medium into n_slices piecewise-
// constant segments and multiply the per-slice transfer matrices. Used to
// cross-check the single-exponential solve and for spatially varying
// couplings (none of the shipped presets need the latter).
inline SpectrumResult transfer_matrix_response(const EnsembleConfig& cfg, const ControlSchedule& ctrl,
                                               const darray& delta_grid, int n_slices = 64) {
    cfg.validate();
    if (!ctrl.constant_controls())
        throw unsupported_error("transfer_matrix_response: controls must be time-independent");
    if (n_slices < 1) throw range_error("transfer_matrix_response: n_slices must be >= 1");
    const complexd wp = ctrl.omega_plus.value(0.0);
    const complexd wm = ctrl.omega_minus.value(0.0);

    SpectrumResult res;
    res.delta_grid = delta_grid;
    res.t_amp.resize(delta_grid.size());
    res.r_amp.resize(delta_grid.size());
    res.T.resize(delta_grid.size());
    res.R.resize(delta_grid.size());
    const double h = 1.0 / n_slices;
    for (size_t i = 0; i < delta_grid.size(); ++i) {
        bool flagged = false;
        const Mat2 m = detail::response_matrix(cfg.d, cfg.gamma, wp, wm, ctrl.delta_plus, ctrl.delta_minus,
                                               ctrl.mismatch, delta_grid[i], &flagged);
        const Mat2 slice = expm(m.scaled(h));
        Mat2 phi = Mat2::identity();
        complexd det_phi = 1.0;
        const complexd det_slice = std::exp(m.trace() * h);
        for (int k = 0; k < n_slices; ++k) {
            phi = slice * phi;
            det_phi *= det_slice;
        }
        complexd t, r;
        detail::amplitudes_from_transfer(phi, det_phi, t, r);
        res.t_amp[i] = t;
        res.r_amp[i] = r;
        res.T[i] = std::norm(t);
        res.R[i] = std::norm(r);
        if (flagged) ++res.regularized_points;
    }
    return res;
}

// Swap which side is driven: E-(1) = 1, E+(0) = 0; returns |E-(0)|^2 as T
// and |E+(1)|^2 as R. Used by the reciprocity check.
inline void reverse_drive_amplitudes(const EnsembleConfig& cfg, const ControlSchedule& ctrl, double delta,
                                     complexd& t_rev, complexd& r_rev) {
    const complexd wp = ctrl.omega_plus.value(0.0);
    const complexd wm = ctrl.omega_minus.value(0.0);
    const Mat2 m = detail::response_matrix(cfg.d, cfg.gamma, wp, wm, ctrl.delta_plus, ctrl.delta_minus, ctrl.mismatch,
                                           delta, nullptr);
    const Mat2 phi = expm(m);
    // knowns E+(0) = 0, E-(1) = 1: row 2 gives E-(0) = 1/phi22, row 1 then
    // gives E+(1) = phi12/phi22.
    t_rev = 1.0 / phi.d;
    r_rev = phi.b / phi.d;
}

// FWHM of the transparency window around the global maximum of T.
inline double eit_window_width(const SpectrumResult& spec) {
    const auto& T = spec.T;
    const auto& dg = spec.delta_grid;
    if (T.size() < 8) throw resolution_error("eit_window_width: grid too coarse");
    size_t imax = 0;
    for (size_t i = 1; i < T.size(); ++i)
        if (T[i] > T[imax]) imax = i;
    const double half = T[imax] / 2.0;
    if (imax == 0 || imax + 1 >= T.size())
        throw resolution_error("eit_window_width: window maximum at grid edge");

    size_t lo = imax;
    while (lo > 0 && T[lo] >= half) --lo;
    size_t hi = imax;
    while (hi + 1 < T.size() && T[hi] >= half) ++hi;
    if (T[lo] >= half || T[hi] >= half)
        throw resolution_error("eit_window_width: window not resolved by the delta grid");
    const double dl = dg[lo] + (dg[lo + 1] - dg[lo]) * (half - T[lo]) / (T[lo + 1] - T[lo]);
    const double dh = dg[hi - 1] + (dg[hi] - dg[hi - 1]) * (half - T[hi - 1]) / (T[hi] - T[hi - 1]);
    if (hi - lo < 4) throw resolution_error("eit_window_width: fewer than 4 grid points across the window");
    return dh - dl;
}

} // namespace stalight

#endif
