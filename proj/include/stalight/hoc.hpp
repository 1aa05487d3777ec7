#ifndef STALIGHT_HOC_HPP
#define STALIGHT_HOC_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "stalight/mbe.hpp"
#include "stalight/numerics.hpp"
#include "stalight/schedule.hpp"
#include "stalight/types.hpp"

namespace stalight {

// Higher-order-coherence ladder for frequency-degenerate counterpropagating
// controls. The spinwave splits into momentum orders sigma_12^(2n) and the
// excited coherences into odd orders sigma_13^(m); each control photon
// absorbed from one direction and re-emitted into the other climbs the
// ladder by two units:
//
//   dp_m/dt = -(Gamma_m - i Delta) p_m + [i sqrt(d) Gamma E(+-) if m = +-1]
//             + i W+ s_(m-1) + i W- s_(m+1)
//   ds_q/dt = -gamma_q s_q + i conj(W+) p_(q+1) + i conj(W-) p_(q-1)
//
// Probe fields couple to the m = +-1 coherences only. Truncation keeps
// |q| <= 2 n_max and the interleaving odd p orders; n_max = 0 disables the
// cross couplings entirely and reproduces the secular dynamics.
//
// Motional decay of a grating of order n is modelled as
// gamma_motion * n^exponent on top of the bare rates; order n = 1 excited
// coherences (the ordinary P+-) carry no motional term, since they are
// co-propagating with their probe. The same power law is applied to
// spinwave and excited orders alike -- the underlying theory fixes only
// that higher orders decay fast in moving media.

struct HOCDecayModel {
    double gamma_motion = 0.0;
    int exponent = 2; // 2: diffusive washout, 1: ballistic

    void validate() const {
        if (gamma_motion < 0.0) throw range_error("hoc.gamma_motion: must be >= 0");
        if (exponent != 1 && exponent != 2) throw range_error("hoc.exponent: must be 1 or 2");
    }

    double spinwave_rate(int order, double gamma0) const {
        const int n = std::abs(order) / 2;
        return n == 0 ? gamma0 : gamma0 + gamma_motion * std::pow(static_cast<double>(n), exponent);
    }
    double excited_rate(int order) const {
        const int n = (std::abs(order) + 1) / 2;
        return n <= 1 ? kGamma : kGamma + gamma_motion * std::pow(static_cast<double>(n), exponent);
    }
};

struct HOCState {
    Grid grid;
    int n_max = 0;
    std::map<int, carray> s; // even orders -2 n_max .. 2 n_max
    std::map<int, carray> p; // odd orders, and always +-1

    static HOCState zero(const Grid& g, int n_max) {
        if (n_max < 0) throw range_error("hoc.n_max: must be >= 0");
        HOCState st;
        st.grid = g;
        st.n_max = n_max;
        for (int q = -2 * n_max; q <= 2 * n_max; q += 2) st.s[q] = g.zeros();
        const int top = std::max(1, 2 * n_max - 1);
        for (int m = -top; m <= top; m += 2) st.p[m] = g.zeros();
        return st;
    }

    static HOCState from_spinwave(const carray& s0, int n_max) {
        Grid g(static_cast<int>(s0.size()));
        HOCState st = zero(g, n_max);
        st.s[0] = s0;
        return st;
    }

    const carray& order0() const { return s.at(0); }
};

class HocIntegrator {
public:
    HocIntegrator(const EnsembleConfig& cfg, Grid grid, ControlSchedule ctrl, HOCDecayModel decay,
                  BoundaryDrive drive)
        : cfg_(cfg), grid_(grid), ctrl_(std::move(ctrl)), decay_(decay), drive_(std::move(drive)),
          sqrt_d_(std::sqrt(cfg.d)) {
        cfg_.validate();
        decay_.validate();
        if (ctrl_.delta_plus != ctrl_.delta_minus)
            throw unsupported_error(
                "hoc: controls must be frequency degenerate (delta_plus == delta_minus); "
                "use the secular mbe path for two-colour schemes");
        mis_phase_.resize(grid_.n_xi);
        for (int i = 0; i < grid_.n_xi; ++i)
            mis_phase_[i] = std::polar(1.0, ctrl_.mismatch * grid_.xi(i));
        ep_ = grid_.zeros();
        em_ = grid_.zeros();
    }

    const Grid& grid() const { return grid_; }

    void solve_fields(const HOCState& st, double t, carray& ep, carray& em) const {
        const double h = grid_.dxi();
        const complexd isd = complexd(0.0, sqrt_d_);
        const carray& pp = st.p.at(1);
        const carray& pm = st.p.at(-1);
        ep.resize(pp.size());
        em.resize(pm.size());
        ep[0] = drive_.e_plus(t);
        for (int i = 1; i < grid_.n_xi; ++i) ep[i] = ep[i - 1] + isd * 0.5 * h * (pp[i - 1] + pp[i]);
        const int n = grid_.n_xi;
        em[n - 1] = drive_.e_minus(t);
        for (int i = n - 2; i >= 0; --i) em[i] = em[i + 1] + isd * 0.5 * h * (pm[i] + pm[i + 1]);
    }

    void step(HOCState& st, double t, double dt) {
        if (rhs_s_.empty()) allocate_like(st);
        const double delta = ctrl_.delta_plus;
        coupling_rhs(st, t, rhs_s_, rhs_p_);
        for (auto& [q, arr] : mid_.s) {
            const complexd decay_fac = std::exp(-diag_s(q) * (0.5 * dt));
            const carray& cur = st.s.at(q);
            const carray& r = rhs_s_.at(q);
            for (size_t i = 0; i < arr.size(); ++i) arr[i] = decay_fac * (cur[i] + 0.5 * dt * r[i]);
        }
        for (auto& [m, arr] : mid_.p) {
            const complexd decay_fac = std::exp(-complexd(decay_.excited_rate(m), -delta) * (0.5 * dt));
            const carray& cur = st.p.at(m);
            const carray& r = rhs_p_.at(m);
            for (size_t i = 0; i < arr.size(); ++i) arr[i] = decay_fac * (cur[i] + 0.5 * dt * r[i]);
        }
        coupling_rhs(mid_, t + 0.5 * dt, rhs_s_, rhs_p_);
        for (auto& [q, arr] : st.s) {
            const complexd full = std::exp(-diag_s(q) * dt), half = std::exp(-diag_s(q) * (0.5 * dt));
            const carray& r = rhs_s_.at(q);
            for (size_t i = 0; i < arr.size(); ++i) arr[i] = full * arr[i] + dt * half * r[i];
        }
        for (auto& [m, arr] : st.p) {
            const complexd a = complexd(decay_.excited_rate(m), -delta);
            const complexd full = std::exp(-a * dt), half = std::exp(-a * (0.5 * dt));
            const carray& r = rhs_p_.at(m);
            for (size_t i = 0; i < arr.size(); ++i) arr[i] = full * arr[i] + dt * half * r[i];
        }
    }

private:
    complexd diag_s(int q) const {
        return complexd(decay_.spinwave_rate(q, cfg_.gamma), ctrl_.two_photon_delta);
    }

    void allocate_like(const HOCState& st) {
        mid_ = st;
        for (auto& [q, arr] : st.s) rhs_s_[q] = carray(arr.size());
        for (auto& [m, arr] : st.p) rhs_p_[m] = carray(arr.size());
    }

    void coupling_rhs(const HOCState& st, double t, std::map<int, carray>& ds, std::map<int, carray>& dp) {
        solve_fields(st, t, ep_, em_);
        const complexd op = ctrl_.omega_plus.value(t);
        const complexd om0 = ctrl_.omega_minus.value(t);
        const complexd isd = complexd(0.0, sqrt_d_) * kGamma;
        const int n = grid_.n_xi;
        for (auto& [m, out] : dp) {
            const carray* lo = st.s.count(m - 1) ? &st.s.at(m - 1) : nullptr;
            const carray* hi = st.s.count(m + 1) ? &st.s.at(m + 1) : nullptr;
            for (int i = 0; i < n; ++i) {
                const complexd om = om0 * mis_phase_[i];
                complexd v = 0.0;
                if (lo) v += complexd(0.0, 1.0) * op * (*lo)[i];
                if (hi) v += complexd(0.0, 1.0) * om * (*hi)[i];
                if (m == 1) v += isd * ep_[i];
                if (m == -1) v += isd * em_[i];
                out[i] = v;
            }
        }
        for (auto& [q, out] : ds) {
            const carray* up = st.p.count(q + 1) ? &st.p.at(q + 1) : nullptr;
            const carray* dn = st.p.count(q - 1) ? &st.p.at(q - 1) : nullptr;
            for (int i = 0; i < n; ++i) {
                const complexd om = om0 * mis_phase_[i];
                complexd v = 0.0;
                if (up) v += complexd(0.0, 1.0) * std::conj(op) * (*up)[i];
                if (dn) v += complexd(0.0, 1.0) * std::conj(om) * (*dn)[i];
                out[i] = v;
            }
        }
    }

    EnsembleConfig cfg_;
    Grid grid_;
    ControlSchedule ctrl_;
    HOCDecayModel decay_;
    BoundaryDrive drive_;
    double sqrt_d_;
    carray mis_phase_;
    carray ep_, em_;
    HOCState mid_;
    std::map<int, carray> rhs_s_, rhs_p_;
};

// Single-step wrapper matching the operation contract.
inline HOCState step_hoc(const HOCState& state, const EnsembleConfig& cfg, const ControlSchedule& ctrl,
                         const HOCDecayModel& decay, const BoundaryDrive& drive, double t, double dt) {
    HocIntegrator integ(cfg, state.grid, ctrl, decay, drive);
    HOCState st = state;
    integ.step(st, t, dt);
    for (const auto& [q, arr] : st.s)
        if (!all_finite(arr))
            throw diverged_error("step_hoc: ladder diverged at t = " + std::to_string(t + dt));
    return st;
}

struct HOCTrajectory {
    std::vector<double> times;
    std::vector<std::map<int, double>> order_norms; // ||sigma^(2n)|| per snapshot
    std::vector<BoundarySample> boundary_out;
    std::vector<BookkeepingRow> bookkeeping;
    HOCState final_state;
    double leaked = 0.0; // cumulative boundary flux out
    double stored_initial = 0.0;

    double max_abs_closure() const {
        if (bookkeeping.empty()) return 0.0;
        const double scale = std::max(bookkeeping.back().flux_in + stored_initial, 1e-12);
        double m = 0.0;
        for (const auto& r : bookkeeping) {
            const double defect = (r.flux_in + stored_initial) - (r.stored + r.flux_out + r.loss);
            m = std::max(m, std::abs(defect));
        }
        return m / scale;
    }
};

inline HOCTrajectory run_hoc(const EnsembleConfig& cfg, const SimulationGrid& sim, const ControlSchedule& ctrl,
                             const HOCDecayModel& decay, const BoundaryDrive& drive, const HOCState& initial,
                             int stride = 1) {
    sim.validate();
    if (stride < 1) throw range_error("run_hoc: stride must be >= 1");
    Grid g = sim.space();
    if (initial.grid.n_xi != g.n_xi) throw shape_error("run_hoc: initial state does not match grid");

    HocIntegrator integ(cfg, g, ctrl, decay, drive);
    HOCState st = initial;
    HOCTrajectory traj;
    const int n_steps = static_cast<int>(std::floor(sim.t_final / sim.dt + 1e-9));

    carray ep = g.zeros(), em = g.zeros();
    double flux_in = 0.0, flux_out = 0.0, loss = 0.0;
    double stored0 = 0.0;
    for (const auto& [q, arr] : st.s) stored0 += trapz_abs2(arr, g);
    for (const auto& [m, arr] : st.p) stored0 += trapz_abs2(arr, g);
    traj.stored_initial = stored0;

    auto instantaneous = [&](double t, double& fin, double& fout, double& lrate, double& stored) {
        integ.solve_fields(st, t, ep, em);
        fin = std::norm(drive.e_plus(t)) + std::norm(drive.e_minus(t));
        fout = std::norm(ep.back()) + std::norm(em.front());
        lrate = 0.0;
        stored = 0.0;
        for (const auto& [q, arr] : st.s) {
            const double a2 = trapz_abs2(arr, g);
            stored += a2;
            lrate += 2.0 * decay.spinwave_rate(q, cfg.gamma) * a2;
        }
        for (const auto& [m, arr] : st.p) {
            const double a2 = trapz_abs2(arr, g);
            stored += a2;
            lrate += 2.0 * decay.excited_rate(m) * a2;
        }
    };

    auto record = [&](double t, int step_idx) {
        integ.solve_fields(st, t, ep, em);
        traj.boundary_out.push_back({t, ep.back(), em.front()});
        double fin, fout, lrate, stored;
        instantaneous(t, fin, fout, lrate, stored);
        BookkeepingRow row;
        row.t = t;
        row.stored = stored;
        row.flux_in = flux_in;
        row.flux_out = flux_out;
        row.loss = loss;
        row.closure_residual =
            ((flux_in + stored0) - (stored + flux_out + loss)) / std::max(flux_in + stored0, 1e-12);
        traj.bookkeeping.push_back(row);
        if (step_idx % stride == 0) {
            traj.times.push_back(t);
            std::map<int, double> norms;
            for (const auto& [q, arr] : st.s) norms[q] = l2_norm(arr, g);
            traj.order_norms.push_back(std::move(norms));
        }
    };

    record(0.0, 0);
    double fin0, fout0, lrate0, stored_now;
    instantaneous(0.0, fin0, fout0, lrate0, stored_now);
    for (int k = 0; k < n_steps; ++k) {
        integ.step(st, k * sim.dt, sim.dt);
        const double t1 = (k + 1) * sim.dt;
        if (!all_finite(st.s.at(0)))
            throw diverged_error("run_hoc: ladder diverged at t = " + std::to_string(t1));
        double fin1, fout1, lrate1, stored1;
        instantaneous(t1, fin1, fout1, lrate1, stored1);
        flux_in += 0.5 * sim.dt * (fin0 + fin1);
        flux_out += 0.5 * sim.dt * (fout0 + fout1);
        loss += 0.5 * sim.dt * (lrate0 + lrate1);
        fin0 = fin1;
        fout0 = fout1;
        lrate0 = lrate1;
        record(t1, k + 1);
    }
    traj.final_state = st;
    traj.leaked = flux_out;
    return traj;
}

// L2 relative difference of the order-0 spinwaves of two final states; the
// second argument is the higher-truncation reference.
inline double truncation_check(const HOCState& coarse, const HOCState& reference) {
    if (coarse.grid.n_xi != reference.grid.n_xi)
        throw shape_error("truncation_check: states live on different grids");
    return rel_l2_diff(coarse.order0(), reference.order0(), reference.grid);
}

} // namespace stalight

#endif
