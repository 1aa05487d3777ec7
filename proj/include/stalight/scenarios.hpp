#ifndef STALIGHT_SCENARIOS_HPP
#define STALIGHT_SCENARIOS_HPP

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stalight/config.hpp"
#include "stalight/eit.hpp"
#include "stalight/hoc.hpp"
#include "stalight/io.hpp"
#include "stalight/mbe.hpp"
#include "stalight/parallel.hpp"
#include "stalight/phasematch.hpp"
#include "stalight/raman.hpp"
#include "stalight/spectra.hpp"

#ifndef STALIGHT_VERSION
#define STALIGHT_VERSION "v0.1.0"
#endif

namespace stalight {

namespace fs = std::filesystem;

struct Manifest {
    std::string version = STALIGHT_VERSION;
    std::string scenario;
    json config_echo;
    std::map<std::string, double> metrics;
    std::vector<std::pair<std::string, std::string>> files; // (name, fnv1a64)
    std::vector<std::string> warnings;

    json to_json() const {
        json j;
        j["version"] = version;
        j["scenario"] = scenario;
        j["config"] = config_echo;
        json m = json::object();
        for (const auto& [k, v] : metrics) m[k] = v;
        j["metrics"] = m;
        json f = json::array();
        for (const auto& [name, hash] : files) f.push_back({{"path", name}, {"fnv1a64", hash}});
        j["files"] = f;
        j["warnings"] = warnings;
        return j;
    }
};

namespace detail {

inline double param_number(const json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    if (!params.at(key).is_number())
        throw validation_error(std::string("scenario.parameters.") + key + ": expected a number");
    return params.at(key).get<double>();
}

inline int param_int(const json& params, const char* key, int fallback) {
    if (!params.contains(key)) return fallback;
    if (!params.at(key).is_number_integer())
        throw validation_error(std::string("scenario.parameters.") + key + ": expected an integer");
    return params.at(key).get<int>();
}

inline void check_params(const json& params, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : params.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw validation_error("scenario.parameters." + key + ": unknown parameter");
    }
}

inline carray gaussian(const Grid& g, double center, double sigma, complexd amp = 1.0) {
    carray s(static_cast<size_t>(g.n_xi));
    for (int i = 0; i < g.n_xi; ++i) {
        const double u = (g.xi(i) - center) / sigma;
        s[static_cast<size_t>(i)] = amp * std::exp(-0.5 * u * u);
    }
    return s;
}

// Switching schedule: value amp on [on, off] windows, zero elsewhere, with
// linear ramps of duration `ramp` at each edge (instantaneous switching is
// unphysical and spoils the second-order energy bookkeeping). Windows are
// clamped to t >= 0; empty windows disappear, so degenerate protocols
// (zero hold) collapse to the always-on schedule. A window starting at 0
// begins on the plateau.
inline PiecewiseSchedule gate_schedule(complexd amp, const std::vector<std::pair<double, double>>& windows,
                                       double ramp = 0.5) {
    std::vector<double> t;
    carray v;
    for (const auto& w : windows) {
        const double on = std::max(w.first, 0.0);
        const double off = w.second;
        if (off <= on) continue;
        if (off - on < ramp) throw range_error("gate_schedule: window shorter than the switching ramp");
        if (t.empty()) {
            if (on == 0.0) {
                t.push_back(0.0);
                v.push_back(amp);
            } else {
                t.push_back(0.0);
                v.push_back(0.0);
            }
        }
        if (on > t.back()) {
            if (t.back() > on - ramp) throw range_error("gate_schedule: windows closer than the switching ramp");
            t.push_back(on);
            v.push_back(0.0);
            t.push_back(on + ramp);
            v.push_back(amp);
        } else if (t.back() == on && std::abs(v.back()) == 0.0) {
            t.push_back(on + ramp);
            v.push_back(amp);
        }
        t.push_back(off);
        v.push_back(amp);
        t.push_back(off + ramp);
        v.push_back(0.0);
    }
    if (t.empty()) {
        t.push_back(0.0);
        v.push_back(0.0);
    }
    return PiecewiseSchedule(std::move(t), std::move(v), PiecewiseSchedule::Interp::linear);
}

class OutputDir {
public:
    OutputDir(fs::path dir, Manifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

    void add(const std::string& name) { manifest_.files.emplace_back(name, file_hash_hex(dir_ / name)); }

private:
    fs::path dir_;
    Manifest& manifest_;
};

inline int row_stride(size_t rows, size_t cap = 20000) {
    return rows <= cap ? 1 : static_cast<int>((rows + cap - 1) / cap);
}

inline void emit_trajectory_files(const Trajectory& traj, const Grid& g, OutputDir& out) {
    {
        CsvWriter w(out.path("spinwave.csv"), {"t", "xi", "re_s", "im_s", "abs2_s"});
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            const auto& s = traj.snapshots[k].s;
            for (int i = 0; i < g.n_xi; ++i)
                w.row({traj.times[k], g.xi(i), s[static_cast<size_t>(i)].real(), s[static_cast<size_t>(i)].imag(),
                       std::norm(s[static_cast<size_t>(i)])});
        }
        w.close();
        out.add("spinwave.csv");
    }
    {
        CsvWriter w(out.path("fields_boundary.csv"),
                    {"t", "re_e_plus_out", "im_e_plus_out", "abs2_e_plus_out", "re_e_minus_out", "im_e_minus_out",
                     "abs2_e_minus_out"});
        const int stride = row_stride(traj.boundary_out.size());
        for (size_t k = 0; k < traj.boundary_out.size(); k += static_cast<size_t>(stride)) {
            const auto& b = traj.boundary_out[k];
            w.row({b.t, b.e_plus_out.real(), b.e_plus_out.imag(), std::norm(b.e_plus_out), b.e_minus_out.real(),
                   b.e_minus_out.imag(), std::norm(b.e_minus_out)});
        }
        w.close();
        out.add("fields_boundary.csv");
    }
    {
        CsvWriter w(out.path("bookkeeping.csv"), {"t", "stored", "out", "loss", "closure_residual"});
        const int stride = row_stride(traj.bookkeeping.size());
        for (size_t k = 0; k < traj.bookkeeping.size(); k += static_cast<size_t>(stride)) {
            const auto& r = traj.bookkeeping[k];
            w.row({r.t, r.stored, r.flux_out, r.loss, r.closure_residual});
        }
        w.close();
        out.add("bookkeeping.csv");
    }
}

inline void emit_eit_moments(const Trajectory& traj, const Grid& g, OutputDir& out) {
    CsvWriter w(out.path("eit_moments.csv"), {"t", "centroid", "width_sq", "norm"});
    for (size_t k = 0; k < traj.snapshots.size(); ++k) {
        const EnvelopeMoments m = envelope_moments(traj.snapshots[k].s, g);
        w.row({traj.times[k], m.centroid, m.width_sq, m.norm});
    }
    w.close();
    out.add("eit_moments.csv");
}

inline double input_energy(const Trajectory& traj) {
    return traj.bookkeeping.empty() ? 0.0 : traj.bookkeeping.back().flux_in;
}

// ------------------------------------------------------------------
// individual scenario pipelines

inline void scenario_slow_light(const Config& cfg, OutputDir& out, Manifest& man) {
    check_params(cfg.scenario.parameters, {"pulse_center", "pulse_sigma", "pulse_amplitude", "stride"});
    const json& p = cfg.scenario.parameters;
    const double t0 = param_number(p, "pulse_center", 60.0);
    const double sig = param_number(p, "pulse_sigma", 21.0);
    const double amp = param_number(p, "pulse_amplitude", 1.0);
    const int stride = param_int(p, "stride", 50);

    BoundaryDrive drive;
    {
        std::vector<double> t;
        carray v;
        const int n = 200;
        for (int i = 0; i <= n; ++i) {
            const double tt = cfg.grid.t_final * i / n;
            t.push_back(tt);
            const double u = (tt - t0) / sig;
            v.push_back(amp * std::exp(-0.5 * u * u));
        }
        drive.env_plus = PiecewiseSchedule(std::move(t), std::move(v), PiecewiseSchedule::Interp::linear);
    }
    const Grid g = cfg.grid.space();
    Trajectory traj = run(cfg.ensemble, cfg.grid, cfg.controls, drive, FieldState::zero(g), stride);
    emit_trajectory_files(traj, g, out);
    emit_eit_moments(traj, g, out);

    const double ein = input_energy(traj);
    const double eout = traj.bookkeeping.back().flux_out;
    // centroid delay of the transmitted pulse against the input envelope
    double num = 0.0, den = 0.0;
    for (const auto& b : traj.boundary_out) {
        const double f = std::norm(b.e_plus_out);
        num += f * b.t;
        den += f;
    }
    const double out_centroid = den > 0 ? num / den : 0.0;
    man.metrics["transmitted_fraction"] = ein > 0 ? eout / ein : 0.0;
    man.metrics["delay"] = out_centroid - t0;
    man.metrics["expected_delay"] = cfg.ensemble.d * kGamma / std::norm(cfg.controls.omega_plus.value(0.0));
    man.metrics["max_closure_residual"] = traj.max_abs_closure();
}

inline void scenario_stored_light(const Config& cfg, OutputDir& out, Manifest& man) {
    check_params(cfg.scenario.parameters,
                 {"pulse_center", "pulse_sigma", "pulse_amplitude", "write_off", "hold_time", "stride"});
    const json& p = cfg.scenario.parameters;
    const double t0 = param_number(p, "pulse_center", 60.0);
    const double sig = param_number(p, "pulse_sigma", 21.0);
    const double amp = param_number(p, "pulse_amplitude", 1.0);
    const double write_off = param_number(p, "write_off", 80.0);
    const double hold = param_number(p, "hold_time", 50.0);
    const int stride = param_int(p, "stride", 50);
    const double recall_on = write_off + hold;

    const complexd w0 = cfg.controls.omega_plus.value(0.0);
    ControlSchedule ctrl = cfg.controls;
    ctrl.omega_plus = gate_schedule(w0, {{-1.0, write_off}, {recall_on, cfg.grid.t_final + 1.0}});
    ctrl.omega_minus = PiecewiseSchedule::constant(0.0);

    BoundaryDrive drive;
    {
        std::vector<double> t;
        carray v;
        const int n = 200;
        for (int i = 0; i <= n; ++i) {
            const double tt = cfg.grid.t_final * i / n;
            t.push_back(tt);
            const double u = (tt - t0) / sig;
            v.push_back(amp * std::exp(-0.5 * u * u));
        }
        drive.env_plus = PiecewiseSchedule(std::move(t), std::move(v), PiecewiseSchedule::Interp::linear);
    }
    const Grid g = cfg.grid.space();
    Trajectory traj = run(cfg.ensemble, cfg.grid, ctrl, drive, FieldState::zero(g), stride);
    emit_trajectory_files(traj, g, out);
    emit_eit_moments(traj, g, out);

    const double ein = input_energy(traj);
    man.metrics["recalled_fraction"] = ein > 0 ? traj.recalled_energy(recall_on, traj.t_final) / ein : 0.0;
    man.metrics["leaked_before_recall"] = ein > 0 ? traj.recalled_energy(0.0, recall_on) / ein : 0.0;
    double stored_at_recall = 0.0;
    for (const auto& r : traj.bookkeeping)
        if (r.t <= recall_on) stored_at_recall = r.stored;
    man.metrics["stored_at_recall"] = stored_at_recall;
    man.metrics["max_closure_residual"] = traj.max_abs_closure();
}

// Shared implementation for the two EIT SL hold scenarios: a stored spinwave
// is held dark, both controls gate on for the SL window, then a forward
// recall empties the memory.
inline void scenario_eit_sl(const Config& cfg, OutputDir& out, Manifest& man, bool two_colour) {
    check_params(cfg.scenario.parameters,
                 {"s0_center", "s0_sigma", "sl_on", "sl_off", "recall_on", "stride", "backward_detuning"});
    const json& p = cfg.scenario.parameters;
    const double c0 = param_number(p, "s0_center", 0.5);
    const double s0w = param_number(p, "s0_sigma", 0.08);
    const double sl_on = param_number(p, "sl_on", 5.0);
    const double sl_off = param_number(p, "sl_off", 10.0);
    const double recall_on = param_number(p, "recall_on", 15.0);
    const int stride = param_int(p, "stride", 20);
    if (!(sl_on < sl_off && sl_off <= recall_on))
        throw range_error("scenario.parameters: need sl_on < sl_off <= recall_on");

    const complexd wp = cfg.controls.omega_plus.value(0.0);
    const complexd wm = cfg.controls.omega_minus.value(0.0);
    ControlSchedule ctrl = cfg.controls;
    ctrl.omega_plus = gate_schedule(wp, {{sl_on, sl_off}, {recall_on, cfg.grid.t_final + 1.0}});
    ctrl.omega_minus = gate_schedule(wm, {{sl_on, sl_off}});
    if (two_colour) ctrl.delta_minus = param_number(p, "backward_detuning", 20.0);

    const Grid g = cfg.grid.space();
    FieldState init = FieldState::zero(g);
    init.s = gaussian(g, c0, s0w);
    Trajectory traj = run(cfg.ensemble, cfg.grid, ctrl, BoundaryDrive::none(), init, stride);
    emit_trajectory_files(traj, g, out);
    emit_eit_moments(traj, g, out);

    const double e0 = trapz_abs2(init.s, g);
    man.metrics["leaked_during_sl"] = traj.recalled_energy(sl_on, sl_off) / e0;
    man.metrics["recalled_fraction"] = traj.recalled_energy(recall_on, traj.t_final) / e0;
    man.metrics["max_closure_residual"] = traj.max_abs_closure();
}

inline void scenario_raman_sl(const Config& cfg, OutputDir& out, Manifest& man, bool antisymmetric) {
    check_params(cfg.scenario.parameters,
                 {"s0_centers", "s0_sigma", "stride", "mbe_check", "observe_points"});
    const json& p = cfg.scenario.parameters;
    const double s0w = param_number(p, "s0_sigma", 0.06);
    double c1 = 0.3, c2 = 0.7;
    if (p.contains("s0_centers")) {
        const json& c = p.at("s0_centers");
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
            throw validation_error("scenario.parameters.s0_centers: expected [c1, c2]");
        c1 = c[0].get<double>();
        c2 = c[1].get<double>();
    }
    const bool mbe_check = param_int(p, "mbe_check", 1) != 0;
    const int observe_points = param_int(p, "observe_points", 200);

    RamanParams params;
    params.omega = cfg.controls.omega_plus.value(0.0);
    params.delta = cfg.controls.delta_plus;
    params.gamma = cfg.ensemble.gamma;
    if (cfg.controls.delta_minus != -cfg.controls.delta_plus)
        throw validation_error("raman scenario: requires delta_minus == -delta_plus "
                               "(set scenario.name to a non-raman scenario for the general path)");
    if (std::abs(cfg.controls.omega_minus.value(0.0) - params.omega) > 0.0)
        throw validation_error("raman scenario: requires equal control drivings omega_plus == omega_minus");
    if (auto warn = params.validate()) man.warnings.push_back(*warn);

    const Grid g = cfg.grid.space();
    carray s0(static_cast<size_t>(g.n_xi));
    {
        const carray ga = gaussian(g, c1, s0w);
        const carray gb = gaussian(g, c2, s0w);
        const double sign = antisymmetric ? -1.0 : 1.0;
        for (size_t i = 0; i < s0.size(); ++i) s0[i] = ga[i] + sign * gb[i];
    }

    const double d = cfg.ensemble.d;
    const double t_final = cfg.grid.t_final;
    darray times, uniform_abs, stationary_norm;
    double leak_energy = 0.0;
    double last_t = 0.0;
    const double observe_dt = t_final / observe_points;
    double next_observe = 0.0;
    auto observer = [&](double t, const carray& s) {
        auto [ep, em] = probe_fields_from_spinwave(s, d, params, g, cfg.controls.mismatch);
        const double flux = std::norm(ep.back()) + std::norm(em.front());
        leak_energy += flux * (t - last_t);
        last_t = t;
        if (t + 1e-12 >= next_observe) {
            const SpinwaveDecomposition dec = decompose(s, g);
            times.push_back(t);
            uniform_abs.push_back(std::abs(dec.uniform));
            stationary_norm.push_back(l2_norm(dec.stationary, g));
            next_observe += observe_dt;
        }
    };
    carray s_final =
        evolve_raman_numeric(s0, d, kGamma, params, t_final, cfg.controls.mismatch, observer);

    const double expected_rate = params.sl_rate(d) + params.gamma;
    double fitted = 0.0;
    if (uniform_abs.front() > 1e-12) {
        darray tt, uu;
        for (size_t i = 0; i < times.size(); ++i) {
            if (uniform_abs[i] > uniform_abs.front() * 1e-3) {
                tt.push_back(times[i]);
                uu.push_back(uniform_abs[i]);
            }
        }
        if (tt.size() >= 2) fitted = fitted_decay_rate(tt, uu);
    }
    {
        CsvWriter w(out.path("raman_components.csv"), {"t", "abs_uniform", "norm_stationary", "fitted_rate"});
        for (size_t i = 0; i < times.size(); ++i) w.row({times[i], uniform_abs[i], stationary_norm[i], fitted});
        w.close();
        out.add("raman_components.csv");
    }

    const double e0 = trapz_abs2(s0, g);
    man.metrics["leaked_fraction"] = leak_energy / e0;
    man.metrics["fitted_uniform_rate"] = fitted;
    man.metrics["expected_uniform_rate"] = expected_rate;
    man.metrics["final_rel_change"] = rel_l2_diff(s_final, s0, g);

    if (mbe_check) {
        // full model in the lab frame; spinwave prepared with the inverse
        // rotating-frame phase so it maps onto s0
        FieldState init = FieldState::zero(g);
        for (int i = 0; i < g.n_xi; ++i)
            init.s[static_cast<size_t>(i)] =
                s0[static_cast<size_t>(i)] * std::polar(1.0, d * kGamma * g.xi(i) / params.delta);
        ControlSchedule ctrl = cfg.controls;
        Trajectory traj = run(cfg.ensemble, cfg.grid, ctrl, BoundaryDrive::none(), init,
                              std::max(1, static_cast<int>(t_final / cfg.grid.dt / 100)));
        emit_trajectory_files(traj, g, out);
        const FieldState mapped = raman_frame_from_mbe(traj.final_state, d, params.delta);
        man.metrics["mbe_final_rel_change"] = rel_l2_diff(mapped.s, s0, g);
        man.metrics["max_closure_residual"] = traj.max_abs_closure();
    }
}

inline void scenario_hoc_degenerate(const Config& cfg, OutputDir& out, Manifest& man) {
    check_params(cfg.scenario.parameters, {"s0_center", "s0_sigma", "n_max", "exponent", "stride"});
    const json& p = cfg.scenario.parameters;
    const double c0 = param_number(p, "s0_center", 0.2);
    const double s0w = param_number(p, "s0_sigma", 0.06);
    const int n_max = param_int(p, "n_max", 4);
    const int stride = param_int(p, "stride", 10);
    if (n_max < 1) throw range_error("scenario.parameters.n_max: must be >= 1");
    HOCDecayModel decay{cfg.ensemble.gamma_motion, param_int(p, "exponent", 2)};
    decay.validate();

    const Grid g = cfg.grid.space();
    const carray s0 = gaussian(g, c0, s0w);
    const double e0 = trapz_abs2(s0, g);

    const HOCState init = HOCState::from_spinwave(s0, n_max);
    HOCTrajectory traj = run_hoc(cfg.ensemble, cfg.grid, cfg.controls, decay, BoundaryDrive::none(), init, stride);

    // secular reference: same grid/controls through the mbe path
    FieldState sec_init = FieldState::zero(g);
    sec_init.s = s0;
    Trajectory sec = run(cfg.ensemble, cfg.grid, cfg.controls, BoundaryDrive::none(), sec_init, stride);

    // truncation certificate at n_max + 1
    const HOCState init_hi = HOCState::from_spinwave(s0, n_max + 1);
    HOCTrajectory traj_hi =
        run_hoc(cfg.ensemble, cfg.grid, cfg.controls, decay, BoundaryDrive::none(), init_hi, stride);

    {
        std::vector<std::string> header = {"t"};
        for (int q = -2 * n_max; q <= 2 * n_max; q += 2) header.push_back("norm_s" + std::to_string(q));
        CsvWriter w(out.path("hoc_orders.csv"), header);
        for (size_t k = 0; k < traj.times.size(); ++k) {
            std::vector<double> row = {traj.times[k]};
            for (int q = -2 * n_max; q <= 2 * n_max; q += 2) row.push_back(traj.order_norms[k].at(q));
            w.row(row);
        }
        w.close();
        out.add("hoc_orders.csv");
    }
    {
        CsvWriter w(out.path("bookkeeping.csv"), {"t", "stored", "out", "loss", "closure_residual"});
        const int rs = row_stride(traj.bookkeeping.size());
        for (size_t k = 0; k < traj.bookkeeping.size(); k += static_cast<size_t>(rs)) {
            const auto& r = traj.bookkeeping[k];
            w.row({r.t, r.stored, r.flux_out, r.loss, r.closure_residual});
        }
        w.close();
        out.add("bookkeeping.csv");
    }

    const double leak_sec = sec.bookkeeping.back().flux_out;
    man.metrics["leaked_fraction"] = traj.leaked / e0;
    man.metrics["secular_leaked_fraction"] = leak_sec / e0;
    man.metrics["leak_ratio_vs_secular"] = leak_sec > 0 ? traj.leaked / leak_sec : 0.0;
    man.metrics["truncation_check"] = truncation_check(traj.final_state, traj_hi.final_state);
    man.metrics["max_closure_residual"] = traj.max_abs_closure();
}

inline void scenario_bandgap_scan(const Config& cfg, OutputDir& out, Manifest& man) {
    check_params(cfg.scenario.parameters, {"delta_span", "delta_points", "svg"});
    const json& p = cfg.scenario.parameters;
    const double span = param_number(p, "delta_span", 0.0);
    const int npts = param_int(p, "delta_points", 2001);
    if (npts < 9) throw range_error("scenario.parameters.delta_points: must be >= 9");
    const complexd wp = cfg.controls.omega_plus.value(0.0);
    const complexd wm = cfg.controls.omega_minus.value(0.0);

    darray grid;
    if (span > 0.0) {
        grid.resize(static_cast<size_t>(npts));
        for (int i = 0; i < npts; ++i) grid[static_cast<size_t>(i)] = -span + 2.0 * span * i / (npts - 1);
    } else {
        grid = default_delta_grid(cfg.ensemble.d, wp, wm, npts);
    }
    SpectrumResult spec = steady_state_response(cfg.ensemble, cfg.controls, grid);

    {
        CsvWriter w(out.path("spectrum.csv"), {"delta", "T", "R", "absorbed"});
        for (size_t i = 0; i < grid.size(); ++i)
            w.row({grid[i], spec.T[i], spec.R[i], 1.0 - spec.T[i] - spec.R[i]});
        w.close();
        out.add("spectrum.csv");
    }
    if (param_int(p, "svg", 1) != 0) {
        write_svg_lines(out.path("spectrum.svg"), grid,
                        {{"T", spec.T}, {"R", spec.R}}, "transmission / reflection");
        out.add("spectrum.svg");
    }

    size_t i0 = 0;
    for (size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i]) < std::abs(grid[i0])) i0 = i;
    man.metrics["T0"] = spec.T[i0];
    man.metrics["R0"] = spec.R[i0];
    // most prominent off-resonance local maximum
    double peak_T = 0.0, peak_delta = 0.0;
    for (size_t i = 2; i + 2 < spec.T.size(); ++i) {
        if (spec.T[i] > spec.T[i - 1] && spec.T[i] > spec.T[i + 1] && spec.T[i] > spec.T[i - 2] &&
            spec.T[i] > spec.T[i + 2] && std::abs(grid[i]) > 1e-9 && spec.T[i] > peak_T) {
            peak_T = spec.T[i];
            peak_delta = grid[i];
        }
    }
    man.metrics["peak_T"] = peak_T;
    man.metrics["peak_delta"] = peak_delta;
    man.metrics["regularized_points"] = spec.regularized_points;
    double worst = 0.0;
    for (size_t i = 0; i < spec.T.size(); ++i) worst = std::max(worst, spec.T[i] + spec.R[i] - 1.0);
    man.metrics["max_T_plus_R_minus_1"] = worst;
}

inline void scenario_eit_width_scan(const Config& cfg, OutputDir& out, Manifest& man) {
    check_params(cfg.scenario.parameters, {"delta_span", "delta_points", "svg"});
    const json& p = cfg.scenario.parameters;
    const int npts = param_int(p, "delta_points", 4001);
    const double span = param_number(p, "delta_span", 0.0);
    const complexd wp = cfg.controls.omega_plus.value(0.0);
    if (std::abs(cfg.controls.omega_minus.value(0.0)) != 0.0)
        throw validation_error("eit-width-scan: requires omega_minus == 0");

    darray grid;
    if (span > 0.0) {
        grid.resize(static_cast<size_t>(npts));
        for (int i = 0; i < npts; ++i) grid[static_cast<size_t>(i)] = -span + 2.0 * span * i / (npts - 1);
    } else {
        // resolve the window: span at 4x the formula estimate
        const double est = std::norm(wp) / (kGamma * std::sqrt(cfg.ensemble.d));
        grid.resize(static_cast<size_t>(npts));
        for (int i = 0; i < npts; ++i) grid[static_cast<size_t>(i)] = (-4.0 + 8.0 * i / (npts - 1)) * est;
    }
    SpectrumResult spec = steady_state_response(cfg.ensemble, cfg.controls, grid);
    {
        CsvWriter w(out.path("spectrum.csv"), {"delta", "T", "R", "absorbed"});
        for (size_t i = 0; i < grid.size(); ++i)
            w.row({grid[i], spec.T[i], spec.R[i], 1.0 - spec.T[i] - spec.R[i]});
        w.close();
        out.add("spectrum.csv");
    }
    if (param_int(p, "svg", 1) != 0) {
        write_svg_lines(out.path("spectrum.svg"), grid, {{"T", spec.T}}, "EIT window");
        out.add("spectrum.svg");
    }
    const double fwhm = eit_window_width(spec);
    const double est = std::norm(wp) / (kGamma * std::sqrt(cfg.ensemble.d));
    man.metrics["fwhm"] = fwhm;
    man.metrics["fwhm_over_estimate"] = fwhm / est;
}

inline void scenario_mismatch_sweep(const Config& cfg, OutputDir& out, Manifest& man) {
    check_params(cfg.scenario.parameters,
                 {"max_mismatch", "n_points", "hold_time", "s0_sigma", "raman_omega", "raman_delta"});
    const json& p = cfg.scenario.parameters;
    const double dk_max = param_number(p, "max_mismatch", 3.0);
    const int n_points = param_int(p, "n_points", 7);
    const double hold = param_number(p, "hold_time", 10.0);
    const double s0w = param_number(p, "s0_sigma", 0.08);
    if (n_points < 3 || n_points % 2 == 0)
        throw range_error("scenario.parameters.n_points: must be odd and >= 3");

    const Grid g = cfg.grid.space();
    const double d = cfg.ensemble.d;

    // EIT-SL leg: balanced resonant hold of a stored Gaussian
    FieldState init = FieldState::zero(g);
    init.s = gaussian(g, 0.5, s0w);
    const double e0 = trapz_abs2(init.s, g);

    // Raman leg: antisymmetric pair, stationary when matched
    RamanParams rp;
    rp.omega = param_number(p, "raman_omega", 1.0);
    rp.delta = param_number(p, "raman_delta", 50.0);
    rp.gamma = 0.0;
    carray s0r(static_cast<size_t>(g.n_xi));
    {
        const carray ga = gaussian(g, 0.3, 0.06);
        const carray gb = gaussian(g, 0.7, 0.06);
        for (size_t i = 0; i < s0r.size(); ++i) s0r[i] = ga[i] - gb[i];
    }
    const double e0r = trapz_abs2(s0r, g);

    CsvWriter w(out.path("mismatch_sweep.csv"), {"delta_k", "leak_eit", "leak_raman"});
    darray dks, leak_eit(static_cast<size_t>(n_points)), leak_raman(static_cast<size_t>(n_points));
    for (int i = 0; i < n_points; ++i) dks.push_back(-dk_max + 2.0 * dk_max * i / (n_points - 1));

    SimulationGrid sg = cfg.grid;
    sg.t_final = hold;
    for (int i = 0; i < n_points; ++i) {
        ControlSchedule ctrl = apply_mismatch(cfg.controls, dks[static_cast<size_t>(i)]);
        Trajectory traj = run(cfg.ensemble, sg, ctrl, BoundaryDrive::none(), init, 1000000);
        leak_eit[static_cast<size_t>(i)] = traj.bookkeeping.back().flux_out / e0;

        double leak = 0.0, last_t = 0.0;
        auto observer = [&](double t, const carray& s) {
            auto [epr, emr] = probe_fields_from_spinwave(s, d, rp, g, dks[static_cast<size_t>(i)]);
            leak += (std::norm(epr.back()) + std::norm(emr.front())) * (t - last_t);
            last_t = t;
        };
        evolve_raman_numeric(s0r, d, kGamma, rp, hold, dks[static_cast<size_t>(i)], observer);
        leak_raman[static_cast<size_t>(i)] = leak / e0r;
        w.row({dks[static_cast<size_t>(i)], leak_eit[static_cast<size_t>(i)], leak_raman[static_cast<size_t>(i)]});
    }
    w.close();
    out.add("mismatch_sweep.csv");

    double even_resid = 0.0, mono_viol = 0.0;
    const int mid = n_points / 2;
    for (int i = 0; i < mid; ++i) {
        even_resid = std::max(even_resid,
                              std::abs(leak_eit[static_cast<size_t>(i)] - leak_eit[static_cast<size_t>(n_points - 1 - i)]) /
                                  std::max(leak_eit[static_cast<size_t>(i)], 1e-12));
        even_resid = std::max(even_resid, std::abs(leak_raman[static_cast<size_t>(i)] -
                                                   leak_raman[static_cast<size_t>(n_points - 1 - i)]) /
                                              std::max(leak_raman[static_cast<size_t>(i)], 1e-12));
    }
    for (int i = mid; i + 1 < n_points; ++i) {
        mono_viol = std::max(mono_viol, leak_eit[static_cast<size_t>(i)] - leak_eit[static_cast<size_t>(i + 1)]);
        mono_viol = std::max(mono_viol, leak_raman[static_cast<size_t>(i)] - leak_raman[static_cast<size_t>(i + 1)]);
    }
    man.metrics["evenness_residual"] = even_resid;
    man.metrics["monotonicity_violation"] = mono_viol;
    man.metrics["leak_eit_matched"] = leak_eit[static_cast<size_t>(mid)];
    man.metrics["leak_eit_max"] = *std::max_element(leak_eit.begin(), leak_eit.end());
    man.metrics["leak_raman_matched"] = leak_raman[static_cast<size_t>(mid)];
    man.metrics["leak_raman_max"] = *std::max_element(leak_raman.begin(), leak_raman.end());
}

} // namespace detail

// Built-in preset configuration for each scenario.
inline Config preset_config(const std::string& name) {
    Config cfg;
    cfg.scenario.name = name;
    cfg.scenario.parameters = json::object();
    if (name == "slow-light") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.01, 250.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
    } else if (name == "stored-light") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.01, 280.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
    } else if (name == "eit-sl-single-colour" || name == "eit-sl-two-colour") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.01, 30.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
        cfg.controls.omega_minus = PiecewiseSchedule::constant(1.0);
    } else if (name == "raman-sl-antisymmetric") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.001, 100.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(0.4);
        cfg.controls.omega_minus = PiecewiseSchedule::constant(0.4);
        cfg.controls.delta_plus = 50.0;
        cfg.controls.delta_minus = -50.0;
    } else if (name == "raman-sl-symmetric") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.001, 100.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
        cfg.controls.omega_minus = PiecewiseSchedule::constant(1.0);
        cfg.controls.delta_plus = 50.0;
        cfg.controls.delta_minus = -50.0;
    } else if (name == "hoc-degenerate") {
        cfg.ensemble = {50.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.01, 8.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
        cfg.controls.omega_minus = PiecewiseSchedule::constant(1.0);
    } else if (name == "bandgap-scan") {
        cfg.ensemble = {200.0, 1e-4, 0.0, 0.0};
        cfg.grid = {257, 0.002, 1.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
        cfg.controls.omega_minus = PiecewiseSchedule::constant(1.0);
        cfg.controls.delta_plus = 50.0;
        cfg.controls.delta_minus = -50.0;
        cfg.scenario.parameters["delta_span"] = 2.0;
    } else if (name == "eit-width-scan") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.01, 1.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
    } else if (name == "mismatch-sweep") {
        cfg.ensemble = {100.0, 0.0, 0.0, 0.0};
        cfg.grid = {257, 0.01, 10.0};
        cfg.controls.omega_plus = PiecewiseSchedule::constant(1.0);
        cfg.controls.omega_minus = PiecewiseSchedule::constant(1.0);
    } else {
        std::string msg = "unknown scenario \"" + name + "\"; supported:";
        for (const auto& n : scenario_names()) msg += " " + n;
        throw validation_error(msg);
    }
    return cfg;
}

inline std::string preset_summary(const std::string& name) {
    static const std::map<std::string, std::string> text = {
        {"slow-light", "EIT slow-light transit of a Gaussian probe pulse"},
        {"stored-light", "write / hold / recall memory protocol"},
        {"eit-sl-single-colour", "stored spinwave held by balanced resonant counterpropagating controls"},
        {"eit-sl-two-colour", "as single-colour but with a detuned backward control"},
        {"raman-sl-antisymmetric", "zero-mean spinwave under far-detuned counterpropagating controls"},
        {"raman-sl-symmetric", "nonzero-mean spinwave relaxing to the stationary configuration"},
        {"hoc-degenerate", "degenerate-control hold with the higher-order coherence ladder"},
        {"bandgap-scan", "transmission/reflection spectrum across the stationary-light bandgap"},
        {"eit-width-scan", "transparency window width measurement"},
        {"mismatch-sweep", "stationary-light leakage versus longitudinal phase mismatch"},
    };
    return text.at(name);
}

// Execute one scenario, writing CSV/SVG outputs and manifest.json.
inline Manifest run_scenario(const Config& cfg, const fs::path& out_dir) {
    Manifest man;
    man.scenario = cfg.scenario.name;
    man.config_echo = serialize_config(cfg);
    detail::OutputDir out(out_dir, man);

    try {
        const std::string& n = cfg.scenario.name;
        if (n == "slow-light")
            detail::scenario_slow_light(cfg, out, man);
        else if (n == "stored-light")
            detail::scenario_stored_light(cfg, out, man);
        else if (n == "eit-sl-single-colour")
            detail::scenario_eit_sl(cfg, out, man, false);
        else if (n == "eit-sl-two-colour")
            detail::scenario_eit_sl(cfg, out, man, true);
        else if (n == "raman-sl-antisymmetric")
            detail::scenario_raman_sl(cfg, out, man, true);
        else if (n == "raman-sl-symmetric")
            detail::scenario_raman_sl(cfg, out, man, false);
        else if (n == "hoc-degenerate")
            detail::scenario_hoc_degenerate(cfg, out, man);
        else if (n == "bandgap-scan")
            detail::scenario_bandgap_scan(cfg, out, man);
        else if (n == "eit-width-scan")
            detail::scenario_eit_width_scan(cfg, out, man);
        else if (n == "mismatch-sweep")
            detail::scenario_mismatch_sweep(cfg, out, man);
        else
            throw validation_error("scenario.name: unknown scenario \"" + n + "\"");
    } catch (const error& e) {
        throw; // module errors propagate with their own context
    }

    std::ofstream mf(out.path("manifest.json"), std::ios::binary | std::ios::trunc);
    if (!mf) throw error("cannot write manifest.json");
    mf << man.to_json().dump(2) << "\n";
    mf.close();
    return man;
}

// Run the scenario once per value of the dotted config path, aggregating the
// summary metrics into sweep.csv. Failing points are recorded with an error
// tag and the sweep continues. Points execute on a bounded worker pool;
// the output row order always matches the input order.
inline void sweep(const Config& base, const std::string& param_path, const darray& values, int jobs,
                  const fs::path& out_dir) {
    json base_doc = serialize_config(base);

    // resolve the dotted path: all parents must exist; the leaf must exist
    // already unless it lives under scenario.parameters
    std::vector<std::string> segs;
    {
        std::string cur;
        for (char c : param_path) {
            if (c == '.') {
                segs.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        segs.push_back(cur);
    }
    if (segs.empty() || segs.front().empty())
        throw validation_error("sweep: empty parameter path");
    {
        json* node = &base_doc;
        for (size_t i = 0; i + 1 < segs.size(); ++i) {
            if (!node->contains(segs[i]) || !(*node)[segs[i]].is_object())
                throw validation_error("sweep: parameter path \"" + param_path + "\" does not resolve at \"" +
                                       segs[i] + "\"");
            node = &(*node)[segs[i]];
        }
        const bool open_schema = segs.size() >= 2 && segs[segs.size() - 2] == "parameters";
        if (!node->contains(segs.back()) && !open_schema)
            throw validation_error("sweep: parameter path \"" + param_path + "\" does not resolve at \"" +
                                   segs.back() + "\"");
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw error("cannot create output directory " + out_dir.string());

    struct PointResult {
        bool ok = false;
        std::string error_tag;
        std::map<std::string, double> metrics;
    };
    std::vector<PointResult> results(values.size());

    parallel_for(
        static_cast<int>(values.size()),
        [&](int i) {
            json doc = base_doc;
            json* node = &doc;
            for (size_t k = 0; k + 1 < segs.size(); ++k) node = &(*node)[segs[k]];
            (*node)[segs.back()] = values[static_cast<size_t>(i)];
            char dirname[32];
            std::snprintf(dirname, sizeof(dirname), "point_%03d", i);
            try {
                const Config cfg = parse_config_json(doc);
                const Manifest man = run_scenario(cfg, out_dir / dirname);
                results[static_cast<size_t>(i)].ok = true;
                results[static_cast<size_t>(i)].metrics = man.metrics;
            } catch (const std::exception& e) {
                results[static_cast<size_t>(i)].error_tag = e.what();
            }
        },
        jobs);

    std::set<std::string> keys;
    for (const auto& r : results)
        for (const auto& [k, v] : r.metrics) keys.insert(k);

    std::vector<std::string> header = {"index", "value", "error"};
    for (const auto& k : keys) header.push_back(k);
    CsvWriter w(out_dir / "sweep.csv", header);
    for (size_t i = 0; i < values.size(); ++i) {
        std::vector<std::string> cells = {std::to_string(i), fmt_double(values[i])};
        std::string tag = results[i].error_tag;
        for (auto& c : tag)
            if (c == ',' || c == '\n') c = ';';
        cells.push_back(results[i].ok ? "" : tag);
        for (const auto& k : keys) {
            auto it = results[i].metrics.find(k);
            cells.push_back(it == results[i].metrics.end() ? "" : fmt_double(it->second));
        }
        w.raw_row(cells);
    }
    w.close();
}

} // namespace stalight

#endif
