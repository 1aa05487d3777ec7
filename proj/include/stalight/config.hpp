#ifndef STALIGHT_CONFIG_HPP
#define STALIGHT_CONFIG_HPP

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "stalight/schedule.hpp"
#include "stalight/types.hpp"

namespace stalight {

using json = nlohmann::json;

// Closed set of scenario names understood by the pipeline layer.
inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "slow-light",          "stored-light",       "eit-sl-single-colour", "eit-sl-two-colour",
        "raman-sl-antisymmetric", "raman-sl-symmetric", "hoc-degenerate",      "bandgap-scan",
        "eit-width-scan",      "mismatch-sweep",
    };
    return names;
}

struct ScenarioDescriptor {
    std::string name = "slow-light";
    json parameters = json::object();

    bool operator==(const ScenarioDescriptor&) const = default;
};

struct Config {
    EnsembleConfig ensemble;
    SimulationGrid grid;
    ControlSchedule controls;
    ScenarioDescriptor scenario;
};

inline bool operator==(const PiecewiseSchedule& a, const PiecewiseSchedule& b) {
    return a.times() == b.times() && a.values() == b.values() &&
           (a.times().size() < 2 || a.interp() == b.interp());
}

inline bool operator==(const ControlSchedule& a, const ControlSchedule& b) {
    return a.omega_plus == b.omega_plus && a.omega_minus == b.omega_minus && a.delta_plus == b.delta_plus &&
           a.delta_minus == b.delta_minus && a.two_photon_delta == b.two_photon_delta && a.mismatch == b.mismatch;
}

inline bool operator==(const Config& a, const Config& b) {
    return a.ensemble.d == b.ensemble.d && a.ensemble.gamma == b.ensemble.gamma &&
           a.ensemble.gamma_motion == b.ensemble.gamma_motion && a.ensemble.l_over_c == b.ensemble.l_over_c &&
           a.grid.n_xi == b.grid.n_xi && a.grid.dt == b.grid.dt && a.grid.t_final == b.grid.t_final &&
           a.controls == b.controls && a.scenario == b.scenario;
}

namespace detail {

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw validation_error(path + ": expected an object");
}

inline void reject_unknown_keys(const json& j, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw validation_error(path + "." + key + ": unknown key");
    }
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw validation_error(path + ": expected a number");
    return j.get<double>();
}

inline double opt_number(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj.at(key), path + "." + key);
}

inline PiecewiseSchedule parse_control(const json& j, const std::string& path) {
    if (j.is_number()) return PiecewiseSchedule::constant(j.get<double>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return PiecewiseSchedule::constant(complexd(j[0].get<double>(), j[1].get<double>()));

    json bp = j;
    PiecewiseSchedule::Interp interp = PiecewiseSchedule::Interp::linear;
    if (j.is_object()) {
        reject_unknown_keys(j, path, {"breakpoints", "interp"});
        if (!j.contains("breakpoints")) throw validation_error(path + ".breakpoints: missing");
        bp = j.at("breakpoints");
        if (j.contains("interp")) {
            const std::string s = j.at("interp").is_string() ? j.at("interp").get<std::string>() : "";
            if (s == "hold")
                interp = PiecewiseSchedule::Interp::hold;
            else if (s == "linear")
                interp = PiecewiseSchedule::Interp::linear;
            else
                throw validation_error(path + ".interp: expected \"hold\" or \"linear\"");
        }
    }
    if (!bp.is_array()) throw validation_error(path + ": expected number, [re, im], breakpoint list or object");
    std::vector<double> times;
    carray values;
    for (const auto& row : bp) {
        if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() || !row[2].is_number())
            throw validation_error(path + ": breakpoints must be [t, re, im] triples");
        times.push_back(row[0].get<double>());
        values.emplace_back(row[1].get<double>(), row[2].get<double>());
    }
    if (times.empty()) throw validation_error(path + ": breakpoint list must be non-empty");
    try {
        return PiecewiseSchedule(std::move(times), std::move(values), interp);
    } catch (const shape_error& e) {
        throw validation_error(path + ": " + e.what());
    } catch (const range_error& e) {
        throw range_error(path + ": " + e.what());
    }
}

inline json control_to_json(const PiecewiseSchedule& s) {
    if (s.times().size() <= 1) {
        const complexd v = s.empty() ? complexd(0.0) : s.values().front();
        if (v.imag() == 0.0) return json(v.real());
        return json::array({v.real(), v.imag()});
    }
    json bp = json::array();
    for (size_t i = 0; i < s.times().size(); ++i)
        bp.push_back(json::array({s.times()[i], s.values()[i].real(), s.values()[i].imag()}));
    json out = json::object();
    out["breakpoints"] = bp;
    out["interp"] = s.interp() == PiecewiseSchedule::Interp::hold ? "hold" : "linear";
    return out;
}

} // namespace detail

// Parse and fully validate a configuration document. Schema violations name
// the offending key; invariant violations surface as range errors.
inline Config parse_config_json(const json& doc) {
    using namespace detail;
    require_object(doc, "config");
    reject_unknown_keys(doc, "config", {"grid", "ensemble", "controls", "scenario"});

    Config cfg;
    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        require_object(g, "grid");
        reject_unknown_keys(g, "grid", {"n_xi", "dt", "t_final"});
        if (g.contains("n_xi")) {
            if (!g.at("n_xi").is_number_integer()) throw validation_error("grid.n_xi: expected an integer");
            cfg.grid.n_xi = g.at("n_xi").get<int>();
        }
        cfg.grid.dt = opt_number(g, "dt", "grid", cfg.grid.dt);
        cfg.grid.t_final = opt_number(g, "t_final", "grid", cfg.grid.t_final);
    }
    cfg.grid.validate();

    if (doc.contains("ensemble")) {
        const json& e = doc.at("ensemble");
        require_object(e, "ensemble");
        reject_unknown_keys(e, "ensemble", {"d", "gamma", "gamma_motion", "l_over_c"});
        cfg.ensemble.d = opt_number(e, "d", "ensemble", cfg.ensemble.d);
        cfg.ensemble.gamma = opt_number(e, "gamma", "ensemble", cfg.ensemble.gamma);
        cfg.ensemble.gamma_motion = opt_number(e, "gamma_motion", "ensemble", cfg.ensemble.gamma_motion);
        cfg.ensemble.l_over_c = opt_number(e, "l_over_c", "ensemble", cfg.ensemble.l_over_c);
    }
    cfg.ensemble.validate();

    if (doc.contains("controls")) {
        const json& c = doc.at("controls");
        require_object(c, "controls");
        reject_unknown_keys(
            c, "controls", {"omega_plus", "omega_minus", "delta_plus", "delta_minus", "two_photon_delta", "mismatch"});
        if (c.contains("omega_plus")) cfg.controls.omega_plus = parse_control(c.at("omega_plus"), "controls.omega_plus");
        if (c.contains("omega_minus"))
            cfg.controls.omega_minus = parse_control(c.at("omega_minus"), "controls.omega_minus");
        cfg.controls.delta_plus = opt_number(c, "delta_plus", "controls", 0.0);
        cfg.controls.delta_minus = opt_number(c, "delta_minus", "controls", 0.0);
        cfg.controls.two_photon_delta = opt_number(c, "two_photon_delta", "controls", 0.0);
        cfg.controls.mismatch = opt_number(c, "mismatch", "controls", 0.0);
        for (double v : {cfg.controls.delta_plus, cfg.controls.delta_minus, cfg.controls.two_photon_delta,
                         cfg.controls.mismatch})
            if (!std::isfinite(v)) throw range_error("controls: detunings and mismatch must be finite");
    }

    if (doc.contains("scenario")) {
        const json& s = doc.at("scenario");
        require_object(s, "scenario");
        reject_unknown_keys(s, "scenario", {"name", "parameters"});
        if (s.contains("name")) {
            if (!s.at("name").is_string()) throw validation_error("scenario.name: expected a string");
            cfg.scenario.name = s.at("name").get<std::string>();
        }
        if (s.contains("parameters")) {
            if (!s.at("parameters").is_object()) throw validation_error("scenario.parameters: expected an object");
            cfg.scenario.parameters = s.at("parameters");
        }
    }
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), cfg.scenario.name) == names.end()) {
        std::string msg = "scenario.name: unknown scenario \"" + cfg.scenario.name + "\"; supported:";
        for (const auto& n : names) msg += " " + n;
        throw validation_error(msg);
    }
    return cfg;
}

inline Config parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config_json(doc);
}

inline json serialize_config(const Config& cfg) {
    json doc;
    doc["grid"] = {{"n_xi", cfg.grid.n_xi}, {"dt", cfg.grid.dt}, {"t_final", cfg.grid.t_final}};
    doc["ensemble"] = {{"d", cfg.ensemble.d},
                       {"gamma", cfg.ensemble.gamma},
                       {"gamma_motion", cfg.ensemble.gamma_motion},
                       {"l_over_c", cfg.ensemble.l_over_c}};
    doc["controls"] = {{"omega_plus", detail::control_to_json(cfg.controls.omega_plus)},
                       {"omega_minus", detail::control_to_json(cfg.controls.omega_minus)},
                       {"delta_plus", cfg.controls.delta_plus},
                       {"delta_minus", cfg.controls.delta_minus},
                       {"two_photon_delta", cfg.controls.two_photon_delta},
                       {"mismatch", cfg.controls.mismatch}};
    doc["scenario"] = {{"name", cfg.scenario.name}, {"parameters", cfg.scenario.parameters}};
    return doc;
}

} // namespace stalight

#endif
