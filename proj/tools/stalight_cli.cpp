#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "stalight/stalight.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDiverged = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw stalight::error("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

stalight::darray parse_values_list(const std::string& list) {
    stalight::darray values;
    std::string cur;
    std::istringstream ss(list);
    while (std::getline(ss, cur, ',')) {
        if (cur.empty()) continue;
        size_t pos = 0;
        double v;
        try {
            v = std::stod(cur, &pos);
        } catch (const std::exception&) {
            throw stalight::validation_error("--values: \"" + cur + "\" is not a number");
        }
        if (pos != cur.size()) throw stalight::validation_error("--values: \"" + cur + "\" is not a number");
        values.push_back(v);
    }
    return values;
}

void print_metrics(const stalight::Manifest& man) {
    std::cout << "scenario: " << man.scenario << "\n";
    for (const auto& w : man.warnings) std::cout << "warning: " << w << "\n";
    for (const auto& [k, v] : man.metrics) std::cout << "  " << k << " = " << stalight::fmt_double(v) << "\n";
    std::cout << "files: " << man.files.size() << " (see manifest.json)\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stalight - 1D semiclassical stationary-light simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, param_path, values_list;
    int jobs = 0;

    auto* run_cmd = app.add_subcommand("run", "run the scenario named in the config");
    run_cmd->add_option("--config", config_path, "configuration JSON file")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* scan_cmd = app.add_subcommand("scan", "run a frequency-domain scan scenario");
    scan_cmd->add_option("--config", config_path, "configuration JSON file")->required();
    scan_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one config parameter across a value list");
    sweep_cmd->add_option("--config", config_path, "configuration JSON file")->required();
    sweep_cmd->add_option("--param", param_path, "dotted config path, e.g. ensemble.gamma_motion")->required();
    sweep_cmd->add_option("--values", values_list, "comma-separated values")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker pool size (default: STALIGHT_THREADS or hardware)");
    sweep_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* presets_cmd = app.add_subcommand("presets", "preset utilities");
    auto* presets_list = presets_cmd->add_subcommand("list", "list built-in scenario presets");
    presets_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (presets_list->parsed()) {
            for (const auto& name : stalight::scenario_names()) {
                std::cout << name << "\n    " << stalight::preset_summary(name) << "\n";
                const auto cfg = stalight::preset_config(name);
                std::cout << "    config: " << stalight::serialize_config(cfg).dump() << "\n";
            }
            return 0;
        }

        const stalight::Config cfg = stalight::parse_config(read_file(config_path));
        if (scan_cmd->parsed()) {
            if (cfg.scenario.name != "bandgap-scan" && cfg.scenario.name != "eit-width-scan")
                throw stalight::validation_error(
                    "scan: scenario.name must be bandgap-scan or eit-width-scan (got \"" + cfg.scenario.name + "\")");
        }
        if (run_cmd->parsed() || scan_cmd->parsed()) {
            const stalight::Manifest man = stalight::run_scenario(cfg, out_dir);
            print_metrics(man);
            return 0;
        }
        if (sweep_cmd->parsed()) {
            const stalight::darray values = parse_values_list(values_list);
            stalight::sweep(cfg, param_path, values, jobs, out_dir);
            std::cout << "sweep: " << values.size() << " points -> " << out_dir << "/sweep.csv\n";
            return 0;
        }
    } catch (const stalight::diverged_error& e) {
        std::cerr << "error (diverged): " << e.what() << "\n";
        return kExitDiverged;
    } catch (const stalight::validation_error& e) {
        std::cerr << "error (validation): " << e.what() << "\n";
        return kExitValidation;
    } catch (const stalight::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
