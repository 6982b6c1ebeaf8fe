// Monte-Carlo driver for the CoMP-NOMA scenarios.
//
//   compnoma_sim --preset fig4 --out fig4.csv
//   compnoma_sim --config run.json --trials 2000 --workers 4
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime error.

#include <compnoma/config_io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace compnoma;

namespace {

std::vector<Scheme> parse_scheme_list(const std::string& list)
{
    std::vector<Scheme> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_scheme(item));
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"CoMP-NOMA downlink spectral-efficiency simulator"};
    std::string config_path, preset_name, schemes, out_path;
    std::optional<int> scenario, decode_case;
    std::optional<std::uint64_t> trials, seed;
    std::optional<unsigned> workers;
    bool dump_defaults = false;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--preset", preset_name, "fig4, fig5 or fig6");
    app.add_option("--scenario", scenario, "deployment scenario (1, 2, 3)");
    app.add_option("--scheme", schemes, "comma-separated schemes: JT-NOMA,CS-NOMA,DPS-NOMA,JT-OMA,CS-OMA");
    app.add_option("--trials", trials, "trials per sweep point");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_path, "CSV output path (stdout if omitted)");
    app.add_option("--case", decode_case, "scenario-3 decoding case (1 or 2)");
    app.add_option("--workers", workers, "worker threads (0: hardware concurrency)");
    app.add_flag("--print-defaults", dump_defaults, "print the default config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 1);
    }

    ExperimentConfig config;
    try {
        if (dump_defaults) {
            std::cout << emit_defaults(scenario.value_or(1));
            return 0;
        }
        if (!preset_name.empty() && !config_path.empty()) throw ConfigError("--preset and --config are exclusive");
        if (!preset_name.empty()) config = preset(preset_name);
        if (!config_path.empty()) config = parse_config_file(config_path);

        if (scenario) {
            if (*scenario != config.scenario_id) config.sweep.reset();
            config.scenario_id = *scenario;
        }
        if (!schemes.empty()) config.schemes = parse_scheme_list(schemes);
        if (trials) config.trials = *trials;
        if (seed) config.seed = *seed;
        if (workers) config.workers = *workers;
        if (!out_path.empty()) config.output_path = out_path;
        if (decode_case) {
            if (*decode_case != 1 && *decode_case != 2) throw ValidationError("decode_cases", "cases are 1 or 2");
            config.decode_cases = {static_cast<DecodeCase>(*decode_case)};
        }
        config.sweep = config.resolved_sweep();
        config.validate();
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }

    try {
        const std::string resolved = emit_config(config);
        std::fprintf(stderr, "resolved config:\n%s", resolved.c_str());
        if (!config.output_path.empty()) {
            std::ofstream cfg_out(config.output_path + ".config.json");
            if (!cfg_out) throw IoError("cannot write " + config.output_path + ".config.json");
            cfg_out << resolved;
        }

        const SweepResult result = run_sweep(config.to_spec());
        std::fprintf(stderr, "%s", summary_report(result).c_str());
        if (config.output_path.empty())
            std::cout << format_csv(result);
        else
            emit_csv(result, config.output_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
    return 0;
}
