#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlc/commands.hpp"
#include "qlc/config.hpp"
#include "qlc/errors.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, precondition = 2 };

int report_error(bool as_json, const char* kind, const std::string& msg, int line = 0,
                 const std::string& field = {}) {
    if (as_json) {
        nlohmann::ordered_json j = {{"error", kind}, {"message", msg}};
        if (line > 0) j["line"] = line;
        if (!field.empty()) j["field"] = field;
        std::cerr << j.dump() << '\n';
    } else {
        std::cerr << "qlc: " << kind << ": " << msg << '\n';
    }
    return std::string(kind) == "config" ? config_error : precondition;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotational-state cooling and comb spectroscopy of a trapped molecular ion"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path, profile_name = "sio+", engine, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool error_json = false, quiet = false;
    app.add_option("-c,--config", config_path, "Config file (sectioned key = value with units)");
    app.add_option("--profile", profile_name, "Base parameter set")->check(CLI::IsMember({"sio+", "SiO+"}));
    app.add_option("--seed", seed, "Seed for every random stream");
    app.add_option("--engine", engine, "rate or monte_carlo")->check(CLI::IsMember({"rate", "monte_carlo"}));
    app.add_option("-o,--out", out_dir, "Output directory");
    app.add_option("--threads", threads, "Worker threads (0 = hardware)");
    app.add_flag("--error-json", error_json, "Print errors as JSON on stderr");
    app.add_flag("-q,--quiet", quiet, "Do not echo the JSON summary");

    const char* names[] = {"boltzmann", "match", "pump", "cool", "scan", "detect"};
    const char* help[] = {"Thermal J distribution", "Repetition-rate / AOM offset matching",
                          "Broadband rotational pumping", "Raman sideband cooling",
                          "Comb offset scans and comb-index extraction", "Quantum-logic detection statistics"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        qlc::RunConfig cfg = qlc::profile(profile_name);
        if (!config_path.empty()) cfg = qlc::load_config(config_path, cfg);
        if (seed) cfg.seed = *seed;
        if (engine == "rate") cfg.engine = qlc::Engine::rate;
        if (engine == "monte_carlo") cfg.engine = qlc::Engine::monte_carlo;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (threads) cfg.threads = *threads;
        cfg.validate();

        qlc::CommandOutput out;
        if (cmd == "boltzmann") out = qlc::cmd_boltzmann(cfg);
        else if (cmd == "match") out = qlc::cmd_match(cfg);
        else if (cmd == "pump") out = qlc::cmd_pump(cfg);
        else if (cmd == "cool") out = qlc::cmd_cool(cfg);
        else if (cmd == "scan") out = qlc::cmd_scan(cfg);
        else out = qlc::cmd_detect(cfg);

        qlc::write_outputs(out, cmd, cfg.output_dir);
        if (!quiet) std::cout << out.summary.dump(2) << '\n';
        return ok;
    } catch (const qlc::ConfigError& e) {
        return report_error(error_json, "config", e.what(), e.line(), e.field());
    } catch (const qlc::PreconditionError& e) {
        return report_error(error_json, "precondition", e.what());
    } catch (const std::exception& e) {
        return report_error(error_json, "runtime", e.what());
    }
}
