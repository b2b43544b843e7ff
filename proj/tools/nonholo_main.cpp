#include "nonholo/report.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

using namespace nonholo;

int main(int argc, char** argv) {
    CLI::App app{"nonholo: moving-frame mechanics runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool list_as_json = false;
    uint64_t seed = 0;
    bool seed_given = false;

    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario from a JSON config");
    run_cmd->add_option("config", config_path, "path to the config JSON")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--seed", seed, "seed for randomized diagnostics")
        ->each([&](const std::string&) { seed_given = true; });

    CLI::App* list_cmd = app.add_subcommand("list", "list registered scenarios");
    list_cmd->add_flag("--json", list_as_json, "machine-readable output");

    CLI11_PARSE(app, argc, argv);

    if (list_cmd->parsed()) {
        std::cout << (list_as_json ? scenario_list_json() : scenario_list_text());
        return 0;
    }

    try {
        RunConfig config = parse_config_file(config_path);
        if (seed_given) config.seed = seed;
        RunResult result = run_config(config, out_dir);
        for (const auto& [name, r] : result.invariants) {
            std::printf("%-28s %-4s  value %.3e  tol %.3e\n", name.c_str(),
                        r.pass ? "ok" : "FAIL", r.value, r.tolerance);
        }
        if (!result.pass) {
            std::fprintf(stderr, "invariant checks failed\n");
            return 1;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
