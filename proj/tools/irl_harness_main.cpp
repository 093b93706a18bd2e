// irl-harness: build environments, run the interactive IRL pipelines
// across seeds and emit CSV results.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "iirl/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interactive IRL experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seeds_arg;
    std::string out_dir;
    bool non_interactive = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file (JSON)")->required();
        sub->add_option("--seeds", seeds_arg, "comma-separated seed list, overrides the config");
        sub->add_option("--out", out_dir, "output directory, overrides the config");
    };
    CLI::App* alg1 = app.add_subcommand("alg1", "full-information episode loop");
    CLI::App* alg2 = app.add_subcommand("alg2", "Bayesian trajectory-based loop");
    CLI::App* planners = app.add_subcommand("planners-eval", "planner return sweep");
    CLI::App* verify = app.add_subcommand("verify-ideal", "ideal-environment collapse checks");
    for (CLI::App* sub : {alg1, alg2, planners, verify}) add_common(sub);
    alg2->add_flag("--non-interactive", non_interactive,
                   "freeze the commitment at the initial policy");

    CLI11_PARSE(app, argc, argv);

    try {
        iirl::RunConfig cfg = iirl::RunConfig::from_file(config_path);
        const std::string selector = app.get_subcommands().front()->get_name();
        if (cfg.selector != selector)
            throw iirl::ConfigError("config selector '" + cfg.selector +
                                    "' does not match subcommand '" + selector + "'");
        if (!seeds_arg.empty()) {
            cfg.seeds.clear();
            std::string token;
            for (char c : seeds_arg + ",") {
                if (c == ',') {
                    if (!token.empty()) cfg.seeds.push_back(std::stoull(token));
                    token.clear();
                } else {
                    token += c;
                }
            }
            if (cfg.seeds.empty()) throw iirl::ConfigError("--seeds: no seeds given");
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (non_interactive) cfg.non_interactive = true;
        return iirl::run_harness(cfg);
    } catch (const iirl::ConfigError& ex) {
        std::fprintf(stderr, "irl-harness: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "irl-harness: %s\n", ex.what());
        return 1;
    }
}
