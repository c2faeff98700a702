#include <CLI11.hpp>

#include "incnet/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"incentive-net: rating-protocol design and repeated-game simulation"};
    app.require_subcommand(1);

    incnet::ScenarioOptions opts;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const std::vector<std::string> commands = {"design",        "benchmark",  "simulate",
                                               "compare-tft",   "growth-sweep", "star-sweep",
                                               "scalefree-table"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "scenario config (JSON)")->required();
        sub->add_option("--out", opts.out_dir, "output directory (default: .)");
        sub->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--workers", opts.workers, "worker threads for sweeps");
        sub->callback([&opts, name] { opts.command = name; });
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_set) opts.seed_override = seed;
    return incnet::run_scenario(opts);
}
