// consistency-lab: command-line front end.
//
// Exit codes: 0 success, 1 operational error, 2 domain verdict (zero
// separation margin, a piece that cannot be tested, or coinciding models).

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "clab/errors.hpp"
#include "clab/runner.hpp"
#include "clab/scenario_io.hpp"

namespace {

struct Flags {
    std::string scenario;
    std::string out;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> reps;
    unsigned workers = 0;
    bool plots = false;
};

void add_flags(CLI::App* cmd, Flags& f, bool needs_out) {
    cmd->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
    auto* out = cmd->add_option("--out", f.out, "Output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
    cmd->add_option("--reps", f.reps, "Replications, overriding sim.replications");
    cmd->add_option("--workers", f.workers, "Worker threads (default: all cores)")
        ->envname("CONSISTENCY_LAB_WORKERS")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--plots", f.plots, "Also write SVG line plots");
}

int run(const std::string& command, const Flags& f) {
    const auto scenario = clab::load_scenario(f.scenario);
    clab::RunConfig config;
    config.seed = f.seed;
    config.replications = f.reps;
    config.workers = f.workers > 0 ? f.workers : std::max(1u, std::thread::hardware_concurrency());
    config.plots = f.plots;

    clab::CommandOutput output;
    if (command == "distinguish") output = clab::run_distinguish(scenario, config);
    else if (command == "bound") output = clab::run_bound(scenario, config);
    else if (command == "simulate") output = clab::run_simulate(scenario, config);
    else output = clab::run_schedule(scenario, config);

    std::cout << "scenario: " << scenario.name << " (" << clab::kind_name(scenario.kind) << ")\n" << output.summary;
    if (!f.out.empty()) {
        const auto files = clab::write_output(output, f.out, f.plots);
        std::cout << "wrote " << files.size() << " files to " << f.out << '\n';
    }
    return output.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consistent hypothesis testing laboratory"};
    app.set_version_flag("--version", clab::version());
    app.require_subcommand(1);

    Flags flags;
    std::string command;
    const struct {
        const char* name;
        const char* help;
        bool needs_out;
    } commands[] = {
        {"distinguish", "Separation margin on the scenario partition; exit 2 when it is zero", false},
        {"bound", "Hull distance and Kraft lower bound on alpha + beta", false},
        {"simulate", "Run the scenario experiment and write CSV tables", true},
        {"schedule", "Build the interleaved test schedule and its discernibility curves", true},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_flags(sub, flags, c.needs_out);
        sub->callback([&command, name = c.name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        return run(command, flags);
    } catch (const clab::ConstructionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const clab::DegenerateError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (...) {
        std::cerr << "error: unknown failure\n";
        return 1;
    }
}
