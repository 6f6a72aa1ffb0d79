// stopmax: solve, evaluate and verify the optimal rule for stopping close to the
// ultimate maximum of a drifted Brownian motion.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "stopmax/cli.hpp"

namespace {

struct FlagSpec {
    const char* name;
    const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"mu", "drift per unit time"},
    {"horizon", "horizon T > 0"},
    {"steps", "time steps of the boundary solver (>= 16)"},
    {"quad-order", "Gauss-Legendre order per panel"},
    {"root-tol", "absolute tolerance on the boundary equation"},
    {"level-tol", "absolute tolerance on boundary levels"},
    {"merge-gap", "smallest band width before the band is declared merged"},
    {"paths", "Monte Carlo paths"},
    {"dt", "Monte Carlo time step (default 1e-3 T)"},
    {"seed", "Monte Carlo seed"},
    {"workers", "worker threads (never changes output)"},
    {"dp-steps", "time steps of the dynamic-programming oracle"},
    {"dp-levels", "state levels of the dynamic-programming oracle"},
    {"dp-x-max", "top state level of the oracle (0 = automatic)"},
    {"factors", "grid multipliers for convergence, e.g. 1,2,4"},
    {"value-times", "time points of the value surface"},
    {"value-levels", "levels of the value surface and diagnostics probes"},
    {"value-x-max", "top level of the value surface (0 = 3 sqrt(T))"},
    {"table", "boundary CSV from a previous solve"},
    {"out", "output path (default: stdout)"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal prediction of the ultimate maximum of drifted Brownian motion"};
    app.require_subcommand(1);
    std::string config_file;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> opts;

    const char* commands[][2] = {
        {"solve", "solve for the stopping boundaries and write t,b1,b2"},
        {"value", "write the value surface t,x,V,G,region"},
        {"simulate", "Monte Carlo regret scan of the band rule against rivals"},
        {"diagnose", "smooth-fit, normal-reflection and ordering report"},
        {"oracle", "compare boundaries with the dynamic-programming oracle"},
        {"convergence", "grid-refinement study of the boundary solver"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", config_file, "flat key = value configuration file");
        for (const auto& f : kFlags) opts[std::string(c[0]) + f.name] = sub->add_option(std::string("--") + f.name, flags[f.name], f.help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const stopmax::ConfigError err(e.what());
        std::cerr << stopmax::error_record(err) << "\n";
        return stopmax::kExitConfig;
    }

    try {
        stopmax::RunConfig cfg;
        cfg.command = app.get_subcommands().front()->get_name();
        if (!config_file.empty())
            for (const auto& [k, v] : stopmax::read_config_file(config_file)) stopmax::apply_setting(cfg, k, v);
        for (const auto& f : kFlags)
            if (opts[cfg.command + f.name]->count() > 0) stopmax::apply_setting(cfg, f.name, flags[f.name]);

        const std::string artifact = stopmax::run(cfg);
        if (cfg.out_path.empty()) std::cout << artifact;
        else stopmax::write_file(cfg.out_path, artifact);
        return stopmax::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << stopmax::error_record(e) << "\n";
        return stopmax::exit_code_for(e);
    }
}
