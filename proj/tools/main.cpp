#include "frozentime/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"frozentime - stability certificates and simulation for time-varying feedback loops"};
    app.require_subcommand(1);

    frozentime::RunConfig config;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--sigma", [&](const CLI::results_t& r) { config.sigma = std::stod(r[0]); return true; },
                        "fading-memory weight sigma (>= 1)");
        cmd->add_option("--sigma0", [&](const CLI::results_t& r) { config.sigma0 = std::stod(r[0]); return true; },
                        "stability-degree weight sigma0 (> sigma)");
        cmd->add_option("--rho", [&](const CLI::results_t& r) { config.rho = std::stod(r[0]); return true; },
                        "contraction rate rho in (0, 1)");
        cmd->add_option("--seed",
                        [&](const CLI::results_t& r) { config.seed = std::stoull(r[0]); return true; },
                        "64-bit scenario seed override");
        cmd->add_option("--n-width", config.n_width, "averaging window N for the N-width variants");
        cmd->add_option("--max-gap", config.max_gap, "largest window width the sequence proposer may use");
        cmd->add_option("--out-dir", config.out_dir, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "run a closed-loop scenario and write x/u/gain traces");
    sim->add_option("--scenario", config.scenario_path, "scenario JSON file")->required();
    add_common(sim);

    auto* cert = app.add_subcommand("certify", "evaluate one sufficient condition against a scenario");
    cert->add_option("--scenario", config.scenario_path, "scenario JSON file");
    cert->add_option("--inputs", config.inputs_path, "precomputed certificate-inputs JSON file");
    cert->add_option("--variant", config.variant,
                     "theorem1 | corollary1 | corollary2 | lemma9_cN | lemma10_special | corollary3_bound | "
                     "zames_wang");
    add_common(cert);

    auto* cmp = app.add_subcommand("compare", "run our conditions and the worst-case baseline side by side");
    cmp->add_option("--scenario", config.scenario_path, "scenario JSON file")->required();
    add_common(cmp);

    auto* bound = app.add_subcommand("bound", "print the tolerable average-variation bounds");
    bound->add_option("--sup-l",
                      [&](const CLI::results_t& r) { config.sup_l = std::stod(r[0]); return true; },
                      "sup over t of the frozen closed-loop norm ||l_t||")
        ->required();
    bound->add_option("--controller-factor-norm",
                      [&](const CLI::results_t& r) {
                          config.controller_factor_norm = std::stod(r[0]);
                          return true;
                      },
                      "controller factor norm for the adaptive plant-variation bound");
    add_common(bound);

    auto* gen = app.add_subcommand("gen-example", "generate a bundled example scenario file");
    gen->add_option("--which", config.which_example, "1 (episodic dead-zone loop) or 2 (all-stabilizing loop)");
    gen->add_option("--out", config.out_path, "output scenario path");
    add_common(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : frozentime::exit_input_error;
    }

    config.command = sim->parsed()      ? "simulate"
                     : cert->parsed()   ? "certify"
                     : cmp->parsed()    ? "compare"
                     : bound->parsed()  ? "bound"
                                        : "gen-example";
    return frozentime::run_command(config);
}
