#include "frozentime/cli.hpp"

#include <iostream>
#include <sstream>

namespace frozentime {

using nlohmann::json;

namespace {

Scenario load_scenario(const RunConfig& config) {
    if (config.scenario_path.empty()) {
        throw std::invalid_argument("missing --scenario file");
    }
    json j = json::parse(read_file(config.scenario_path));
    Scenario s = scenario_from_json(j);
    if (config.sigma) {
        s.sigma = *config.sigma;
    }
    if (config.sigma0) {
        s.sigma0 = *config.sigma0;
    }
    if (config.rho) {
        s.rho = *config.rho;
    }
    if (config.seed) {
        s.seed = *config.seed;
    }
    s.validate();
    return s;
}

bool needs_window_sequence(CertificateVariant v) {
    switch (v) {
    case CertificateVariant::theorem1:
    case CertificateVariant::corollary1:
    case CertificateVariant::corollary2:
    case CertificateVariant::lemma9_cN:
        return true;
    default:
        return false;
    }
}

std::vector<double> variant_psi_trace(const CertificateInputs& inputs, CertificateVariant v, int n_width) {
    std::vector<double> values;
    values.reserve(inputs.g_norm.size());
    const double d_bar = sup_n_width(inputs.delta_g_trace(), n_width);
    for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
        switch (v) {
        case CertificateVariant::theorem1:
            values.push_back(psi(inputs, t));
            break;
        case CertificateVariant::corollary1:
            values.push_back(psi_n(inputs, t, n_width, d_bar));
            break;
        case CertificateVariant::corollary2:
            values.push_back(psi_hat(inputs, t));
            break;
        default:
            values.push_back(psi_hat_n(inputs, t, n_width, d_bar));
            break;
        }
    }
    return values;
}

/// Fills in a proposed time sequence when the variant needs one and the
/// inputs do not carry one. Returns false when no feasible sequence exists.
bool ensure_time_sequence(CertificateInputs& inputs, CertificateVariant v, int n_width, int max_gap,
                          std::string* failure_note) {
    if (!needs_window_sequence(v) || !inputs.time_sequence.empty()) {
        return true;
    }
    const auto psi_values = variant_psi_trace(inputs, v, n_width);
    const ProposedSequence proposed = propose_time_sequence(psi_values, inputs.start_time, inputs.rho, max_gap);
    if (!proposed.ok) {
        if (failure_note != nullptr) {
            *failure_note = "no feasible time sequence within max_gap = " + std::to_string(max_gap) +
                            "; first uncoverable time " + std::to_string(proposed.first_uncoverable);
        }
        return false;
    }
    inputs.time_sequence = proposed.sequence;
    return true;
}

void write_simulation_outputs(const RunConfig& config, const Scenario& scenario, const SimResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    atomic_write_file(dir / "x.csv", signal_to_csv(result.x));
    atomic_write_file(dir / "u.csv", signal_to_csv(result.u));
    atomic_write_file(dir / "gain.csv", gain_trace_to_csv(result));

    json summary{{"schema_version", 1},
                 {"name", scenario.name},
                 {"divergent", result.divergent},
                 {"horizon", {{"first", scenario.horizon.first}, {"last", scenario.horizon.last}}},
                 {"sigma", scenario.sigma},
                 {"sigma0", scenario.sigma0},
                 {"rho", scenario.rho},
                 {"seed", scenario.seed},
                 {"max_gain", norm_to_json(result.max_gain())}};
    if (result.divergent) {
        summary["divergence_time"] = result.divergence_time;
    }
    atomic_write_file(dir / "summary.json", summary.dump(2) + "\n");
}

int certify_exit_code(const CertificateReport& report) {
    if (!report.applicable) {
        return exit_input_error;
    }
    return report.holds ? exit_ok : exit_condition_failed;
}

} // namespace

CertificateVariant variant_from_string(const std::string& name) {
    for (const auto v :
         {CertificateVariant::theorem1, CertificateVariant::corollary1, CertificateVariant::corollary2,
          CertificateVariant::lemma9_cN, CertificateVariant::lemma10_special, CertificateVariant::corollary3_bound,
          CertificateVariant::zames_wang}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    throw std::invalid_argument("unknown certificate variant '" + name + "'");
}

int cmd_simulate(const RunConfig& config) {
    const Scenario scenario = load_scenario(config);
    const SimResult result = simulate(scenario);
    write_simulation_outputs(config, scenario, result);
    return result.divergent ? exit_divergent : exit_ok;
}

int cmd_certify(const RunConfig& config) {
    const CertificateVariant variant = variant_from_string(config.variant);

    CertificateInputs inputs;
    if (!config.inputs_path.empty()) {
        inputs = certificate_inputs_from_json(json::parse(read_file(config.inputs_path)));
        // The stored traces were evaluated at their sigma/sigma0; only rho
        // can change without invalidating them.
        if (config.sigma || config.sigma0) {
            throw std::invalid_argument("cannot override sigma/sigma0 on precomputed inputs (the norm traces "
                                        "depend on them); regenerate from a scenario instead");
        }
        if (config.rho) {
            inputs.rho = *config.rho;
        }
    } else {
        // Scenario-path overrides apply before the traces are evaluated.
        const Scenario scenario = load_scenario(config);
        const SimResult result = simulate(scenario);
        inputs = collect_certificate_inputs(scenario, result);
    }

    CertificateReport report;
    std::string failure_note;
    if (!ensure_time_sequence(inputs, variant, config.n_width, config.max_gap, &failure_note)) {
        report.variant = variant;
        report.holds = false;
        report.notes.push_back(failure_note);
    } else {
        report = evaluate_certificate(inputs, variant, config.n_width);
    }

    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    atomic_write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    atomic_write_file(dir / "margins.csv", margins_to_csv(report));
    atomic_write_file(dir / "inputs.json", certificate_inputs_to_json(inputs).dump(2) + "\n");
    atomic_write_file(dir / "variation.csv", variation_trace_to_csv(inputs.delta_g_trace()));

    if (!report.applicable) {
        std::cerr << "certify: variant " << to_string(variant) << " is not applicable:";
        for (const auto& note : report.notes) {
            std::cerr << ' ' << note << ';';
        }
        std::cerr << '\n';
    }
    return certify_exit_code(report);
}

int cmd_compare(const RunConfig& config) {
    const Scenario scenario = load_scenario(config);
    const SimResult result = simulate(scenario);
    const CertificateInputs base_inputs = collect_certificate_inputs(scenario, result);

    const std::vector<CertificateVariant> variants = {
        CertificateVariant::theorem1, CertificateVariant::corollary2, CertificateVariant::lemma10_special,
        CertificateVariant::corollary3_bound, CertificateVariant::zames_wang};

    json table = json::array();
    std::ostringstream csv;
    csv << "variant,applicable,holds,worst_margin,gain_bound\n";
    for (const auto variant : variants) {
        CertificateInputs inputs = base_inputs;
        CertificateReport report;
        std::string failure_note;
        if (!ensure_time_sequence(inputs, variant, config.n_width, config.max_gap, &failure_note)) {
            report.variant = variant;
            report.holds = false;
            report.notes.push_back(failure_note);
        } else {
            report = evaluate_certificate(inputs, variant, config.n_width);
        }
        table.push_back(json{{"variant", to_string(variant)},
                             {"applicable", report.applicable},
                             {"holds", report.holds},
                             {"worst_margin", norm_to_json(report.worst_margin())},
                             {"gain_bound", norm_to_json(report.gain_bound)}});
        csv << to_string(report.variant) << ',' << (report.applicable ? 1 : 0) << ',' << (report.holds ? 1 : 0)
            << ',' << format_double(report.worst_margin()) << ',' << format_double(report.gain_bound) << '\n';
    }

    const VariationTrace trace = base_inputs.delta_g_trace();
    double sup_delta = 0.0;
    for (double v : trace.values) {
        sup_delta = std::max(sup_delta, v);
    }
    json out{{"schema_version", 1},
             {"name", scenario.name},
             {"n_width", config.n_width},
             {"sup_delta_g", sup_delta},
             {"d_sigma_prior_convention", d_sigma_convention(trace)},
             {"conditions", std::move(table)}};

    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    atomic_write_file(dir / "compare.json", out.dump(2) + "\n");
    atomic_write_file(dir / "compare.csv", csv.str());
    atomic_write_file(dir / "variation.csv", variation_trace_to_csv(trace));
    std::cout << out.dump(2) << '\n';
    return exit_ok;
}

int cmd_bound(const RunConfig& config) {
    const double sigma = config.sigma.value_or(1.2);
    const double sigma0 = config.sigma0.value_or(1.44);
    const double rho = config.rho.value_or(0.9);
    if (!config.sup_l) {
        throw std::invalid_argument("bound: missing --sup-l");
    }

    // Evaluate before assembling the object: a throw inside a braced json
    // initializer leaks the already-built elements.
    const double baseline = tolerable_variation_bound(*config.sup_l, sigma, sigma0, rho, 1);
    const double averaged = tolerable_variation_bound(*config.sup_l, sigma, sigma0, rho, config.n_width);
    json out{{"schema_version", 1},
             {"sigma", sigma},
             {"sigma0", sigma0},
             {"rho", rho},
             {"sup_l", *config.sup_l},
             {"n_width", config.n_width},
             {"zames_wang_bound", baseline},
             {"tolerable_variation_bound", averaged}};
    if (config.controller_factor_norm) {
        out["adaptive_plant_bound"] = adaptive_plant_bound(*config.controller_factor_norm, *config.sup_l, sigma,
                                                           sigma0, rho, config.n_width);
        out["controller_factor_norm"] = *config.controller_factor_norm;
    }
    std::cout << out.dump(2) << '\n';
    if (!config.out_dir.empty() && config.out_dir != ".") {
        atomic_write_file(std::filesystem::path(config.out_dir) / "bound.json", out.dump(2) + "\n");
    }
    return exit_ok;
}

int cmd_gen_example(const RunConfig& config) {
    const std::uint64_t seed = config.seed.value_or(1);
    Scenario scenario = config.which_example == 1 ? build_example1(seed) : build_example2(seed);
    if (config.sigma) {
        scenario.sigma = *config.sigma;
    }
    if (config.sigma0) {
        scenario.sigma0 = *config.sigma0;
    }
    if (config.rho) {
        scenario.rho = *config.rho;
    }
    const std::string path = config.out_path.empty()
                                 ? (std::filesystem::path(config.out_dir) /
                                    ("example" + std::to_string(config.which_example) + ".json"))
                                       .string()
                                 : config.out_path;
    atomic_write_file(path, scenario_to_json(scenario).dump() + "\n");
    std::cout << "wrote " << path << '\n';
    return exit_ok;
}

int run_command(const RunConfig& config) {
    try {
        if (config.command == "simulate") {
            return cmd_simulate(config);
        }
        if (config.command == "certify") {
            return cmd_certify(config);
        }
        if (config.command == "compare") {
            return cmd_compare(config);
        }
        if (config.command == "bound") {
            return cmd_bound(config);
        }
        if (config.command == "gen-example") {
            return cmd_gen_example(config);
        }
        std::cerr << "unknown command '" << config.command << "'\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << config.command << ": " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace frozentime
