#pragma once

#include "frozentime/io.hpp"

#include <optional>
#include <string>

namespace frozentime {

/// Exit codes shared by every subcommand. Certificate failure is distinct
/// from input errors so pipelines can tell "bad input" from "condition not
/// satisfied".
enum ExitCode : int {
    exit_ok = 0,
    exit_input_error = 1,
    exit_divergent = 2,
    exit_condition_failed = 3,
};

struct RunConfig {
    std::string command; ///< simulate | certify | compare | bound | gen-example

    std::string scenario_path;
    std::string inputs_path; ///< precomputed certificate-inputs JSON (certify)
    std::string variant = "corollary2";
    std::string out_dir = ".";
    std::string out_path; ///< gen-example target file

    std::optional<double> sigma;
    std::optional<double> sigma0;
    std::optional<double> rho;
    std::optional<std::uint64_t> seed;
    int n_width = 1;
    int max_gap = 120;

    std::optional<double> sup_l;                  ///< bound command
    std::optional<double> controller_factor_norm; ///< bound command, adaptive variant
    int which_example = 2;                        ///< gen-example
};

int cmd_simulate(const RunConfig& config);
int cmd_certify(const RunConfig& config);
int cmd_compare(const RunConfig& config);
int cmd_bound(const RunConfig& config);
int cmd_gen_example(const RunConfig& config);

/// Dispatch on config.command; never throws, always returns an exit code.
int run_command(const RunConfig& config);

CertificateVariant variant_from_string(const std::string& name);

} // namespace frozentime
