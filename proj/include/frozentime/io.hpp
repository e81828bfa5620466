#pragma once

#include "frozentime/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace frozentime {

/// Norm values may be +inf (no norm at the requested weight); JSON numbers
/// cannot express that, so infinities serialize as the string "inf" and
/// parse back from "inf" or null.
nlohmann::json norm_to_json(double v);
double json_to_norm(const nlohmann::json& j);

/// Shortest round-trip text for CSV cells (17 significant digits).
std::string format_double(double v);

nlohmann::json signal_to_json(const Signal& s);
Signal signal_from_json(const nlohmann::json& j);

/// One row per time step: t, x_1, ..., x_n (header row included).
std::string signal_to_csv(const Signal& s);
Signal signal_from_csv(const std::string& text);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json schedule_to_json(const MatrixSchedule& s);
MatrixSchedule schedule_from_json(const nlohmann::json& j);

nlohmann::json loop_function_to_json(const LoopFunction& h);
LoopFunction loop_function_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json certificate_inputs_to_json(const CertificateInputs& inputs);
CertificateInputs certificate_inputs_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const CertificateReport& report);

std::string variation_trace_to_csv(const VariationTrace& trace);
std::string gain_trace_to_csv(const SimResult& result);
std::string margins_to_csv(const CertificateReport& report);

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace frozentime
