#include "frozentime/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frozentime {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

void require_field(const json& j, const char* field, const char* what) {
    if (!j.contains(field)) {
        throw std::invalid_argument(std::string(what) + ": missing field '" + field + "'");
    }
}

} // namespace

json norm_to_json(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double json_to_norm(const json& j) {
    if (j.is_null()) {
        return std::numeric_limits<double>::infinity();
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        throw std::invalid_argument("norm value: unrecognized string '" + s + "'");
    }
    return j.get<double>();
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json signal_to_json(const Signal& s) {
    json values = json::array();
    for (const auto& v : s.values()) {
        json row = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            row.push_back(v[i]);
        }
        values.push_back(std::move(row));
    }
    return json{{"schema_version", kSchemaVersion},
                {"start_time", s.start_time()},
                {"dimension", s.dimension()},
                {"values", std::move(values)}};
}

Signal signal_from_json(const json& j) {
    require_field(j, "start_time", "signal");
    require_field(j, "dimension", "signal");
    require_field(j, "values", "signal");
    const int dim = j.at("dimension").get<int>();
    Signal s(j.at("start_time").get<int>(), dim);
    for (const auto& row : j.at("values")) {
        if (static_cast<int>(row.size()) != dim) {
            throw std::invalid_argument("signal: value row does not match 'dimension'");
        }
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) {
            v[i] = row.at(static_cast<std::size_t>(i)).get<double>();
        }
        s.push_back(v);
    }
    return s;
}

std::string signal_to_csv(const Signal& s) {
    std::ostringstream out;
    out << "t";
    for (int i = 1; i <= s.dimension(); ++i) {
        out << ",x_" << i;
    }
    out << '\n';
    for (int t = s.start_time(); t <= s.end_time(); ++t) {
        out << t;
        const Eigen::VectorXd v = s.at(t);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            out << ',' << format_double(v[i]);
        }
        out << '\n';
    }
    return out.str();
}

Signal signal_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<int, Eigen::VectorXd>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> fields;
        while (std::getline(cells, cell, ',')) {
            fields.push_back(cell);
        }
        if (fields.empty()) {
            continue;
        }
        char* endp = nullptr;
        const long t = std::strtol(fields[0].c_str(), &endp, 10);
        if (endp == fields[0].c_str()) {
            continue; // header row
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(fields.size()) - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            v[static_cast<Eigen::Index>(i - 1)] = std::strtod(fields[i].c_str(), nullptr);
        }
        rows.emplace_back(static_cast<int>(t), std::move(v));
    }
    if (rows.empty()) {
        throw std::invalid_argument("signal csv: no data rows");
    }
    Signal s(rows.front().first, static_cast<int>(rows.front().second.size()));
    int expected = rows.front().first;
    for (const auto& [t, v] : rows) {
        if (t != expected) {
            throw std::invalid_argument("signal csv: time steps must be consecutive");
        }
        s.push_back(v);
        ++expected;
    }
    return s;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j.at(0).is_array()) {
        throw std::invalid_argument("matrix: expected a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("matrix: ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return m;
}

json schedule_to_json(const MatrixSchedule& s) {
    json mats = json::array();
    for (const auto& m : s.matrices()) {
        mats.push_back(matrix_to_json(m));
    }
    return json{{"start_time", s.start_time()}, {"matrices", std::move(mats)}};
}

MatrixSchedule schedule_from_json(const json& j) {
    require_field(j, "matrices", "schedule");
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& m : j.at("matrices")) {
        mats.push_back(matrix_from_json(m));
    }
    return MatrixSchedule(j.value("start_time", 0), std::move(mats));
}

json loop_function_to_json(const LoopFunction& h) {
    switch (h.kind()) {
    case LoopKind::memoryless_matrix: {
        const auto& n = std::get<MemorylessMatrix>(h.node());
        return json{{"kind", "memoryless"}, {"gain", schedule_to_json(n.gain)}};
    }
    case LoopKind::one_step_linear: {
        const auto& n = std::get<OneStepLinear>(h.node());
        return json{{"kind", "one_step"},
                    {"lag0", schedule_to_json(n.lag0)},
                    {"lag1", schedule_to_json(n.lag1)}};
    }
    case LoopKind::dead_zone_composite: {
        const auto& n = std::get<DeadZoneComposite>(h.node());
        return json{{"kind", "dead_zone"}, {"inner", loop_function_to_json(*n.inner)}};
    }
    case LoopKind::composition: {
        const auto& n = std::get<Composition>(h.node());
        return json{{"kind", "composition"},
                    {"outer", loop_function_to_json(*n.outer)},
                    {"inner", loop_function_to_json(*n.inner)}};
    }
    case LoopKind::ti_wrapper: {
        const auto& n = std::get<TimeInvariantWrapper>(h.node());
        return json{{"kind", "ti_wrapper"}, {"inner", loop_function_to_json(*n.inner)}, {"frozen_at", n.frozen_at}};
    }
    }
    throw std::logic_error("loop_function_to_json: unhandled kind");
}

LoopFunction loop_function_from_json(const json& j) {
    require_field(j, "kind", "loop function");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "memoryless") {
        require_field(j, "gain", "memoryless loop function");
        return LoopFunction::memoryless(schedule_from_json(j.at("gain")));
    }
    if (kind == "one_step") {
        require_field(j, "lag0", "one_step loop function");
        require_field(j, "lag1", "one_step loop function");
        return LoopFunction::one_step(schedule_from_json(j.at("lag0")), schedule_from_json(j.at("lag1")));
    }
    if (kind == "dead_zone") {
        require_field(j, "inner", "dead_zone loop function");
        return LoopFunction::dead_zone_over(loop_function_from_json(j.at("inner")));
    }
    if (kind == "composition") {
        require_field(j, "outer", "composition loop function");
        require_field(j, "inner", "composition loop function");
        return LoopFunction::compose(loop_function_from_json(j.at("outer")),
                                     loop_function_from_json(j.at("inner")));
    }
    if (kind == "ti_wrapper") {
        require_field(j, "inner", "ti_wrapper loop function");
        require_field(j, "frozen_at", "ti_wrapper loop function");
        return LoopFunction::frozen_at(loop_function_from_json(j.at("inner")), j.at("frozen_at").get<int>());
    }
    throw std::invalid_argument("loop function: unknown kind '" + kind + "'");
}

json scenario_to_json(const Scenario& s) {
    json input;
    if (const auto* closed = std::get_if<ClosedFormInput>(&s.input.source)) {
        input = json{{"type", "closed_form"},
                     {"amplitude", closed->amplitude},
                     {"exp_tau", closed->exp_tau},
                     {"cos_omega", closed->cos_omega},
                     {"dimension", closed->dimension}};
    } else {
        input = json{{"type", "explicit"}, {"signal", signal_to_json(std::get<Signal>(s.input.source))}};
    }
    json out{{"schema_version", kSchemaVersion},
             {"name", s.name},
             {"sigma", s.sigma},
             {"sigma0", s.sigma0},
             {"rho", s.rho},
             {"seed", s.seed},
             {"horizon", json{{"first", s.horizon.first}, {"last", s.horizon.last}}},
             {"f", loop_function_to_json(s.f)},
             {"g", loop_function_to_json(s.g)},
             {"input", std::move(input)}};
    if (s.time_sequence) {
        out["time_sequence"] = *s.time_sequence;
    }
    return out;
}

Scenario scenario_from_json(const json& j) {
    for (const char* field : {"sigma", "sigma0", "rho", "horizon", "f", "g", "input"}) {
        require_field(j, field, "scenario");
    }
    const auto& jh = j.at("horizon");
    require_field(jh, "first", "scenario horizon");
    require_field(jh, "last", "scenario horizon");
    const TimeRange horizon{jh.at("first").get<int>(), jh.at("last").get<int>()};

    const auto& ji = j.at("input");
    require_field(ji, "type", "scenario input");
    InputSpec input{ClosedFormInput{}};
    const auto type = ji.at("type").get<std::string>();
    if (type == "closed_form") {
        ClosedFormInput closed;
        closed.amplitude = ji.value("amplitude", 1.0);
        closed.exp_tau = ji.value("exp_tau", 0.0);
        closed.cos_omega = ji.value("cos_omega", 0.0);
        closed.dimension = ji.value("dimension", 1);
        input.source = closed;
    } else if (type == "explicit") {
        require_field(ji, "signal", "scenario input");
        input.source = signal_from_json(ji.at("signal"));
    } else {
        throw std::invalid_argument("scenario input: unknown type '" + type + "'");
    }

    Scenario s(j.value("name", std::string("scenario")), loop_function_from_json(j.at("f")),
               loop_function_from_json(j.at("g")), std::move(input), horizon, j.at("sigma").get<double>(),
               j.at("sigma0").get<double>(), j.at("rho").get<double>(), j.value("seed", std::uint64_t{0}));
    if (j.contains("time_sequence")) {
        s.time_sequence = j.at("time_sequence").get<std::vector<int>>();
    }
    s.validate();
    return s;
}

namespace {

json trace_to_json(const std::vector<double>& values) {
    json out = json::array();
    for (double v : values) {
        out.push_back(norm_to_json(v));
    }
    return out;
}

std::vector<double> trace_from_json(const json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        out.push_back(json_to_norm(v));
    }
    return out;
}

} // namespace

json certificate_inputs_to_json(const CertificateInputs& inputs) {
    json out{{"schema_version", kSchemaVersion},
             {"sigma", inputs.sigma},
             {"sigma0", inputs.sigma0},
             {"rho", inputs.rho},
             {"f_norm", inputs.f_norm},
             {"start_time", inputs.start_time},
             {"time_sequence", inputs.time_sequence},
             {"s_norm", trace_to_json(inputs.s_norm)},
             {"s_norm_sigma", trace_to_json(inputs.s_norm_sigma)},
             {"l_norm", trace_to_json(inputs.l_norm)},
             {"g_norm", trace_to_json(inputs.g_norm)},
             {"c_coeff", trace_to_json(inputs.c_coeff)},
             {"delta_g", trace_to_json(inputs.delta_g)},
             {"stabilizing", inputs.stabilizing},
             {"notes", inputs.notes}};
    return out;
}

CertificateInputs certificate_inputs_from_json(const json& j) {
    for (const char* field :
         {"sigma", "sigma0", "rho", "f_norm", "start_time", "s_norm", "s_norm_sigma", "l_norm", "g_norm",
          "c_coeff", "delta_g", "stabilizing"}) {
        require_field(j, field, "certificate inputs");
    }
    CertificateInputs inputs;
    inputs.sigma = j.at("sigma").get<double>();
    inputs.sigma0 = j.at("sigma0").get<double>();
    inputs.rho = j.at("rho").get<double>();
    inputs.f_norm = j.at("f_norm").get<double>();
    inputs.start_time = j.at("start_time").get<int>();
    inputs.time_sequence = j.value("time_sequence", std::vector<int>{});
    inputs.s_norm = trace_from_json(j.at("s_norm"));
    inputs.s_norm_sigma = trace_from_json(j.at("s_norm_sigma"));
    inputs.l_norm = trace_from_json(j.at("l_norm"));
    inputs.g_norm = trace_from_json(j.at("g_norm"));
    inputs.c_coeff = trace_from_json(j.at("c_coeff"));
    inputs.delta_g = trace_from_json(j.at("delta_g"));
    inputs.stabilizing = j.at("stabilizing").get<std::vector<bool>>();
    inputs.notes = j.value("notes", std::vector<std::string>{});
    inputs.validate();
    return inputs;
}

json report_to_json(const CertificateReport& report) {
    json windows = json::array();
    for (const auto& w : report.windows) {
        windows.push_back(json{{"start", w.window_start},
                               {"end", w.window_end},
                               {"worst_t", w.worst_t},
                               {"required", norm_to_json(w.log_required)},
                               {"achieved", norm_to_json(w.log_achieved)},
                               {"margin", norm_to_json(w.margin)}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"variant", to_string(report.variant)},
                {"applicable", report.applicable},
                {"holds", report.holds},
                {"t_bar", report.t_bar},
                {"beta", norm_to_json(report.beta)},
                {"gain_bound", norm_to_json(report.gain_bound)},
                {"gain_claimed", report.gain_claimed},
                {"worst_margin", norm_to_json(report.worst_margin())},
                {"windows", std::move(windows)},
                {"failure_locations", report.failure_locations},
                {"notes", report.notes}};
}

std::string variation_trace_to_csv(const VariationTrace& trace) {
    std::ostringstream out;
    out << "t,delta_norm\n";
    for (int t = trace.start_time; t <= trace.end_time(); ++t) {
        out << t << ',' << format_double(trace.at(t)) << '\n';
    }
    return out.str();
}

std::string gain_trace_to_csv(const SimResult& result) {
    std::ostringstream out;
    out << "t,gain\n";
    for (int t = result.horizon.first; t <= result.horizon.first + static_cast<int>(result.gain_trace.size()) - 1;
         ++t) {
        const double g = result.gain_at(t);
        if (std::isnan(g)) {
            continue; // undefined while the input norm is zero
        }
        out << t << ',' << format_double(g) << '\n';
    }
    return out.str();
}

std::string margins_to_csv(const CertificateReport& report) {
    std::ostringstream out;
    out << "window_start,window_end,worst_t,required,achieved,margin\n";
    for (const auto& w : report.windows) {
        out << w.window_start << ',' << w.window_end << ',' << w.worst_t << ',' << format_double(w.log_required)
            << ',' << format_double(w.log_achieved) << ',' << format_double(w.margin) << '\n';
    }
    return out.str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        if (!out.flush()) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace frozentime
