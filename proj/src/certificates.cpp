#include "frozentime/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frozentime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

double CertificateInputs::trace_at(const std::vector<double>& trace, int t) const {
    const int idx = t - start_time;
    if (idx < 0 || idx >= static_cast<int>(trace.size())) {
        throw std::out_of_range("CertificateInputs: time outside the trace horizon");
    }
    return trace[static_cast<std::size_t>(idx)];
}

bool CertificateInputs::stabilizing_at(int t) const {
    const int idx = t - start_time;
    if (idx < 0 || idx >= static_cast<int>(stabilizing.size())) {
        throw std::out_of_range("CertificateInputs: time outside the trace horizon");
    }
    return stabilizing[static_cast<std::size_t>(idx)];
}

VariationTrace CertificateInputs::delta_g_trace() const {
    VariationTrace trace;
    trace.sigma = sigma;
    trace.start_time = start_time;
    trace.values = delta_g;
    return trace;
}

void CertificateInputs::validate() const {
    if (!(sigma >= 1.0 && sigma < sigma0)) {
        throw std::invalid_argument("CertificateInputs: requires 1 <= sigma < sigma0");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw std::invalid_argument("CertificateInputs: requires rho in (0, 1)");
    }
    if (!(f_norm >= 0.0) || !std::isfinite(f_norm)) {
        throw std::invalid_argument("CertificateInputs: F norm must be finite and nonnegative");
    }
    const std::size_t n = g_norm.size();
    if (n == 0) {
        throw std::invalid_argument("CertificateInputs: empty horizon");
    }
    if (s_norm.size() != n || s_norm_sigma.size() != n || l_norm.size() != n || c_coeff.size() != n ||
        delta_g.size() != n || stabilizing.size() != n) {
        throw std::invalid_argument("CertificateInputs: traces must share one length");
    }
    for (std::size_t i = 1; i < time_sequence.size(); ++i) {
        if (time_sequence[i] <= time_sequence[i - 1]) {
            throw std::invalid_argument("CertificateInputs: time sequence must be strictly increasing");
        }
    }
    // The anchor entry may sit one step before the horizon, where the state
    // norm is identically zero.
    if (!time_sequence.empty() &&
        (time_sequence.front() < start_time - 1 || time_sequence.back() > horizon_end())) {
        throw std::invalid_argument("CertificateInputs: time sequence must lie inside the horizon");
    }
}

std::string to_string(CertificateVariant v) {
    switch (v) {
    case CertificateVariant::theorem1:
        return "theorem1";
    case CertificateVariant::corollary1:
        return "corollary1";
    case CertificateVariant::corollary2:
        return "corollary2";
    case CertificateVariant::lemma9_cN:
        return "lemma9_cN";
    case CertificateVariant::lemma10_special:
        return "lemma10_special";
    case CertificateVariant::corollary3_bound:
        return "corollary3_bound";
    case CertificateVariant::zames_wang:
        return "zames_wang";
    }
    return "unknown";
}

double CertificateReport::worst_margin() const {
    double worst = kInf;
    for (const auto& w : windows) {
        worst = std::min(worst, w.margin);
    }
    return worst;
}

namespace {

double coupling_term(double l_norm, double coeff) {
    // No variation means no coupling, even through an unstable frozen loop.
    return coeff == 0.0 ? 0.0 : l_norm * coeff;
}

} // namespace

double psi(const CertificateInputs& inputs, int t) {
    const double lc = coupling_term(inputs.trace_at(inputs.l_norm, t), inputs.trace_at(inputs.c_coeff, t));
    return std::max(std::min(lc, inputs.trace_at(inputs.g_norm, t)), 1.0 / inputs.sigma);
}

double psi_n(const CertificateInputs& inputs, int t, int n_width, double d_bar) {
    const double coeff = c_sigma_n(d_bar, inputs.sigma, inputs.sigma0, n_width);
    const double lc = coupling_term(inputs.trace_at(inputs.l_norm, t), coeff);
    return std::max(std::min(lc, inputs.trace_at(inputs.g_norm, t)), 1.0 / inputs.sigma);
}

double psi_hat(const CertificateInputs& inputs, int t) {
    if (inputs.stabilizing_at(t)) {
        const double lc = coupling_term(inputs.trace_at(inputs.l_norm, t), inputs.trace_at(inputs.c_coeff, t));
        return std::max(1.0 / inputs.sigma, lc);
    }
    return std::max(1.0 / inputs.sigma, inputs.trace_at(inputs.g_norm, t));
}

double psi_hat_n(const CertificateInputs& inputs, int t, int n_width, double d_bar) {
    if (inputs.stabilizing_at(t)) {
        const double coeff = c_sigma_n(d_bar, inputs.sigma, inputs.sigma0, n_width);
        const double lc = coupling_term(inputs.trace_at(inputs.l_norm, t), coeff);
        return std::max(1.0 / inputs.sigma, lc);
    }
    return std::max(1.0 / inputs.sigma, inputs.trace_at(inputs.g_norm, t));
}

std::vector<WindowMargin> check_window_condition(const std::vector<double>& psi_values, int psi_start, double rho,
                                                 const std::vector<int>& time_sequence) {
    if (time_sequence.size() < 2) {
        throw std::invalid_argument("check_window_condition: need an anchor plus at least one window end");
    }
    const double log_rho = std::log(rho);
    const int psi_end = psi_start + static_cast<int>(psi_values.size()) - 1;

    std::vector<WindowMargin> out;
    out.reserve(time_sequence.size() - 1);
    for (std::size_t i = 1; i < time_sequence.size(); ++i) {
        const int ws = time_sequence[i - 1];
        const int we = time_sequence[i];
        if (ws + 1 < psi_start || we > psi_end) {
            throw std::out_of_range("check_window_condition: window outside the psi trace");
        }
        WindowMargin wm;
        wm.window_start = ws;
        wm.window_end = we;
        wm.margin = kInf;
        double cum = 0.0;
        for (int j = we; j >= ws + 1; --j) {
            cum += std::log(psi_values[static_cast<std::size_t>(j - psi_start)]);
            const int t = j - 1;
            const double required = static_cast<double>(we - t) * log_rho;
            const double margin = required - cum;
            if (margin < wm.margin) {
                wm.margin = margin;
                wm.worst_t = t;
                wm.log_required = required;
                wm.log_achieved = cum;
            }
        }
        out.push_back(wm);
    }
    return out;
}

Theorem1Constants constants_theorem1(const CertificateInputs& inputs) {
    if (inputs.time_sequence.size() < 2) {
        throw std::invalid_argument("constants_theorem1: time sequence must contain an anchor and one window");
    }
    Theorem1Constants k;
    double sup_term = 0.0;
    for (std::size_t i = 1; i < inputs.time_sequence.size(); ++i) {
        const int ws = inputs.time_sequence[i - 1];
        const int we = inputs.time_sequence[i];
        k.t_bar = std::max(k.t_bar, static_cast<double>(we - ws));
        for (int t = ws + 1; t <= we; ++t) {
            sup_term = std::max(sup_term, inputs.trace_at(inputs.s_norm, t) * std::pow(inputs.rho, we - t));
        }
    }
    k.beta = inputs.f_norm == 0.0 ? 0.0 : k.t_bar * inputs.f_norm * sup_term;
    k.c = k.beta == 0.0 ? 0.0 : std::pow(inputs.sigma, k.t_bar - 1.0) * k.beta / (1.0 - inputs.rho);
    return k;
}

namespace {

std::vector<double> psi_trace(const CertificateInputs& inputs, const std::function<double(int)>& fn) {
    std::vector<double> values;
    values.reserve(inputs.g_norm.size());
    for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
        values.push_back(fn(t));
    }
    return values;
}

void finish_window_report(CertificateReport& report, const CertificateInputs& inputs,
                          const std::vector<double>& psi_values) {
    report.windows = check_window_condition(psi_values, inputs.start_time, inputs.rho, inputs.time_sequence);
    report.holds = true;
    for (const auto& w : report.windows) {
        if (!(w.margin >= 0.0)) {
            report.holds = false;
            report.failure_locations.push_back(w.worst_t);
        }
    }
    report.notes.push_back("window margins are logarithmic: margin = (t_i - t) ln(rho) - sum ln(psi)");
    report.notes.insert(report.notes.end(), inputs.notes.begin(), inputs.notes.end());
}

CertificateReport window_variant_theorem1_like(const CertificateInputs& inputs, CertificateVariant variant,
                                               const std::vector<double>& psi_values) {
    CertificateReport report;
    report.variant = variant;
    finish_window_report(report, inputs, psi_values);

    const Theorem1Constants k = constants_theorem1(inputs);
    report.t_bar = k.t_bar;
    report.beta = k.beta;
    const bool rho_admits_gain = inputs.rho > 1.0 / inputs.sigma;
    if (!rho_admits_gain) {
        report.notes.push_back("rho <= 1/sigma: the gain-bound clause is not claimed; the window condition and the "
                               "per-window recursion bound still apply");
    }
    report.gain_claimed = report.holds && rho_admits_gain;
    report.gain_bound = report.gain_claimed ? k.c : kInf;
    return report;
}

CertificateReport window_variant_corollary2_like(const CertificateInputs& inputs, CertificateVariant variant,
                                                 const std::vector<double>& psi_values) {
    CertificateReport report;
    report.variant = variant;
    finish_window_report(report, inputs, psi_values);

    double t_bar = 0.0;
    for (std::size_t i = 1; i < inputs.time_sequence.size(); ++i) {
        t_bar = std::max(t_bar, static_cast<double>(inputs.time_sequence[i] - inputs.time_sequence[i - 1]));
    }
    double max_gamma = 0.0;
    for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
        const double gamma = inputs.stabilizing_at(t) ? inputs.f_norm * inputs.trace_at(inputs.s_norm_sigma, t)
                                                      : inputs.f_norm;
        max_gamma = std::max(max_gamma, gamma);
    }
    const double growth = std::pow(inputs.sigma * inputs.rho, t_bar);
    const double beta_hat = 1.0 + growth * inputs.rho / (1.0 - inputs.rho) * max_gamma;
    const double c_hat = (growth / (1.0 - inputs.rho) + 1.0) * beta_hat;

    report.t_bar = t_bar;
    report.beta = beta_hat;
    report.gain_claimed = report.holds;
    report.gain_bound = report.gain_claimed ? c_hat : kInf;
    return report;
}

} // namespace

CertificateReport check_theorem1(const CertificateInputs& inputs) {
    inputs.validate();
    const auto values = psi_trace(inputs, [&](int t) { return psi(inputs, t); });
    return window_variant_theorem1_like(inputs, CertificateVariant::theorem1, values);
}

CertificateReport check_corollary1(const CertificateInputs& inputs, int n_width) {
    inputs.validate();
    const double d_bar = sup_n_width(inputs.delta_g_trace(), n_width);
    const auto values = psi_trace(inputs, [&](int t) { return psi_n(inputs, t, n_width, d_bar); });
    auto report = window_variant_theorem1_like(inputs, CertificateVariant::corollary1, values);
    report.notes.push_back("psi_N uses the constant coefficient c_{sigma,N}; N = " + std::to_string(n_width));
    return report;
}

CertificateReport check_corollary2(const CertificateInputs& inputs) {
    inputs.validate();
    const auto values = psi_trace(inputs, [&](int t) { return psi_hat(inputs, t); });
    return window_variant_corollary2_like(inputs, CertificateVariant::corollary2, values);
}

CertificateReport check_lemma9(const CertificateInputs& inputs, int n_width) {
    inputs.validate();
    const double d_bar = sup_n_width(inputs.delta_g_trace(), n_width);
    const auto values = psi_trace(inputs, [&](int t) { return psi_hat_n(inputs, t, n_width, d_bar); });
    auto report = window_variant_corollary2_like(inputs, CertificateVariant::lemma9_cN, values);
    report.notes.push_back("psi_hat_N uses the constant coefficient c_{sigma,N}; N = " + std::to_string(n_width));
    return report;
}

CertificateReport check_lemma10(const CertificateInputs& inputs) {
    inputs.validate();
    CertificateReport report;
    report.variant = CertificateVariant::lemma10_special;
    report.t_bar = 1.0;

    for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
        if (!inputs.stabilizing_at(t)) {
            report.failure_locations.push_back(t);
        }
    }
    if (!report.failure_locations.empty()) {
        report.applicable = false;
        report.holds = false;
        report.notes.push_back("the all-stabilizing special case cannot certify this schedule: destabilizing frozen "
                               "loops at " + std::to_string(report.failure_locations.size()) + " time(s)");
        return report;
    }

    report.holds = true;
    double sup_s = 0.0;
    for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
        sup_s = std::max(sup_s, inputs.trace_at(inputs.s_norm, t));
        const double required = inputs.rho / inputs.trace_at(inputs.l_norm, t);
        const double achieved = inputs.trace_at(inputs.c_coeff, t);
        WindowMargin wm;
        wm.window_start = t - 1;
        wm.window_end = t;
        wm.worst_t = t;
        wm.log_required = std::log(required);
        wm.log_achieved = std::log(achieved);
        wm.margin = wm.log_required - wm.log_achieved;
        if (!(achieved <= required)) {
            report.holds = false;
            report.failure_locations.push_back(t);
        }
        report.windows.push_back(wm);
    }
    report.beta = inputs.f_norm * sup_s;
    const bool rho_admits_gain = inputs.rho > 1.0 / inputs.sigma;
    if (!rho_admits_gain) {
        report.notes.push_back("rho <= 1/sigma: outside this variant's stated range; gain bound not claimed");
    }
    report.gain_claimed = report.holds && rho_admits_gain;
    report.gain_bound = report.gain_claimed ? report.beta / (1.0 - inputs.rho) : kInf;
    report.notes.insert(report.notes.end(), inputs.notes.begin(), inputs.notes.end());
    return report;
}

double tolerable_variation_bound(double sup_l_norm, double sigma, double sigma0, double rho, int n_width) {
    if (!(sigma >= 1.0 && sigma < sigma0)) {
        throw std::invalid_argument("tolerable_variation_bound: requires 1 <= sigma < sigma0");
    }
    if (n_width < 1) {
        throw std::invalid_argument("tolerable_variation_bound: N must be >= 1");
    }
    if (!(sup_l_norm > 0.0)) {
        throw std::invalid_argument("tolerable_variation_bound: sup ||l_t|| must be positive");
    }
    const double ratio = sigma0 / sigma;
    return std::pow(ratio, 1 - n_width) * std::exp(1.0) * std::log(ratio) / sup_l_norm * rho;
}

CertificateReport check_corollary3(const CertificateInputs& inputs, int n_width) {
    inputs.validate();
    CertificateReport report;
    report.variant = CertificateVariant::corollary3_bound;
    report.t_bar = 1.0;

    double sup_l = 0.0;
    double sup_s = 0.0;
    for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
        sup_l = std::max(sup_l, inputs.trace_at(inputs.l_norm, t));
        sup_s = std::max(sup_s, inputs.trace_at(inputs.s_norm, t));
    }
    const double bound = std::isinf(sup_l) ? 0.0 : tolerable_variation_bound(sup_l, inputs.sigma, inputs.sigma0,
                                                                             inputs.rho, n_width);
    const double d_bar = sup_n_width(inputs.delta_g_trace(), n_width);

    WindowMargin wm;
    wm.window_start = inputs.start_time;
    wm.window_end = inputs.horizon_end();
    wm.worst_t = inputs.start_time;
    wm.log_required = bound;
    wm.log_achieved = d_bar;
    wm.margin = bound - d_bar;
    report.windows.push_back(wm);
    report.notes.push_back("margin is linear: tolerable bound minus measured N-width average variation; N = " +
                           std::to_string(n_width));

    report.holds = d_bar <= bound;
    report.beta = inputs.f_norm * sup_s;
    const bool rho_admits_gain = inputs.rho > 1.0 / inputs.sigma;
    report.gain_claimed = report.holds && rho_admits_gain && std::isfinite(sup_s);
    report.gain_bound = report.gain_claimed ? report.beta / (1.0 - inputs.rho) : kInf;
    if (std::isinf(sup_l)) {
        report.notes.push_back("sup ||l_t|| is infinite (destabilizing frozen loops), so the tolerable bound is 0");
    }
    report.notes.insert(report.notes.end(), inputs.notes.begin(), inputs.notes.end());
    return report;
}

CertificateReport zames_wang_check(const VariationTrace& trace, double sup_l_norm, double sigma, double sigma0,
                                   double rho) {
    CertificateReport report;
    report.variant = CertificateVariant::zames_wang;
    report.t_bar = 1.0;
    const double bound =
        std::isinf(sup_l_norm) ? 0.0 : tolerable_variation_bound(sup_l_norm, sigma, sigma0, rho, 1);

    report.holds = true;
    for (int t = trace.start_time; t <= trace.end_time(); ++t) {
        const double achieved = trace.at(t);
        WindowMargin wm;
        wm.window_start = t - 1;
        wm.window_end = t;
        wm.worst_t = t;
        wm.log_required = bound;
        wm.log_achieved = achieved;
        wm.margin = bound - achieved;
        report.windows.push_back(wm);
        if (!(achieved <= bound)) {
            report.holds = false;
            report.failure_locations.push_back(t);
        }
    }
    report.notes.push_back("margin is linear: worst-case per-step bound minus measured ||nabla g_t||");
    if (std::isinf(sup_l_norm)) {
        // The baseline's premise (all frozen loops stabilizing) fails, so
        // even a vacuously satisfied inequality certifies nothing.
        report.applicable = false;
        report.notes.push_back("sup ||l_t|| is infinite (destabilizing frozen loops), so the per-step bound is 0 "
                               "and the baseline premise fails");
    }
    return report;
}

double adaptive_plant_bound(double controller_factor_norm, double sup_l_lambda, double sigma, double lambda,
                            double rho, int n_width) {
    if (!(controller_factor_norm > 0.0)) {
        throw std::invalid_argument("adaptive_plant_bound: controller factor norm must be positive");
    }
    return tolerable_variation_bound(sup_l_lambda, sigma, lambda, rho, n_width) / controller_factor_norm;
}

CertificateReport evaluate_certificate(const CertificateInputs& inputs, CertificateVariant variant,
                                       std::optional<int> n_width) {
    const int n = n_width.value_or(1);
    switch (variant) {
    case CertificateVariant::theorem1:
        return check_theorem1(inputs);
    case CertificateVariant::corollary1:
        return check_corollary1(inputs, n);
    case CertificateVariant::corollary2:
        return check_corollary2(inputs);
    case CertificateVariant::lemma9_cN:
        return check_lemma9(inputs, n);
    case CertificateVariant::lemma10_special:
        return check_lemma10(inputs);
    case CertificateVariant::corollary3_bound:
        return check_corollary3(inputs, n);
    case CertificateVariant::zames_wang: {
        inputs.validate();
        double sup_l = 0.0;
        double sup_s = 0.0;
        for (int t = inputs.start_time; t <= inputs.horizon_end(); ++t) {
            sup_l = std::max(sup_l, inputs.trace_at(inputs.l_norm, t));
            sup_s = std::max(sup_s, inputs.trace_at(inputs.s_norm, t));
        }
        auto report = zames_wang_check(inputs.delta_g_trace(), sup_l, inputs.sigma, inputs.sigma0, inputs.rho);
        report.beta = inputs.f_norm * sup_s;
        const bool rho_admits_gain = inputs.rho > 1.0 / inputs.sigma;
        report.gain_claimed = report.holds && rho_admits_gain && std::isfinite(sup_s);
        report.gain_bound = report.gain_claimed ? report.beta / (1.0 - inputs.rho) : kInf;
        report.notes.insert(report.notes.end(), inputs.notes.begin(), inputs.notes.end());
        return report;
    }
    }
    throw std::logic_error("evaluate_certificate: unhandled variant");
}

ProposedSequence propose_time_sequence(const std::vector<double>& psi_values, int psi_start, double rho,
                                       int max_gap) {
    if (max_gap < 1) {
        throw std::invalid_argument("propose_time_sequence: max_gap must be >= 1");
    }
    const int end = psi_start + static_cast<int>(psi_values.size()) - 1;
    const double log_rho = std::log(rho);

    ProposedSequence out;
    // Anchor one step before the horizon: the zero-initial-condition time,
    // whose state norm is identically zero.
    out.sequence.push_back(psi_start - 1);
    int prev = psi_start - 1;
    while (prev < end) {
        int chosen = -1;
        for (int cand = prev + 1; cand <= std::min(prev + max_gap, end); ++cand) {
            bool feasible = true;
            double cum = 0.0;
            for (int j = cand; j >= prev + 1; --j) {
                cum += std::log(psi_values[static_cast<std::size_t>(j - psi_start)]);
                if (static_cast<double>(cand - (j - 1)) * log_rho < cum) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                chosen = cand;
                break;
            }
        }
        if (chosen < 0) {
            out.ok = false;
            out.first_uncoverable = prev + 1; // first time no window can cover
            return out;
        }
        out.sequence.push_back(chosen);
        prev = chosen;
    }
    out.ok = true;
    return out;
}

std::vector<double> unroll_recursion(const std::vector<double>& decay, const std::vector<double>& forcing,
                                     double initial) {
    if (decay.size() != forcing.size()) {
        throw std::invalid_argument("unroll_recursion: traces must be aligned");
    }
    const std::size_t n = decay.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        // Suffix products accumulated from tau = t down to the initial term.
        double acc = forcing[t];
        double prod = 1.0;
        for (std::size_t tau = t; tau > 0; --tau) {
            prod *= decay[tau];
            acc += prod * forcing[tau - 1];
        }
        prod *= decay[0];
        acc += prod * initial;
        out[t] = acc;
    }
    return out;
}

} // namespace frozentime
