#pragma once

#include "frozentime/variation.hpp"

#include <optional>
#include <string>

namespace frozentime {

/// Everything the sufficient-condition checks consume: the loop parameters
/// and the per-time norm traces evaluated along a horizon. Traces are
/// indexed from start_time; l_norm and s_norm entries are +inf at times
/// where the frozen loop is not stable at the corresponding weight.
struct CertificateInputs {
    double sigma = 1.2;
    double sigma0 = 1.44;
    double rho = 0.9;
    double f_norm = 1.0;

    int start_time = 0;
    std::vector<int> time_sequence; ///< strictly increasing, first entry anchors window 1

    std::vector<double> s_norm;       ///< ||s_t|| at weight 1
    std::vector<double> s_norm_sigma; ///< ||s_t|| at weight sigma (corollary2 forcing term)
    std::vector<double> l_norm;       ///< ||l_t|| at weight sigma0
    std::vector<double> g_norm;       ///< ||g_t|| at weight sigma
    std::vector<double> c_coeff;      ///< c_{sigma,sigma0}(G, t)
    std::vector<double> delta_g;      ///< ||nabla g_t|| at weight sigma
    std::vector<bool> stabilizing;

    std::vector<std::string> notes;

    [[nodiscard]] int horizon_end() const { return start_time + static_cast<int>(g_norm.size()) - 1; }
    [[nodiscard]] TimeRange horizon() const { return {start_time, horizon_end()}; }
    [[nodiscard]] double trace_at(const std::vector<double>& trace, int t) const;
    [[nodiscard]] bool stabilizing_at(int t) const;
    [[nodiscard]] VariationTrace delta_g_trace() const;

    /// Throws unless 1 <= sigma < sigma0, 0 < rho < 1, f_norm finite, the
    /// traces share one length, and the time sequence is strictly
    /// increasing inside the horizon.
    void validate() const;
};

enum class CertificateVariant {
    theorem1,
    corollary1,
    corollary2,
    lemma9_cN,
    lemma10_special,
    corollary3_bound,
    zames_wang,
};

std::string to_string(CertificateVariant v);

/// Worst-case slack of one window of the product condition
/// rho^(t_i - t) >= prod_{j=t+1}^{t_i} psi(j), in log space.
struct WindowMargin {
    int window_start = 0; ///< t_{i-1}
    int window_end = 0;   ///< t_i
    int worst_t = 0;      ///< argmin over t in [t_{i-1}, t_i - 1]
    double log_required = 0.0;
    double log_achieved = 0.0;
    /// log_required - log_achieved at worst_t; the window holds iff >= 0.
    double margin = 0.0;
};

struct CertificateReport {
    CertificateVariant variant = CertificateVariant::theorem1;
    bool applicable = true; ///< false when the variant's preconditions fail
    bool holds = false;

    std::vector<WindowMargin> windows;
    double t_bar = 0.0;
    double beta = 0.0; ///< beta, beta_hat, or c_bar numerator depending on variant

    double gain_bound = std::numeric_limits<double>::infinity();
    bool gain_claimed = false;

    std::vector<int> failure_locations;
    std::vector<std::string> notes;

    /// Smallest window margin (+inf when there are no windows).
    [[nodiscard]] double worst_margin() const;
};

/// Step coefficient of the primary window certificate (theorem1):
/// psi(t) = max{ min{ ||l_t|| c(t), ||g_t|| }, 1/sigma }.
/// An infinite l_norm falls through the min to the g_norm branch; c(t) = 0
/// yields a zero product even against an infinite l_norm (no variation, no
/// coupling term).
double psi(const CertificateInputs& inputs, int t);

/// psi with the constant coefficient c_{sigma,N}(G) built from d_bar.
double psi_n(const CertificateInputs& inputs, int t, int n_width, double d_bar);

/// Branching step coefficient of the all-time certificate
/// (corollary2): stabilizing times use
/// max{1/sigma, ||l_t|| c(t)}, destabilizing times max{1/sigma, ||g_t||}.
double psi_hat(const CertificateInputs& inputs, int t);

/// psi_hat with c_{sigma,N}(G) in place of c(t).
double psi_hat_n(const CertificateInputs& inputs, int t, int n_width, double d_bar);

/// Evaluates the product condition over each window of `time_sequence`
/// given psi values on [psi_start, psi_start + len). Products are formed in
/// log space.
std::vector<WindowMargin> check_window_condition(const std::vector<double>& psi_values, int psi_start, double rho,
                                                 const std::vector<int>& time_sequence);

struct Theorem1Constants {
    double t_bar = 0.0;
    double beta = 0.0;
    double c = 0.0;
};

/// t_bar = max window width; beta = t_bar ||F|| sup_i max_t ||s_t|| rho^(t_i - t);
/// c = sigma^(t_bar - 1) beta / (1 - rho).
Theorem1Constants constants_theorem1(const CertificateInputs& inputs);

CertificateReport check_theorem1(const CertificateInputs& inputs);
CertificateReport check_corollary1(const CertificateInputs& inputs, int n_width);
CertificateReport check_corollary2(const CertificateInputs& inputs);
CertificateReport check_lemma9(const CertificateInputs& inputs, int n_width);

/// Per-time special case: c(t) <= rho / ||l_t|| for all t, with the
/// all-time gain bound c_bar = ||F|| sup_t ||s_t|| / (1 - rho). Requires
/// every frozen loop stabilizing; otherwise the report is inapplicable.
CertificateReport check_lemma10(const CertificateInputs& inputs);

/// Tolerable average-variation bound (corollary3_bound):
/// (sigma0/sigma)^(1-N) (e ln(sigma0/sigma)) rho / sup_l.
double tolerable_variation_bound(double sup_l_norm, double sigma, double sigma0, double rho, int n_width);

/// Averaged-variation condition d_bar_{sigma,N}(G) <= tolerable bound.
CertificateReport check_corollary3(const CertificateInputs& inputs, int n_width);

/// Baseline worst-case per-step condition
/// ||nabla g_t|| <= tolerable bound with N = 1, for all t.
CertificateReport zames_wang_check(const VariationTrace& trace, double sup_l_norm, double sigma, double sigma0,
                                   double rho);

/// Tolerable average plant-variation rate when the loop is plant *
/// controller factor: scales the tolerable bound (at degree lambda) by
/// the reciprocal controller factor norm.
double adaptive_plant_bound(double controller_factor_norm, double sup_l_lambda, double sigma, double lambda,
                            double rho, int n_width);

/// Unified entry point used by the CLI; n_width is required by the
/// N-averaged variants.
CertificateReport evaluate_certificate(const CertificateInputs& inputs, CertificateVariant variant,
                                       std::optional<int> n_width = std::nullopt);

struct ProposedSequence {
    bool ok = false;
    std::vector<int> sequence;       ///< includes the anchor time
    int first_uncoverable = 0;       ///< valid when !ok
};

/// Greedy window construction: starting from the anchor, closes each window
/// at the smallest feasible end within max_gap steps.
ProposedSequence propose_time_sequence(const std::vector<double>& psi_values, int psi_start, double rho,
                                       int max_gap);

/// Closed-form unrolling of v(t) = decay(t) v(t-1) + forcing(t):
/// v(t) = (prod decay) initial + sum_tau (prod_{j>tau} decay(j)) forcing(tau).
std::vector<double> unroll_recursion(const std::vector<double>& decay, const std::vector<double>& forcing,
                                     double initial);

} // namespace frozentime
