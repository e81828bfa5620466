#pragma once

#include "frozentime/norms.hpp"

namespace frozentime {

/// Per-time snapshot-variation norms ||nabla g_t||_{sigma inf}, zero outside
/// the stored window (schedules are clamped there, so consecutive snapshots
/// coincide).
struct VariationTrace {
    double sigma = 1.0;
    int start_time = 0;
    std::vector<double> values;

    [[nodiscard]] double at(int t) const {
        const int idx = t - start_time;
        if (idx < 0 || idx >= static_cast<int>(values.size())) {
            return 0.0;
        }
        return values[static_cast<std::size_t>(idx)];
    }
    [[nodiscard]] int end_time() const { return start_time + static_cast<int>(values.size()) - 1; }
    void validate() const;
};

/// ||nabla h_t||_{sigma inf}: the induced norm of the consecutive-snapshot
/// difference. Exact (parameter-difference row sums) for schedule-backed
/// kinds; Lipschitz-dominated upper bound with search lower bound for
/// dead-zone composites.
NormEstimate snapshot_delta_norm(const LoopFunction& h, int t, double sigma, double tol = 1e-9);

/// Upper-bound variation trace of h over a horizon.
VariationTrace variation_trace(const LoopFunction& h, TimeRange horizon, double sigma, double tol = 1e-9);

/// N-width average variation rate at t: mean of the trace over
/// [t - N + 1, t] with zero padding before the support.
double n_width_average(const VariationTrace& trace, int n_width, int t);

/// Least upper bound of n_width_average over the trace support.
double sup_n_width(const VariationTrace& trace, int n_width);

/// Variation coefficient c_{sigma,sigma0}(G, t) =
///   sup_{i >= 1} (sigma/sigma0)^i sum_{q=t-i+1}^{t} ||nabla g_q||.
/// Evaluated exactly: past the trace support the partial sum is constant
/// and the geometric factor strictly decreases, so the supremum over the
/// infinite tail is attained at the first such i.
double c_sigma_sigma0(const VariationTrace& trace, double sigma0, int t);

/// c_sigma_sigma0 for every t in the horizon.
std::vector<double> c_sigma_sigma0_trace(const VariationTrace& trace, double sigma0, TimeRange horizon);

/// Average-variation coefficient c_{sigma,N}(G) =
///   (e ln(sigma0/sigma))^-1 (sigma0/sigma)^(N-1) d_bar.
double c_sigma_n(double d_bar, double sigma, double sigma0, int n_width);

/// Variation bound for a product H = G K with K time-invariant:
/// d_bar(H) <= ||K|| d_bar(G).
double product_variation_bound(double d_bar_g, double k_norm);

/// The prior work's variation measure d_sigma(H) = sigma * sup_t
/// ||nabla h_t||_{sigma inf}; exposed so both conventions are explicit.
double d_sigma_convention(const VariationTrace& trace);

} // namespace frozentime
