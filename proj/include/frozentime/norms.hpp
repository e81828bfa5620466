#pragma once

#include "frozentime/loop_function.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace frozentime {

enum class NormMethod { exact_rowsum, impulse_truncation, random_search, lipschitz_bound };

/// Two-sided estimate of an induced norm. Exact methods report
/// lower == upper; bounds report upper >= lower, with upper = +inf when the
/// norm does not exist at the requested weight.
struct NormEstimate {
    double lower = 0.0;
    double upper = 0.0;
    NormMethod method = NormMethod::exact_rowsum;

    [[nodiscard]] bool is_exact() const { return lower == upper; }
    [[nodiscard]] bool is_finite() const { return std::isfinite(upper); }

    static NormEstimate exact(double value, NormMethod m) { return {value, value, m}; }
};

/// Largest eigenvalue magnitude of a square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// One-step-linear description of a loop function frozen at a given time:
/// v(t) -> a v(t) + b v(t-1). For dead-zone composites the matrices are the
/// entrywise absolute values of the inner description (a majorant whose
/// response dominates the nonlinear loop componentwise).
struct FrozenLoopMatrices {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    bool majorant = false;
};

/// Extraction of the frozen one-step description, when the kind admits one
/// (memoryless, one-step-linear, dead-zone over those, TI wrappers thereof).
std::optional<FrozenLoopMatrices> frozen_loop_matrices(const LoopFunction& g, int tau);

/// Companion matrix of the loop recursion y(t) = a y(t-1) + b y(t-2):
/// [[a, b], [I, 0]], reduced to `a` when b = 0.
Eigen::MatrixXd companion_matrix(const FrozenLoopMatrices& m);

/// sigma-weighted induced norm of the frozen-time snapshot h_tau.
///
/// Memoryless and one-step kinds are finite impulse responses: the exact
/// value is the max row sum of |A_tau| (+ sigma |B_tau|). Dead-zone and
/// composition kinds report a Lipschitz-domination upper bound with a
/// random-search lower bound.
NormEstimate induced_norm_frozen(const LoopFunction& h, int tau, double sigma, double tol = 1e-9);

enum class FrozenClass { stabilizing, destabilizing };

/// Classifies the frozen closed loop (I - G_tau T)^-1 G_tau T by the
/// spectral radius of its companion matrix: stabilizing iff
/// rho < 1/sigma0 - 1e-9 (borderline counts as destabilizing). Dead-zone
/// composites are classified through their linear majorant. Throws for
/// kinds with no computable companion form.
FrozenClass classify_frozen(const LoopFunction& g, int tau, double sigma0);

/// Norms of the frozen closed-loop snapshots s_tau of (I - G_tau T)^-1 and
/// l_tau of (I - G_tau T)^-1 G_tau T, each computed from the weighted
/// impulse-response row sums with a geometric tail bound:
///   s_norm        at weight 1
///   s_norm_sigma  at weight sigma
///   l_norm        at weight sigma0 (+inf when the loop is not stable there)
struct ClosedLoopNorms {
    NormEstimate s_norm;
    NormEstimate s_norm_sigma;
    NormEstimate l_norm;
};

ClosedLoopNorms closed_loop_frozen_norms(const LoopFunction& g, int tau, double sigma, double sigma0,
                                         double tol = 1e-9);

/// sigma-weighted l1 norm (max row sum) of the impulse response of the
/// closed loop y(t) = e(t) + a y(t-1) + b y(t-2), optionally without the
/// lag-0 identity term (the l system). Returns upper = +inf when
/// sigma * rho(companion) >= 1.
NormEstimate impulse_response_norm(const FrozenLoopMatrices& m, double sigma, bool include_lag0,
                                   double tol = 1e-9);

/// Random-search lower bound for the snapshot norm ||h_tau||_{sigma inf}:
/// max response ratio over sign-pattern candidates and `trials` random
/// inputs supported on a lookback window ending at tau.
double random_search_snapshot_norm(const LoopFunction& h, int tau, double sigma, std::mt19937_64& rng,
                                   int trials = 64, int lookback = 8);

} // namespace frozentime
