#include "frozentime/norms.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace frozentime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_row_sum(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("spectral_radius: matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument("spectral_radius: matrix entries must be finite");
    }
    if (m.rows() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::optional<FrozenLoopMatrices> frozen_loop_matrices(const LoopFunction& g, int tau) {
    switch (g.kind()) {
    case LoopKind::memoryless_matrix: {
        const auto& n = std::get<MemorylessMatrix>(g.node());
        const Eigen::MatrixXd& a = n.gain.at(tau);
        return FrozenLoopMatrices{a, Eigen::MatrixXd::Zero(a.rows(), a.cols()), false};
    }
    case LoopKind::one_step_linear: {
        const auto& n = std::get<OneStepLinear>(g.node());
        return FrozenLoopMatrices{n.lag0.at(tau), n.lag1.at(tau), false};
    }
    case LoopKind::dead_zone_composite: {
        const auto& n = std::get<DeadZoneComposite>(g.node());
        auto inner = frozen_loop_matrices(*n.inner, tau);
        if (!inner) {
            return std::nullopt;
        }
        return FrozenLoopMatrices{inner->a.cwiseAbs(), inner->b.cwiseAbs(), true};
    }
    case LoopKind::ti_wrapper: {
        const auto& n = std::get<TimeInvariantWrapper>(g.node());
        return frozen_loop_matrices(*n.inner, n.frozen_at);
    }
    default:
        return std::nullopt;
    }
}

Eigen::MatrixXd companion_matrix(const FrozenLoopMatrices& m) {
    const Eigen::Index n = m.a.rows();
    if (m.b.isZero(0.0)) {
        return m.a;
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    comp.topLeftCorner(n, n) = m.a;
    comp.topRightCorner(n, n) = m.b;
    comp.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return comp;
}

FrozenClass classify_frozen(const LoopFunction& g, int tau, double sigma0) {
    const auto m = frozen_loop_matrices(g, tau);
    if (!m) {
        throw std::invalid_argument("classify_frozen: loop kind has no computable companion form (unclassifiable)");
    }
    const double rho = spectral_radius(companion_matrix(*m));
    return rho < 1.0 / sigma0 - 1e-9 ? FrozenClass::stabilizing : FrozenClass::destabilizing;
}

NormEstimate impulse_response_norm(const FrozenLoopMatrices& m, double sigma, bool include_lag0, double tol) {
    const Eigen::Index dim = m.a.rows();
    const Eigen::MatrixXd comp = companion_matrix(m);
    const double rho = spectral_radius(comp);
    const NormMethod method = m.majorant ? NormMethod::lipschitz_bound : NormMethod::impulse_truncation;

    // S_0 = I, S_k = A S_{k-1} + B S_{k-2}; accumulated as the stacked state
    // V_k = comp * V_{k-1}.
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(comp.rows(), dim);
    v.topLeftCorner(dim, dim) = Eigen::MatrixXd::Identity(dim, dim);

    Eigen::MatrixXd weighted_abs_sum = include_lag0
                                           ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(dim, dim))
                                           : Eigen::MatrixXd(Eigen::MatrixXd::Zero(dim, dim));

    if (sigma * rho >= 1.0 - 1e-12) {
        // Divergent weighted series: report the trivial partial sum as the
        // lower bound and flag the norm as nonexistent at this weight.
        return {max_row_sum(weighted_abs_sum), kInf, NormMethod::impulse_truncation};
    }

    // Geometric envelope for the tail: find a period P with
    // eta = sigma^P ||comp^P|| < 1 (exists since sigma * rho < 1), and
    // D = sum_{r=1..P} sigma^r ||comp^r||. Then
    //   sum_{k>K} sigma^k ||S_k||  <=  sigma^K ||V_K|| * D / (1 - eta).
    double eta = sigma * max_row_sum(comp);
    double d_sum = eta;
    {
        Eigen::MatrixXd power = comp;
        double weight = sigma;
        int p = 1;
        const int p_max = 1 << 16;
        while (eta >= 0.5 && p < p_max) {
            power = power * comp;
            weight *= sigma;
            ++p;
            eta = weight * max_row_sum(power);
            d_sum += eta;
        }
        if (eta >= 0.5) {
            // Could not certify geometric decay within the power budget.
            return {max_row_sum(weighted_abs_sum), kInf, NormMethod::impulse_truncation};
        }
    }

    const int k_max = 1 << 20;
    double sigma_pow = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        v = comp * v;
        sigma_pow *= sigma;
        weighted_abs_sum += sigma_pow * v.topRows(dim).cwiseAbs();
        const double tail = sigma_pow * max_row_sum(v) * d_sum / (1.0 - eta);
        if (tail <= tol) {
            const double partial = max_row_sum(weighted_abs_sum);
            return {m.majorant ? 0.0 : partial, partial + tail, method};
        }
    }
    return {max_row_sum(weighted_abs_sum), kInf, NormMethod::impulse_truncation};
}

ClosedLoopNorms closed_loop_frozen_norms(const LoopFunction& g, int tau, double sigma, double sigma0, double tol) {
    const auto m = frozen_loop_matrices(g, tau);
    if (!m) {
        throw std::invalid_argument("closed_loop_frozen_norms: loop kind has no computable companion form");
    }
    ClosedLoopNorms out;
    out.s_norm = impulse_response_norm(*m, 1.0, /*include_lag0=*/true, tol);
    out.s_norm_sigma = impulse_response_norm(*m, sigma, /*include_lag0=*/true, tol);
    out.l_norm = impulse_response_norm(*m, sigma0, /*include_lag0=*/false, tol);
    return out;
}

namespace {

NormEstimate fir_norm_one_step(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma) {
    const Eigen::VectorXd row = a.cwiseAbs().rowwise().sum() + sigma * b.cwiseAbs().rowwise().sum();
    return NormEstimate::exact(row.maxCoeff(), NormMethod::exact_rowsum);
}

} // namespace

NormEstimate induced_norm_frozen(const LoopFunction& h, int tau, double sigma, double tol) {
    if (!(sigma >= 1.0)) {
        throw std::invalid_argument("induced_norm_frozen: sigma must be >= 1");
    }
    switch (h.kind()) {
    case LoopKind::memoryless_matrix: {
        const auto& n = std::get<MemorylessMatrix>(h.node());
        return NormEstimate::exact(max_row_sum(n.gain.at(tau)), NormMethod::exact_rowsum);
    }
    case LoopKind::one_step_linear: {
        const auto& n = std::get<OneStepLinear>(h.node());
        return fir_norm_one_step(n.lag0.at(tau), n.lag1.at(tau), sigma);
    }
    case LoopKind::ti_wrapper: {
        const auto& n = std::get<TimeInvariantWrapper>(h.node());
        return induced_norm_frozen(*n.inner, n.frozen_at, sigma, tol);
    }
    case LoopKind::dead_zone_composite: {
        const auto& n = std::get<DeadZoneComposite>(h.node());
        const NormEstimate inner = induced_norm_frozen(*n.inner, tau, sigma, tol);
        std::mt19937_64 rng(0x5eedULL ^ static_cast<std::uint64_t>(tau));
        const double lower = std::min(random_search_snapshot_norm(h, tau, sigma, rng), inner.upper);
        return {lower, inner.upper, NormMethod::lipschitz_bound};
    }
    case LoopKind::composition: {
        const auto& n = std::get<Composition>(h.node());
        const NormEstimate outer = induced_norm_frozen(*n.outer, tau, sigma, tol);
        // ||(H K)_tau|| <= ||h_tau|| * sup_s ||k_s||; the inner sup ranges
        // over the schedule window (the description is constant outside).
        const TimeRange w = n.inner->schedule_window();
        double inner_sup = 0.0;
        for (int s = w.first; s <= w.last; ++s) {
            inner_sup = std::max(inner_sup, induced_norm_frozen(*n.inner, s, sigma, tol).upper);
        }
        std::mt19937_64 rng(0xc0137ULL ^ static_cast<std::uint64_t>(tau));
        const double upper = outer.upper * inner_sup;
        const double lower = std::min(random_search_snapshot_norm(h, tau, sigma, rng), upper);
        return {lower, upper, NormMethod::lipschitz_bound};
    }
    }
    throw std::logic_error("induced_norm_frozen: unhandled kind");
}

double random_search_snapshot_norm(const LoopFunction& h, int tau, double sigma, std::mt19937_64& rng, int trials,
                                   int lookback) {
    const int dim = h.input_dimension();
    double best = 0.0;

    const auto try_input = [&](const Signal& u) {
        const WeightSpec w(sigma, std::numeric_limits<double>::infinity());
        const double denom = norm_upto(u, w, tau);
        if (denom <= 0.0) {
            return;
        }
        const double num = vec_norm(snapshot_apply(h, tau, u));
        best = std::max(best, num / denom);
    };

    // Sign-pattern candidates at lags 0 and 1, scaled to the weighted unit
    // ball boundary; these attain the exact row-sum norm for FIR kinds.
    const int patterns = 1 << dim;
    const auto sign_vector = [dim](int bits, double magnitude) {
        Eigen::VectorXd v(dim);
        for (int j = 0; j < dim; ++j) {
            v[j] = ((bits >> j) & 1) != 0 ? magnitude : -magnitude;
        }
        return v;
    };
    for (int p1 = 0; p1 < patterns; ++p1) {
        for (int p0 = 0; p0 < patterns; ++p0) {
            Signal u(tau - 1, dim);
            u.push_back(sign_vector(p1, sigma));
            u.push_back(sign_vector(p0, 1.0));
            try_input(u);
        }
    }

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
        Signal u(tau - lookback, dim);
        for (int s = tau - lookback; s <= tau; ++s) {
            Eigen::VectorXd v(dim);
            for (int j = 0; j < dim; ++j) {
                v[j] = unit(rng);
            }
            // Allow amplitudes up to the weighted envelope sigma^(tau - s).
            u.push_back(std::pow(sigma, tau - s) * v);
        }
        try_input(u);
    }
    return best;
}

} // namespace frozentime
