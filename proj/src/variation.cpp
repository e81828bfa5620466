#include "frozentime/variation.hpp"

#include <cmath>
#include <stdexcept>

namespace frozentime {

void VariationTrace::validate() const {
    if (!(sigma >= 1.0)) {
        throw std::invalid_argument("VariationTrace: sigma must be >= 1");
    }
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("VariationTrace: entries must be finite and nonnegative");
        }
    }
}

NormEstimate snapshot_delta_norm(const LoopFunction& h, int t, double sigma, double tol) {
    if (!(sigma >= 1.0)) {
        throw std::invalid_argument("snapshot_delta_norm: sigma must be >= 1");
    }
    switch (h.kind()) {
    case LoopKind::memoryless_matrix: {
        const auto& n = std::get<MemorylessMatrix>(h.node());
        const Eigen::MatrixXd diff = n.gain.at(t - 1) - n.gain.at(t);
        return NormEstimate::exact(diff.cwiseAbs().rowwise().sum().maxCoeff(), NormMethod::exact_rowsum);
    }
    case LoopKind::one_step_linear: {
        const auto& n = std::get<OneStepLinear>(h.node());
        const Eigen::VectorXd row = (n.lag0.at(t - 1) - n.lag0.at(t)).cwiseAbs().rowwise().sum() +
                                    sigma * (n.lag1.at(t - 1) - n.lag1.at(t)).cwiseAbs().rowwise().sum();
        return NormEstimate::exact(row.maxCoeff(), NormMethod::exact_rowsum);
    }
    case LoopKind::ti_wrapper:
        return NormEstimate::exact(0.0, NormMethod::exact_rowsum);
    case LoopKind::dead_zone_composite: {
        // |dz(a) - dz(b)| <= |a - b| componentwise, so the composite's
        // variation is dominated by the inner variation.
        const auto& n = std::get<DeadZoneComposite>(h.node());
        const NormEstimate inner = snapshot_delta_norm(*n.inner, t, sigma, tol);
        return {0.0, inner.upper, NormMethod::lipschitz_bound};
    }
    case LoopKind::composition: {
        const auto& n = std::get<Composition>(h.node());
        if (!n.inner->time_invariant()) {
            throw std::invalid_argument("snapshot_delta_norm: composition with time-varying inner is unsupported");
        }
        const NormEstimate outer = snapshot_delta_norm(*n.outer, t, sigma, tol);
        const NormEstimate k = induced_norm_frozen(*n.inner, 0, sigma, tol);
        return {0.0, outer.upper * k.upper, NormMethod::lipschitz_bound};
    }
    }
    throw std::logic_error("snapshot_delta_norm: unhandled kind");
}

VariationTrace variation_trace(const LoopFunction& h, TimeRange horizon, double sigma, double tol) {
    VariationTrace trace;
    trace.sigma = sigma;
    trace.start_time = horizon.first;
    trace.values.reserve(static_cast<std::size_t>(horizon.length()));
    for (int t = horizon.first; t <= horizon.last; ++t) {
        trace.values.push_back(snapshot_delta_norm(h, t, sigma, tol).upper);
    }
    return trace;
}

double n_width_average(const VariationTrace& trace, int n_width, int t) {
    if (n_width <= 0) {
        throw std::invalid_argument("n_width_average: N must be positive");
    }
    double sum = 0.0;
    for (int i = t - n_width + 1; i <= t; ++i) {
        sum += trace.at(i);
    }
    return sum / static_cast<double>(n_width);
}

double sup_n_width(const VariationTrace& trace, int n_width) {
    if (n_width <= 0) {
        throw std::invalid_argument("sup_n_width: N must be positive");
    }
    double best = 0.0;
    for (int t = trace.start_time; t <= trace.end_time(); ++t) {
        best = std::max(best, n_width_average(trace, n_width, t));
    }
    return best;
}

double c_sigma_sigma0(const VariationTrace& trace, double sigma0, int t) {
    if (!(trace.sigma < sigma0)) {
        throw std::invalid_argument("c_sigma_sigma0: requires sigma < sigma0");
    }
    const double alpha = trace.sigma / sigma0;
    // Partial sums grow only while the window [t-i+1, t] still uncovers new
    // support; afterwards alpha^i strictly shrinks the product.
    const int cover = std::max(1, t - trace.start_time + 1);
    double best = 0.0;
    double partial = 0.0;
    double alpha_pow = 1.0;
    for (int i = 1; i <= cover; ++i) {
        partial += trace.at(t - i + 1);
        alpha_pow *= alpha;
        best = std::max(best, alpha_pow * partial);
    }
    return best;
}

std::vector<double> c_sigma_sigma0_trace(const VariationTrace& trace, double sigma0, TimeRange horizon) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon.length()));
    for (int t = horizon.first; t <= horizon.last; ++t) {
        out.push_back(c_sigma_sigma0(trace, sigma0, t));
    }
    return out;
}

double c_sigma_n(double d_bar, double sigma, double sigma0, int n_width) {
    if (!(sigma >= 1.0 && sigma < sigma0)) {
        throw std::invalid_argument("c_sigma_n: requires 1 <= sigma < sigma0");
    }
    if (n_width < 1) {
        throw std::invalid_argument("c_sigma_n: N must be >= 1");
    }
    if (d_bar < 0.0) {
        throw std::invalid_argument("c_sigma_n: d_bar must be nonnegative");
    }
    const double ratio = sigma0 / sigma;
    return std::pow(ratio, n_width - 1) * d_bar / (std::exp(1.0) * std::log(ratio));
}

double product_variation_bound(double d_bar_g, double k_norm) {
    if (d_bar_g < 0.0 || k_norm < 0.0) {
        throw std::invalid_argument("product_variation_bound: inputs must be nonnegative");
    }
    return k_norm * d_bar_g;
}

double d_sigma_convention(const VariationTrace& trace) {
    double sup = 0.0;
    for (double v : trace.values) {
        sup = std::max(sup, v);
    }
    return trace.sigma * sup;
}

} // namespace frozentime
