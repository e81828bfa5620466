#include "frozentime/loop_function.hpp"

#include <stdexcept>

namespace frozentime {

MatrixSchedule::MatrixSchedule(int start_time, std::vector<Eigen::MatrixXd> matrices)
    : start_time_(start_time), matrices_(std::move(matrices)) {
    if (matrices_.empty()) {
        throw std::invalid_argument("MatrixSchedule: needs at least one matrix");
    }
    const auto rows = matrices_.front().rows();
    const auto cols = matrices_.front().cols();
    for (const auto& m : matrices_) {
        if (m.rows() != rows || m.cols() != cols) {
            throw std::invalid_argument("MatrixSchedule: all matrices must share one shape");
        }
        if (!m.allFinite()) {
            throw std::invalid_argument("MatrixSchedule: matrix entries must be finite");
        }
    }
}

MatrixSchedule MatrixSchedule::constant(Eigen::MatrixXd m) {
    std::vector<Eigen::MatrixXd> one;
    one.push_back(std::move(m));
    return MatrixSchedule(0, std::move(one));
}

const Eigen::MatrixXd& MatrixSchedule::at(int t) const {
    int idx = t - start_time_;
    if (idx < 0) {
        idx = 0;
    } else if (idx >= static_cast<int>(matrices_.size())) {
        idx = static_cast<int>(matrices_.size()) - 1;
    }
    return matrices_[static_cast<std::size_t>(idx)];
}

namespace {

struct Dims {
    int in;
    int out;
};

Dims dims_of(const LoopFunction::Node& node) {
    return std::visit(
        [](const auto& n) -> Dims {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MemorylessMatrix>) {
                return {n.gain.cols(), n.gain.rows()};
            } else if constexpr (std::is_same_v<T, OneStepLinear>) {
                if (n.lag0.rows() != n.lag1.rows() || n.lag0.cols() != n.lag1.cols()) {
                    throw std::invalid_argument("OneStepLinear: lag-0 and lag-1 schedules must share one shape");
                }
                return {n.lag0.cols(), n.lag0.rows()};
            } else if constexpr (std::is_same_v<T, DeadZoneComposite>) {
                return {n.inner->input_dimension(), n.inner->output_dimension()};
            } else if constexpr (std::is_same_v<T, Composition>) {
                if (n.outer->input_dimension() != n.inner->output_dimension()) {
                    throw std::invalid_argument("Composition: outer input dimension must match inner output dimension");
                }
                return {n.inner->input_dimension(), n.outer->output_dimension()};
            } else {
                static_assert(std::is_same_v<T, TimeInvariantWrapper>);
                return {n.inner->input_dimension(), n.inner->output_dimension()};
            }
        },
        node);
}

} // namespace

LoopFunction::LoopFunction(Node node) : node_(std::move(node)) {
    const Dims d = dims_of(node_);
    input_dim_ = d.in;
    output_dim_ = d.out;
}

LoopFunction LoopFunction::memoryless(MatrixSchedule gain) {
    return LoopFunction(Node{MemorylessMatrix{std::move(gain)}});
}

LoopFunction LoopFunction::one_step(MatrixSchedule lag0, MatrixSchedule lag1) {
    return LoopFunction(Node{OneStepLinear{std::move(lag0), std::move(lag1)}});
}

LoopFunction LoopFunction::dead_zone_over(LoopFunction inner) {
    return LoopFunction(Node{DeadZoneComposite{std::make_shared<const LoopFunction>(std::move(inner))}});
}

LoopFunction LoopFunction::compose(LoopFunction outer, LoopFunction inner) {
    return LoopFunction(Node{Composition{std::make_shared<const LoopFunction>(std::move(outer)),
                                         std::make_shared<const LoopFunction>(std::move(inner))}});
}

LoopFunction LoopFunction::frozen_at(LoopFunction inner, int tau) {
    return LoopFunction(Node{TimeInvariantWrapper{std::make_shared<const LoopFunction>(std::move(inner)), tau}});
}

LoopKind LoopFunction::kind() const {
    return std::visit(
        [](const auto& n) -> LoopKind {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MemorylessMatrix>) {
                return LoopKind::memoryless_matrix;
            } else if constexpr (std::is_same_v<T, OneStepLinear>) {
                return LoopKind::one_step_linear;
            } else if constexpr (std::is_same_v<T, DeadZoneComposite>) {
                return LoopKind::dead_zone_composite;
            } else if constexpr (std::is_same_v<T, Composition>) {
                return LoopKind::composition;
            } else {
                return LoopKind::ti_wrapper;
            }
        },
        node_);
}

bool LoopFunction::time_invariant() const {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MemorylessMatrix>) {
                return n.gain.size() == 1;
            } else if constexpr (std::is_same_v<T, OneStepLinear>) {
                return n.lag0.size() == 1 && n.lag1.size() == 1;
            } else if constexpr (std::is_same_v<T, DeadZoneComposite>) {
                return n.inner->time_invariant();
            } else if constexpr (std::is_same_v<T, Composition>) {
                return n.outer->time_invariant() && n.inner->time_invariant();
            } else {
                return true;
            }
        },
        node_);
}

TimeRange LoopFunction::schedule_window() const {
    return std::visit(
        [](const auto& n) -> TimeRange {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MemorylessMatrix>) {
                return {n.gain.start_time(), n.gain.end_time()};
            } else if constexpr (std::is_same_v<T, OneStepLinear>) {
                return {std::min(n.lag0.start_time(), n.lag1.start_time()),
                        std::max(n.lag0.end_time(), n.lag1.end_time())};
            } else if constexpr (std::is_same_v<T, DeadZoneComposite>) {
                return n.inner->schedule_window();
            } else if constexpr (std::is_same_v<T, Composition>) {
                const TimeRange a = n.outer->schedule_window();
                const TimeRange b = n.inner->schedule_window();
                return {std::min(a.first, b.first), std::max(a.last, b.last)};
            } else {
                return {0, 0};
            }
        },
        node_);
}

double dead_zone(double v) {
    if (v >= 0.5) {
        return v - 0.5;
    }
    if (v <= -0.5) {
        return v + 0.5;
    }
    return 0.0;
}

Eigen::VectorXd dead_zone(const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out[i] = dead_zone(v[i]);
    }
    return out;
}

Eigen::VectorXd eval_at(const LoopFunction& h, const InputFn& u, int t) {
    return std::visit(
        [&](const auto& n) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MemorylessMatrix>) {
                return n.gain.at(t) * u(t);
            } else if constexpr (std::is_same_v<T, OneStepLinear>) {
                return n.lag0.at(t) * u(t) + n.lag1.at(t) * u(t - 1);
            } else if constexpr (std::is_same_v<T, DeadZoneComposite>) {
                return dead_zone(eval_at(*n.inner, u, t));
            } else if constexpr (std::is_same_v<T, Composition>) {
                const LoopFunction& inner = *n.inner;
                InputFn v = [&inner, &u](int s) { return eval_at(inner, u, s); };
                return eval_at(*n.outer, v, t);
            } else {
                // (H_tau u)(t) = h_tau applied to the input shifted by tau - t.
                const int theta = n.frozen_at - t;
                InputFn shifted = [&u, theta](int s) { return u(s - theta); };
                return eval_at(*n.inner, shifted, n.frozen_at);
            }
        },
        h.node());
}

namespace {

InputFn signal_accessor(const Signal& u) {
    return [&u](int s) { return u.at(s); };
}

void require_input_dim(const LoopFunction& h, const Signal& u) {
    if (u.dimension() != h.input_dimension()) {
        throw std::invalid_argument("loop function input dimension mismatch");
    }
}

} // namespace

Signal apply(const LoopFunction& h, const Signal& u, TimeRange horizon) {
    require_input_dim(h, u);
    if (horizon.first > horizon.last) {
        throw std::domain_error("apply: horizon must satisfy first <= last");
    }
    const InputFn acc = signal_accessor(u);
    Signal y(horizon.first, h.output_dimension());
    for (int t = horizon.first; t <= horizon.last; ++t) {
        y.push_back(eval_at(h, acc, t));
    }
    return y;
}

Eigen::VectorXd snapshot_apply(const LoopFunction& h, int tau, const Signal& u) {
    require_input_dim(h, u);
    return eval_at(h, signal_accessor(u), tau);
}

Eigen::VectorXd frozen_extension_apply(const LoopFunction& h, int tau, const Signal& u, int t) {
    require_input_dim(h, u);
    const int theta = tau - t;
    InputFn shifted = [&u, theta](int s) { return u.at(s - theta); };
    return eval_at(h, shifted, tau);
}

Eigen::VectorXd nabla_snapshot_apply(const LoopFunction& h, int tau, const Signal& u, int t) {
    // Parameter-wise for schedule-backed kinds, operator-wise otherwise.
    switch (h.kind()) {
    case LoopKind::memoryless_matrix: {
        const auto& n = std::get<MemorylessMatrix>(h.node());
        require_input_dim(h, u);
        return (n.gain.at(tau - 1) - n.gain.at(tau)) * u.at(t);
    }
    case LoopKind::one_step_linear: {
        const auto& n = std::get<OneStepLinear>(h.node());
        require_input_dim(h, u);
        return (n.lag0.at(tau - 1) - n.lag0.at(tau)) * u.at(t) +
               (n.lag1.at(tau - 1) - n.lag1.at(tau)) * u.at(t - 1);
    }
    default:
        return frozen_extension_apply(h, tau - 1, u, t) - frozen_extension_apply(h, tau, u, t);
    }
}

Eigen::VectorXd nabla_extension_apply(const LoopFunction& h, int tau, const Signal& u, int t) {
    if (t > tau) {
        throw std::domain_error("nabla_extension_apply: requires t <= tau");
    }
    require_input_dim(h, u);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(h.output_dimension());
    for (int i = t + 1; i <= tau; ++i) {
        acc += nabla_snapshot_apply(h, i, u, t);
    }
    return acc;
}

} // namespace frozentime
