#pragma once

#include "frozentime/signal.hpp"

#include <functional>
#include <memory>
#include <variant>

namespace frozentime {

/// Time-indexed matrix schedule t -> M_t, stored densely over a window and
/// clamped to the nearest endpoint outside it. Clamping makes the schedule
/// total on Z with zero variation before and after the stored window.
class MatrixSchedule {
  public:
    MatrixSchedule(int start_time, std::vector<Eigen::MatrixXd> matrices);

    /// Schedule that returns the same matrix at every time.
    static MatrixSchedule constant(Eigen::MatrixXd m);

    [[nodiscard]] const Eigen::MatrixXd& at(int t) const;
    [[nodiscard]] int start_time() const { return start_time_; }
    [[nodiscard]] int end_time() const { return start_time_ + static_cast<int>(matrices_.size()) - 1; }
    [[nodiscard]] int rows() const { return static_cast<int>(matrices_.front().rows()); }
    [[nodiscard]] int cols() const { return static_cast<int>(matrices_.front().cols()); }
    [[nodiscard]] std::size_t size() const { return matrices_.size(); }
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& matrices() const { return matrices_; }

  private:
    int start_time_;
    std::vector<Eigen::MatrixXd> matrices_;
};

class LoopFunction;
using LoopFunctionPtr = std::shared_ptr<const LoopFunction>;

/// y(t) = A_t u(t)
struct MemorylessMatrix {
    MatrixSchedule gain;
};

/// y(t) = A_t u(t) + B_t u(t-1)
struct OneStepLinear {
    MatrixSchedule lag0;
    MatrixSchedule lag1;
};

/// y(t) = dead_zone(inner(u)(t)), componentwise.
struct DeadZoneComposite {
    LoopFunctionPtr inner;
};

/// y = outer(inner(u))
struct Composition {
    LoopFunctionPtr outer;
    LoopFunctionPtr inner;
};

/// The frozen-time extension of `inner` at `frozen_at`: the time-invariant
/// system applying inner's snapshot at that instant to every shift of the
/// input.
struct TimeInvariantWrapper {
    LoopFunctionPtr inner;
    int frozen_at = 0;
};

enum class LoopKind { memoryless_matrix, one_step_linear, dead_zone_composite, composition, ti_wrapper };

/// A causal, possibly time-varying and nonlinear operator on signals.
/// Descriptions are immutable; every evaluation is a pure function of the
/// input signal, so instances may be shared freely across threads.
class LoopFunction {
  public:
    using Node = std::variant<MemorylessMatrix, OneStepLinear, DeadZoneComposite, Composition, TimeInvariantWrapper>;

    explicit LoopFunction(Node node);

    static LoopFunction memoryless(MatrixSchedule gain);
    static LoopFunction one_step(MatrixSchedule lag0, MatrixSchedule lag1);
    static LoopFunction dead_zone_over(LoopFunction inner);
    static LoopFunction compose(LoopFunction outer, LoopFunction inner);
    static LoopFunction frozen_at(LoopFunction inner, int tau);

    [[nodiscard]] LoopKind kind() const;
    [[nodiscard]] const Node& node() const { return node_; }
    [[nodiscard]] int input_dimension() const { return input_dim_; }
    [[nodiscard]] int output_dimension() const { return output_dim_; }
    [[nodiscard]] bool time_invariant() const;

    /// Window outside which the description is constant (schedule clamping);
    /// [0, 0] for fully time-invariant kinds.
    [[nodiscard]] TimeRange schedule_window() const;

  private:
    Node node_;
    int input_dim_ = 0;
    int output_dim_ = 0;
};

/// Componentwise dead-zone with band (-0.5, 0.5): shifts values toward zero
/// by 0.5 and clamps the band to zero.
double dead_zone(double v);
Eigen::VectorXd dead_zone(const Eigen::VectorXd& v);

/// Input sample accessor; must return the input value at any requested time
/// (zero outside the relevant support).
using InputFn = std::function<Eigen::VectorXd(int)>;

/// Output of H at a single time, reading inputs through `u`. Causal: only
/// u(tau) for tau <= t is ever queried.
Eigen::VectorXd eval_at(const LoopFunction& h, const InputFn& u, int t);

/// y(t) for each t in `horizon`, with the input zero outside its support.
Signal apply(const LoopFunction& h, const Signal& u, TimeRange horizon);

/// Frozen-time snapshot value: h_tau u = (Hu)(tau).
Eigen::VectorXd snapshot_apply(const LoopFunction& h, int tau, const Signal& u);

/// Frozen-time extension value: (H_tau u)(t) = h_tau applied to the input
/// shifted by tau - t.
Eigen::VectorXd frozen_extension_apply(const LoopFunction& h, int tau, const Signal& u, int t);

/// Value at time t of the consecutive-extension difference
/// (H_{tau-1} u)(t) - (H_tau u)(t). This is the snapshot variation "nabla
/// h_tau" applied as a time-invariant operator.
Eigen::VectorXd nabla_snapshot_apply(const LoopFunction& h, int tau, const Signal& u, int t);

/// (nabla H_tau u)(t): the accumulated variation sum over i in (t, tau],
/// parameter-wise for schedule-backed kinds and operator-wise otherwise.
/// Telescopes exactly to (Hu)(t) - (H_tau u)(t); zero at t = tau.
Eigen::VectorXd nabla_extension_apply(const LoopFunction& h, int tau, const Signal& u, int t);

} // namespace frozentime
