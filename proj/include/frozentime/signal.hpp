#pragma once

#include <Eigen/Dense>
#include <vector>

namespace frozentime {

/// Inclusive integer time range [first, last].
struct TimeRange {
    int first = 0;
    int last = 0;

    [[nodiscard]] int length() const { return last - first + 1; }
    [[nodiscard]] bool contains(int t) const { return t >= first && t <= last; }
};

/// Parameters of the moving-window fading-memory semi-norm: geometric
/// discount base sigma >= 1 and exponent p in [1, inf].
struct WeightSpec {
    double sigma = 1.0;
    double p = std::numeric_limits<double>::infinity();

    WeightSpec() = default;
    WeightSpec(double sigma_, double p_);

    [[nodiscard]] bool is_sup() const { return std::isinf(p); }
};

/// Max-absolute-component norm used for all vector magnitudes.
///
/// Matrix gains are measured by their induced norm (max absolute row sum),
/// so signal magnitudes use the matching componentwise max; mixing vector
/// and operator norms from different families would break the certified
/// inequalities.
double vec_norm(const Eigen::VectorXd& v);

/// A finite discrete-time trace of real vectors. Evaluation outside
/// [start_time, start_time + size - 1] yields the zero vector, which models
/// zero initial conditions on a doubly infinite time axis.
class Signal {
  public:
    Signal(int start_time, int dimension);
    Signal(int start_time, std::vector<Eigen::VectorXd> values);

    static Signal zero(int start_time, int dimension, int length);

    [[nodiscard]] int start_time() const { return start_time_; }
    /// Last supported time index; start_time() - 1 when empty.
    [[nodiscard]] int end_time() const { return start_time_ + static_cast<int>(values_.size()) - 1; }
    [[nodiscard]] int dimension() const { return dimension_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }

    /// Value at time t, zero vector outside the stored support.
    [[nodiscard]] Eigen::VectorXd at(int t) const;

    /// Direct access to the stored sample list.
    [[nodiscard]] const std::vector<Eigen::VectorXd>& values() const { return values_; }

    /// Appends one sample at end_time() + 1. Rejects dimension mismatches
    /// and non-finite entries.
    void push_back(const Eigen::VectorXd& v);

    bool operator==(const Signal& other) const;

  private:
    int start_time_;
    int dimension_;
    std::vector<Eigen::VectorXd> values_;
};

/// Moving-window fading-memory semi-norm over [t1, t2].
///
/// Finite p:  [sum_{tau=t1}^{t2} sigma^{-p(t2-tau)} |x(tau)|^p]^(1/p)
/// p = inf:   sup_{tau in [t1,t2]} sigma^{-(t2-tau)} |x(tau)|
///
/// Both branches are accumulated left to right with the recursive rescaling
/// acc -> acc * sigma^{-p} (resp. acc / sigma), so the one-step identity
/// ||x||_{sigma inf, t} = max(sigma^{-1} ||x||_{sigma inf, t-1}, |x(t)|)
/// holds exactly.
double weighted_norm(const Signal& x, const WeightSpec& w, int t1, int t2);

/// Semi-norm over the window (-inf, t], realized as [start_time, t] because
/// the signal is zero before its support. Returns 0 for t < start_time.
double norm_upto(const Signal& x, const WeightSpec& w, int t);

/// Backward shift: (shift(x, theta))(t) = x(t - theta).
Signal shift(const Signal& x, int theta);

/// Truncation: equal to x up to tau, zero afterwards.
Signal truncate(const Signal& x, int tau);

} // namespace frozentime
