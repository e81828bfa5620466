#include "frozentime/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace frozentime {

namespace {

void require_finite(const Eigen::VectorXd& v) {
    if (!v.allFinite()) {
        throw std::invalid_argument("signal values must be finite");
    }
}

} // namespace

WeightSpec::WeightSpec(double sigma_, double p_) : sigma(sigma_), p(p_) {
    if (!(sigma >= 1.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("WeightSpec: sigma must be a finite real >= 1");
    }
    if (!(p >= 1.0)) {
        throw std::invalid_argument("WeightSpec: p must be >= 1");
    }
}

double vec_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

Signal::Signal(int start_time, int dimension) : start_time_(start_time), dimension_(dimension) {
    if (dimension < 1) {
        throw std::invalid_argument("Signal: dimension must be >= 1");
    }
}

Signal::Signal(int start_time, std::vector<Eigen::VectorXd> values)
    : start_time_(start_time), dimension_(0), values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("Signal: value list must be non-empty; use Signal(start, dim) for an empty trace");
    }
    dimension_ = static_cast<int>(values_.front().size());
    if (dimension_ < 1) {
        throw std::invalid_argument("Signal: dimension must be >= 1");
    }
    for (const auto& v : values_) {
        if (v.size() != dimension_) {
            throw std::invalid_argument("Signal: all value vectors must share one dimension");
        }
        require_finite(v);
    }
}

Signal Signal::zero(int start_time, int dimension, int length) {
    Signal s(start_time, dimension);
    for (int i = 0; i < length; ++i) {
        s.push_back(Eigen::VectorXd::Zero(dimension));
    }
    return s;
}

Eigen::VectorXd Signal::at(int t) const {
    const int idx = t - start_time_;
    if (idx < 0 || idx >= static_cast<int>(values_.size())) {
        return Eigen::VectorXd::Zero(dimension_);
    }
    return values_[static_cast<std::size_t>(idx)];
}

void Signal::push_back(const Eigen::VectorXd& v) {
    if (v.size() != dimension_) {
        throw std::invalid_argument("Signal::push_back: dimension mismatch");
    }
    require_finite(v);
    values_.push_back(v);
}

bool Signal::operator==(const Signal& other) const {
    if (dimension_ != other.dimension_) {
        return false;
    }
    // Compare as functions on Z: differing supports are equal if the
    // non-overlapping parts are zero.
    const int lo = std::min(start_time_, other.start_time_);
    const int hi = std::max(end_time(), other.end_time());
    for (int t = lo; t <= hi; ++t) {
        if (at(t) != other.at(t)) {
            return false;
        }
    }
    return true;
}

double weighted_norm(const Signal& x, const WeightSpec& w, int t1, int t2) {
    if (t1 > t2) {
        throw std::domain_error("weighted_norm: window must satisfy t1 <= t2");
    }
    // Only the support contributes; zero-extended samples scale the
    // accumulator but add nothing.
    if (w.is_sup()) {
        double acc = 0.0;
        for (int t = t1; t <= t2; ++t) {
            acc = std::max(acc / w.sigma, vec_norm(x.at(t)));
        }
        return acc;
    }
    const double scale = std::pow(w.sigma, -w.p);
    double acc = 0.0;
    for (int t = t1; t <= t2; ++t) {
        acc = acc * scale + std::pow(vec_norm(x.at(t)), w.p);
    }
    return std::pow(acc, 1.0 / w.p);
}

double norm_upto(const Signal& x, const WeightSpec& w, int t) {
    if (t < x.start_time() || x.empty()) {
        return 0.0;
    }
    return weighted_norm(x, w, x.start_time(), t);
}

Signal shift(const Signal& x, int theta) {
    if (x.empty()) {
        return Signal(x.start_time() + theta, x.dimension());
    }
    return Signal(x.start_time() + theta, x.values());
}

Signal truncate(const Signal& x, int tau) {
    if (x.empty() || tau >= x.end_time()) {
        return x;
    }
    if (tau < x.start_time()) {
        return Signal(x.start_time(), x.dimension());
    }
    std::vector<Eigen::VectorXd> kept(x.values().begin(),
                                      x.values().begin() + (tau - x.start_time() + 1));
    return Signal(x.start_time(), std::move(kept));
}

} // namespace frozentime
