#pragma once

#include "frozentime/loop_function.hpp"

#include <random>

namespace frozentime::testutil {

inline Signal scalar_signal(int start, std::initializer_list<double> values) {
    Signal s(start, 1);
    for (double v : values) {
        s.push_back(Eigen::VectorXd::Constant(1, v));
    }
    return s;
}

inline Signal random_signal(std::mt19937_64& rng, int start, int length, int dim, double amplitude = 1.0) {
    std::uniform_real_distribution<double> unit(-amplitude, amplitude);
    Signal s(start, dim);
    for (int i = 0; i < length; ++i) {
        Eigen::VectorXd v(dim);
        for (int j = 0; j < dim; ++j) {
            v[j] = unit(rng);
        }
        s.push_back(v);
    }
    return s;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
    std::uniform_real_distribution<double> unit(-scale, scale);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = unit(rng);
        }
    }
    return m;
}

inline MatrixSchedule random_schedule(std::mt19937_64& rng, int start, int length, int dim, double scale = 1.0) {
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
        mats.push_back(random_matrix(rng, dim, dim, scale));
    }
    return MatrixSchedule(start, std::move(mats));
}

/// Random loop function drawn from the linear kinds (optionally wrapped in
/// a dead zone).
inline LoopFunction random_loop_function(std::mt19937_64& rng, int start, int length, int dim, double scale,
                                         bool allow_dead_zone) {
    std::uniform_int_distribution<int> pick(0, allow_dead_zone ? 2 : 1);
    switch (pick(rng)) {
    case 0:
        return LoopFunction::memoryless(random_schedule(rng, start, length, dim, scale));
    case 1:
        return LoopFunction::one_step(random_schedule(rng, start, length, dim, scale),
                                      random_schedule(rng, start, length, dim, scale));
    default:
        return LoopFunction::dead_zone_over(LoopFunction::one_step(
            random_schedule(rng, start, length, dim, scale), random_schedule(rng, start, length, dim, scale)));
    }
}

} // namespace frozentime::testutil
