#pragma once

#include "frozentime/certificates.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace frozentime {

/// Closed-form excitation amplitude * exp(t / exp_tau) * cos(t / cos_omega)
/// on every component; exp_tau = 0 disables the exponential factor and
/// cos_omega = 0 the cosine.
struct ClosedFormInput {
    double amplitude = 1.0;
    double exp_tau = 0.0;
    double cos_omega = 0.0;
    int dimension = 1;

    [[nodiscard]] Eigen::VectorXd value_at(int t) const;
};

/// Either a closed-form generator or an explicit trace.
struct InputSpec {
    std::variant<ClosedFormInput, Signal> source;

    [[nodiscard]] Signal realize(TimeRange horizon) const;
    [[nodiscard]] int dimension() const;
};

/// A closed-loop experiment: x = F u + G T x simulated over a horizon,
/// with the certificate parameters that will judge it.
struct Scenario {
    std::string name;
    LoopFunction f;
    LoopFunction g;
    InputSpec input;
    TimeRange horizon{0, 0};
    double sigma = 1.2;
    double sigma0 = 1.44;
    double rho = 0.9;
    std::uint64_t seed = 0;
    std::optional<std::vector<int>> time_sequence;

    Scenario(std::string name_, LoopFunction f_, LoopFunction g_, InputSpec input_, TimeRange horizon_,
             double sigma_, double sigma0_, double rho_, std::uint64_t seed_ = 0);

    void validate() const;
};

struct SimResult {
    Signal x;
    Signal u;
    /// ||x||_{inf,t} / ||u||_{inf,t} per horizon step; NaN where the input
    /// norm is still zero.
    std::vector<double> gain_trace;
    TimeRange horizon{0, 0};
    bool divergent = false;
    int divergence_time = 0;

    SimResult(Signal x_, Signal u_, TimeRange horizon_) : x(std::move(x_)), u(std::move(u_)), horizon(horizon_) {}

    [[nodiscard]] double gain_at(int t) const;
    [[nodiscard]] double max_gain() const;
};

/// Forward simulation of x(t) = (F u)(t) + (G T x)(t) with zero initial
/// conditions. The one-step delay makes the loop well posed; a state whose
/// magnitude exceeds 1e12 * max(1, ||u||_{inf,t}) stops the run and flags
/// it divergent.
SimResult simulate(const Scenario& scenario);

/// sup_t of the frozen snapshot norm of h over its schedule window
/// (upper bounds); equals ||H||_{sigma inf} for the clamped schedules used
/// here.
double loop_norm_sup(const LoopFunction& h, double sigma, double tol = 1e-9);

/// Evaluates every certificate input trace (classification, closed-loop
/// norms, open-loop norm, variation, coefficient) along the scenario
/// horizon. Parallel over time steps; FROZEN_TIME_THREADS caps the worker
/// count.
CertificateInputs collect_certificate_inputs(const Scenario& scenario, const SimResult& result);

struct GainCheck {
    bool ok = true;
    double worst_ratio = 0.0;
    int worst_t = 0;
    std::vector<int> skipped; ///< checked times with zero input norm
};

/// Compares the measured gain trace against a certified bound, either at
/// the given times or at every horizon step.
GainCheck verify_gain_bound(const SimResult& result, double bound, const std::vector<int>* at_times = nullptr);

/// Episodically destabilized dead-zone loop: G = dead-zone over a switched
/// one-step linear schedule whose lag-0 spectral radius exceeds 1 exactly
/// on indicator episodes. Defaults follow the published experiment shape
/// (sigma = 1.2, sigma0 = 1.4, rho = 0.94, u = 2 exp(t/20) cos(t/2)).
struct Example1Params {
    TimeRange horizon{0, 995};
    int first_episode = 60;
    int episode_period = 90;
    int episode_length = 4;
    double stable_radius = 0.25;
    double unstable_radius = 1.18;
    double lag1_radius = 0.10;
    double jitter = 0.01;
    double sigma = 1.2;
    double sigma0 = 1.4;
    double rho = 0.94;
};

Scenario build_example1(std::uint64_t seed, const Example1Params& params = {});

/// Episode schedule implied by Example1Params: [start, end) pairs.
std::vector<std::pair<int, int>> example1_episodes(const Example1Params& params);

/// All-stabilizing persistently varying 2x2 memoryless loop with quiet
/// ramps into near-boundary peaks (sigma = 1.2, sigma0 = 1.44, rho = 0.9,
/// u = cos(t/2)).
Scenario build_example2(std::uint64_t seed);

} // namespace frozentime
