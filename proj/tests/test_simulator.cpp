#include "frozentime/simulator.hpp"

#include "frozentime/parallel.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace frozentime;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LoopFunction identity_loop(int dim) {
    return LoopFunction::memoryless(MatrixSchedule::constant(Eigen::MatrixXd::Identity(dim, dim)));
}

LoopFunction constant_gain(double g) {
    return LoopFunction::memoryless(MatrixSchedule::constant(Eigen::MatrixXd::Constant(1, 1, g)));
}

Scenario scalar_scenario(double g, InputSpec input, TimeRange horizon, double rho = 0.9) {
    return Scenario("scalar", constant_gain(1.0), constant_gain(g), std::move(input), horizon, 1.2, 1.44, rho, 7);
}

/// Forward response of the frozen closed loop y = e + G_t (T y).
Signal s_response(const LoopFunction& g_frozen, const Signal& e, int t_end) {
    Signal y(e.start_time(), g_frozen.output_dimension());
    const InputFn ty = [&y](int s) { return y.at(s - 1); };
    const InputFn ea = [&e](int s) { return e.at(s); };
    for (int t = e.start_time(); t <= t_end; ++t) {
        y.push_back(ea(t) + eval_at(g_frozen, ty, t));
    }
    return y;
}

/// Frozen l response: w -> (I - G_t T)^-1 G_t T w.
Signal l_response(const LoopFunction& g_frozen, const Signal& w, int t_end) {
    Signal v(w.start_time(), g_frozen.output_dimension());
    const InputFn tw = [&w](int s) { return w.at(s - 1); };
    for (int t = w.start_time(); t <= t_end; ++t) {
        v.push_back(eval_at(g_frozen, tw, t));
    }
    return s_response(g_frozen, v, t_end);
}

} // namespace

TEST_CASE("simulate") {
    SUBCASE("open loop reproduces the input") {
        std::mt19937_64 rng(61);
        const Signal u = testutil::random_signal(rng, 0, 30, 2);
        Scenario s("open", identity_loop(2),
                   LoopFunction::memoryless(MatrixSchedule::constant(Eigen::MatrixXd::Zero(2, 2))), InputSpec{u},
                   {0, 29}, 1.2, 1.44, 0.9);
        const SimResult r = simulate(s);
        CHECK(r.x == u);
        CHECK(!r.divergent);
        CHECK(r.max_gain() == doctest::Approx(1.0));
    }
    SUBCASE("scalar geometric recursion approaches 1/(1 - g)") {
        const double g = 0.6;
        Signal step(0, 1);
        for (int t = 0; t < 60; ++t) {
            step.push_back(Eigen::VectorXd::Constant(1, 1.0));
        }
        const SimResult r = simulate(scalar_scenario(g, InputSpec{step}, {0, 59}));
        double expect = 0.0;
        double pow_g = 1.0;
        for (int k = 0; k <= 59; ++k) {
            expect += pow_g;
            pow_g *= g;
        }
        CHECK(r.x.at(59)[0] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(r.x.at(59)[0] == doctest::Approx(1.0 / (1.0 - g)).epsilon(1e-9));
    }
    SUBCASE("divergent schedules are truncated and flagged") {
        Signal step(0, 1);
        for (int t = 0; t < 200; ++t) {
            step.push_back(Eigen::VectorXd::Constant(1, 1.0));
        }
        const Scenario s = scalar_scenario(1.5, InputSpec{step}, {0, 199});
        const SimResult r = simulate(s);
        CHECK(r.divergent);
        CHECK(r.divergence_time < 100);

        // No variant certifies a finite gain for this run.
        const CertificateInputs inputs = collect_certificate_inputs(s, r);
        for (const auto variant :
             {CertificateVariant::theorem1, CertificateVariant::corollary2, CertificateVariant::lemma10_special,
              CertificateVariant::corollary3_bound, CertificateVariant::zames_wang}) {
            CertificateInputs in = inputs;
            if (in.time_sequence.empty()) {
                in.time_sequence.push_back(in.start_time);
                for (int t = in.start_time + 1; t <= in.horizon_end(); ++t) {
                    in.time_sequence.push_back(t);
                }
            }
            const CertificateReport report = evaluate_certificate(in, variant, 2);
            CHECK(!(report.holds && report.gain_claimed && std::isfinite(report.gain_bound)));
        }
    }
}

TEST_CASE("well-posedness: future input edits never change past outputs") {
    std::mt19937_64 rng(62);
    const LoopFunction g = LoopFunction::memoryless(testutil::random_schedule(rng, 0, 20, 2, 0.4));
    Signal u = testutil::random_signal(rng, 0, 20, 2);
    Scenario s("causal", identity_loop(2), g, InputSpec{u}, {0, 19}, 1.2, 1.44, 0.9);
    const SimResult base = simulate(s);

    Signal edited = truncate(u, 9); // zero out u beyond t = 9
    Scenario s2 = s;
    s2.input = InputSpec{edited};
    const SimResult cut = simulate(s2);
    for (int t = 0; t <= 9; ++t) {
        CHECK((base.x.at(t) - cut.x.at(t)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("gain envelope numerator is nondecreasing") {
    std::mt19937_64 rng(63);
    const LoopFunction g = LoopFunction::memoryless(testutil::random_schedule(rng, 0, 40, 2, 0.45));
    Scenario s("envelope", identity_loop(2), g, InputSpec{ClosedFormInput{1.0, 0.0, 2.0, 2}}, {0, 39}, 1.2, 1.44,
               0.9);
    const SimResult r = simulate(s);
    const WeightSpec sup_norm(1.0, kInf);
    double prev = 0.0;
    for (int t = 0; t <= 39; ++t) {
        const double now = norm_upto(r.x, sup_norm, t);
        CHECK(now + 1e-15 >= prev);
        prev = now;
    }
}

TEST_CASE("superposition separates linear from dead-zone scenarios") {
    std::mt19937_64 rng(64);
    const MatrixSchedule sched = testutil::random_schedule(rng, 0, 15, 2, 0.35);
    const Signal u1 = testutil::random_signal(rng, 0, 15, 2, 2.0);
    const Signal u2 = testutil::random_signal(rng, 0, 15, 2, 2.0);
    Signal sum(0, 2);
    for (int t = 0; t < 15; ++t) {
        sum.push_back(u1.at(t) + u2.at(t));
    }

    const auto run = [&](const LoopFunction& g, const Signal& u) {
        Scenario s("sp", identity_loop(2), g, InputSpec{u}, {0, 14}, 1.2, 1.44, 0.9);
        return simulate(s).x;
    };

    SUBCASE("linear loop superposes") {
        const LoopFunction linear = LoopFunction::memoryless(sched);
        const Signal xs = run(linear, sum);
        const Signal x1 = run(linear, u1);
        const Signal x2 = run(linear, u2);
        for (int t = 0; t < 15; ++t) {
            CHECK((xs.at(t) - x1.at(t) - x2.at(t)).lpNorm<Eigen::Infinity>() ==
                  doctest::Approx(0.0).epsilon(1e-10));
        }
    }
    SUBCASE("dead-zone loop detectably violates superposition") {
        const LoopFunction dz = LoopFunction::dead_zone_over(LoopFunction::memoryless(sched));
        const Signal xs = run(dz, sum);
        const Signal x1 = run(dz, u1);
        const Signal x2 = run(dz, u2);
        double worst = 0.0;
        for (int t = 0; t < 15; ++t) {
            worst = std::max(worst, (xs.at(t) - x1.at(t) - x2.at(t)).lpNorm<Eigen::Infinity>());
        }
        CHECK(worst > 1e-6);
    }
}

TEST_CASE("frozen-loop decomposition of the simulated state") {
    // x(t) = s_t(F u) + l_t(nabla G_t T x) for linear scenarios.
    std::mt19937_64 rng(65);
    for (int trial = 0; trial < 10; ++trial) {
        const LoopFunction g = LoopFunction::memoryless(testutil::random_schedule(rng, 0, 25, 2, 0.4));
        const Signal u = testutil::random_signal(rng, 0, 25, 2);
        Scenario s("decomp", identity_loop(2), g, InputSpec{u}, {0, 24}, 1.2, 1.44, 0.9);
        const SimResult r = simulate(s);

        const Signal fu = apply(s.f, u, {0, 24});
        const Signal tx = shift(r.x, 1);
        for (int t : {5, 12, 24}) {
            const LoopFunction frozen = LoopFunction::frozen_at(g, t);
            Signal w(0, 2);
            for (int sidx = 0; sidx <= t; ++sidx) {
                w.push_back(nabla_extension_apply(g, t, tx, sidx));
            }
            const Eigen::VectorXd got = s_response(frozen, fu, t).at(t) + l_response(frozen, w, t).at(t);
            CHECK((got - r.x.at(t)).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("verify_gain_bound") {
    std::mt19937_64 rng(66);
    const Signal u = testutil::random_signal(rng, 0, 20, 2);
    Scenario s("open", identity_loop(2),
               LoopFunction::memoryless(MatrixSchedule::constant(Eigen::MatrixXd::Zero(2, 2))), InputSpec{u},
               {0, 19}, 1.2, 1.44, 0.9);
    const SimResult r = simulate(s);

    SUBCASE("infinite bound always passes") {
        CHECK(verify_gain_bound(r, kInf).ok);
    }
    SUBCASE("open loop has worst ratio 1") {
        const GainCheck check = verify_gain_bound(r, 1.0 + 1e-12);
        CHECK(check.ok);
        CHECK(check.worst_ratio == doctest::Approx(1.0));
    }
    SUBCASE("selected times with zero input norm are skipped and reported") {
        Signal late(0, 1);
        for (int t = 0; t < 10; ++t) {
            late.push_back(Eigen::VectorXd::Constant(1, t < 3 ? 0.0 : 1.0));
        }
        Scenario s2 = scalar_scenario(0.5, InputSpec{late}, {0, 9});
        const SimResult r2 = simulate(s2);
        const std::vector<int> at{0, 1, 5, 9};
        const GainCheck check = verify_gain_bound(r2, 100.0, &at);
        CHECK(check.ok);
        CHECK(check.skipped == std::vector<int>{0, 1});
    }
}

TEST_CASE("collect_certificate_inputs") {
    SUBCASE("infinite l_norm exactly at destabilizing times") {
        const Scenario s = build_example1(7);
        const CertificateInputs in = collect_certificate_inputs(s, simulate(s));
        for (std::size_t i = 0; i < in.l_norm.size(); ++i) {
            CHECK(std::isinf(in.l_norm[i]) == !in.stabilizing[i]);
        }
    }
    SUBCASE("TI stabilizing loop yields constant traces and zero coefficients") {
        const LoopFunction g = constant_gain(0.4);
        Signal step(0, 1);
        for (int t = 0; t < 12; ++t) {
            step.push_back(Eigen::VectorXd::Constant(1, 1.0));
        }
        Scenario s("ti", constant_gain(1.0), g, InputSpec{step}, {0, 11}, 1.2, 1.44, 0.9);
        const CertificateInputs in = collect_certificate_inputs(s, simulate(s));
        CHECK(in.f_norm == doctest::Approx(1.0));
        for (std::size_t i = 0; i < in.g_norm.size(); ++i) {
            CHECK(in.g_norm[i] == doctest::Approx(in.g_norm[0]));
            CHECK(in.l_norm[i] == doctest::Approx(in.l_norm[0]));
            CHECK(in.c_coeff[i] == 0.0);
            CHECK(in.delta_g[i] == 0.0);
            CHECK(in.stabilizing[i]);
        }
    }
}

TEST_CASE("FROZEN_TIME_THREADS caps the worker count") {
    ::setenv("FROZEN_TIME_THREADS", "1", 1);
    CHECK(worker_thread_count() == 1);
    ::setenv("FROZEN_TIME_THREADS", "100000", 1);
    CHECK(worker_thread_count() >= 1);
    ::unsetenv("FROZEN_TIME_THREADS");

    // Capped runs produce the same traces as the default.
    const Scenario s = build_example2(17);
    const SimResult r = simulate(s);
    ::setenv("FROZEN_TIME_THREADS", "1", 1);
    const CertificateInputs serial = collect_certificate_inputs(s, r);
    ::unsetenv("FROZEN_TIME_THREADS");
    const CertificateInputs parallel = collect_certificate_inputs(s, r);
    CHECK(serial.l_norm == parallel.l_norm);
    CHECK(serial.stabilizing == parallel.stabilizing);
    CHECK(serial.c_coeff == parallel.c_coeff);
}

TEST_CASE("build_example1 schedule structure") {
    const Example1Params params;
    const Scenario s = build_example1(404, params);
    const auto episodes = example1_episodes(params);
    REQUIRE(!episodes.empty());

    const auto& dz = std::get<DeadZoneComposite>(s.g.node());
    const auto& inner = std::get<OneStepLinear>(dz.inner->node());

    const auto in_episode = [&](int t) {
        for (const auto& [start, end] : episodes) {
            if (t >= start && t < end) {
                return true;
            }
        }
        return false;
    };

    SUBCASE("lag-0 spectral radius exceeds 1 exactly on the episodes") {
        for (int t = s.horizon.first; t <= s.horizon.last; ++t) {
            const double radius = spectral_radius(inner.lag0.at(t));
            if (in_episode(t)) {
                CHECK(radius > 1.0);
            } else {
                CHECK(radius < 1.0);
            }
        }
    }
    SUBCASE("classification matches the episode indicator") {
        for (int t = s.horizon.first; t <= s.horizon.last; ++t) {
            const bool destabilizing = classify_frozen(s.g, t, s.sigma0) == FrozenClass::destabilizing;
            CHECK(destabilizing == in_episode(t));
        }
    }
    SUBCASE("lag-1 matrices stay inside the unit circle") {
        for (int t = s.horizon.first; t <= s.horizon.last; ++t) {
            CHECK(spectral_radius(inner.lag1.at(t)) < 1.0);
        }
    }
    SUBCASE("all snapshots are distinct") {
        const auto& mats = inner.lag0.matrices();
        for (std::size_t i = 1; i < mats.size(); ++i) {
            CHECK((mats[i] - mats[i - 1]).cwiseAbs().maxCoeff() > 0.0);
        }
    }
    SUBCASE("removing the episodes leaves every loop stabilizing") {
        Example1Params calm = params;
        calm.first_episode = params.horizon.last + 1; // no episodes fit
        const Scenario s2 = build_example1(404, calm);
        CHECK(example1_episodes(calm).empty());
        for (int t = s2.horizon.first; t <= s2.horizon.last; ++t) {
            CHECK(classify_frozen(s2.g, t, s2.sigma0) == FrozenClass::stabilizing);
        }
    }
}

TEST_CASE("build_example2 schedule structure") {
    const Scenario s = build_example2(808);
    const auto& sched = std::get<MemorylessMatrix>(s.g.node()).gain;

    SUBCASE("every snapshot has spectral radius below 1") {
        for (const auto& m : sched.matrices()) {
            CHECK(spectral_radius(m) < 1.0);
        }
    }
    SUBCASE("variation is persistently nonzero") {
        const VariationTrace trace = variation_trace(s.g, {s.horizon.first + 1, s.horizon.last}, s.sigma);
        int zeros = 0;
        for (double v : trace.values) {
            if (v == 0.0) {
                ++zeros;
            }
        }
        CHECK(zeros == 0);
    }
    SUBCASE("same seed reproduces the scenario, different seeds differ") {
        const Scenario again = build_example2(808);
        const auto& sched2 = std::get<MemorylessMatrix>(again.g.node()).gain;
        REQUIRE(sched.size() == sched2.size());
        for (std::size_t i = 0; i < sched.size(); ++i) {
            CHECK(sched.matrices()[i] == sched2.matrices()[i]);
        }
        const Scenario other = build_example2(809);
        const auto& sched3 = std::get<MemorylessMatrix>(other.g.node()).gain;
        CHECK((sched.matrices()[5] - sched3.matrices()[5]).cwiseAbs().maxCoeff() > 0.0);
    }
}
