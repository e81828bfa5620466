// Acceptance suite: every release criterion as one timed pass/fail line.
// Exit status is the number of failed criteria.

#include "frozentime/cli.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace frozentime;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) {
                detail += "; ";
            }
            detail += what;
        }
    }
};

int g_failures = 0;

void run_criterion(int id, const std::string& label, double budget_seconds,
                   const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto begin = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    if (budget_seconds > 0.0 && elapsed > budget_seconds) {
        out.require(false, "exceeded time budget of " + std::to_string(budget_seconds) + " s");
    }
    std::ostringstream line;
    line << (out.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << label << " [" << std::fixed;
    line.precision(3);
    line << elapsed << " s]";
    if (!out.detail.empty()) {
        line << " -- " << out.detail;
    }
    std::cout << line.str() << '\n';
    if (!out.pass) {
        ++g_failures;
    }
}

Signal random_signal(std::mt19937_64& rng, int start, int length, int dim, double amplitude = 1.0) {
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

MatrixSchedule random_schedule(std::mt19937_64& rng, int start, int length, int dim, double scale) {
    std::uniform_real_distribution<double> unit(-scale, scale);
    std::vector<Eigen::MatrixXd> mats;
    for (int i = 0; i < length; ++i) {
        Eigen::MatrixXd m(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                m(r, c) = unit(rng);
            }
        }
        mats.push_back(std::move(m));
    }
    return MatrixSchedule(start, std::move(mats));
}

LoopFunction random_linear_loop(std::mt19937_64& rng, int length, double scale) {
    if (rng() % 2 == 0) {
        return LoopFunction::memoryless(random_schedule(rng, 0, length, 2, scale));
    }
    return LoopFunction::one_step(random_schedule(rng, 0, length, 2, scale),
                                  random_schedule(rng, 0, length, 2, 0.5 * scale));
}

void criterion1_formula_anchor(Outcome& out) {
    const auto begin = std::chrono::steady_clock::now();
    double bound = 0.0;
    for (int i = 0; i < 1000; ++i) {
        bound = tolerable_variation_bound(4.8839, 1.2, 1.44, 0.9, 1);
    }
    const double per_call = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count() / 1000.0;
    out.require(std::abs(bound - 0.0913) <= 0.0005,
                "bound " + std::to_string(bound) + " outside 0.0913 +- 0.0005");
    out.require(per_call < 1e-3, "per-call runtime above 1 ms");
}

void criterion2_n1_consistency(Outcome& out) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> sig(1.0, 1.7);
    std::uniform_real_distribution<double> gap(0.02, 0.9);
    std::uniform_real_distribution<double> l_draw(0.05, 20.0);
    std::uniform_real_distribution<double> r_draw(0.01, 0.99);
    for (int i = 0; i < 100; ++i) {
        const double sigma = sig(rng);
        const double sigma0 = sigma + gap(rng);
        const double sup_l = l_draw(rng);
        const double rho = r_draw(rng);
        VariationTrace trace;
        trace.sigma = sigma;
        trace.start_time = 0;
        trace.values = {0.0};
        const double via_report = zames_wang_check(trace, sup_l, sigma, sigma0, rho).windows[0].log_required;
        const double direct = tolerable_variation_bound(sup_l, sigma, sigma0, rho, 1);
        out.require(via_report == direct, "bit-exact mismatch at tuple " + std::to_string(i));
        if (!out.pass) {
            return;
        }
    }
}

void criterion3_fading_memory_suite(Outcome& out) {
    std::mt19937_64 rng(3301);
    const double p_values[] = {1.0, 2.0, kInf};
    const double sigmas[] = {1.0, 1.2, 2.0};
    for (int trial = 0; trial < 1000; ++trial) {
        const Signal x = random_signal(rng, -3, 30, 2, 2.0);
        for (double sigma : sigmas) {
            for (double p : p_values) {
                const WeightSpec w(sigma, p);
                for (int t = -3; t <= 26; t += 6) {
                    for (int tau = t; tau <= 26; tau += 7) {
                        const double lhs = norm_upto(x, w, t);
                        const double rhs = std::pow(sigma, tau - t) * norm_upto(x, w, tau);
                        if (!(lhs <= rhs * (1.0 + 1e-12) + 1e-12)) {
                            out.require(false, "inequality violated at trial " + std::to_string(trial));
                            return;
                        }
                    }
                }
            }
        }
    }
}

void criterion4_variation_oracle(Outcome& out) {
    std::mt19937_64 rng(4404);
    std::uniform_int_distribution<int> kind(0, 2);
    for (int trial = 0; trial < 500; ++trial) {
        LoopFunction h = [&]() -> LoopFunction {
            switch (kind(rng)) {
            case 0:
                return LoopFunction::memoryless(random_schedule(rng, 0, 14, 2, 1.0));
            case 1:
                return LoopFunction::one_step(random_schedule(rng, 0, 14, 2, 1.0),
                                              random_schedule(rng, 0, 14, 2, 0.6));
            default:
                return LoopFunction::dead_zone_over(LoopFunction::one_step(
                    random_schedule(rng, 0, 14, 2, 1.0), random_schedule(rng, 0, 14, 2, 0.6)));
            }
        }();
        const Signal u = random_signal(rng, 0, 14, 2, 1.5);
        const Signal hu = apply(h, u, {0, 13});
        for (int tau : {5, 13}) {
            for (int t = 0; t <= tau; t += 4) {
                const Eigen::VectorXd direct = hu.at(t) - frozen_extension_apply(h, tau, u, t);
                const Eigen::VectorXd via_sum = nabla_extension_apply(h, tau, u, t);
                if ((via_sum - direct).lpNorm<Eigen::Infinity>() > 1e-9) {
                    out.require(false, "mismatch at trial " + std::to_string(trial));
                    return;
                }
            }
        }
    }
}

void criterion5_average_coefficient_suite(Outcome& out) {
    std::mt19937_64 rng(5505);
    std::uniform_real_distribution<double> val(0.0, 1.5);
    for (int trial = 0; trial < 1000; ++trial) {
        VariationTrace trace;
        trace.sigma = 1.2;
        trace.start_time = 0;
        trace.values.resize(40);
        for (auto& v : trace.values) {
            v = val(rng);
        }
        for (int n_width : {1, 2, 4, 8}) {
            const double c_n = c_sigma_n(sup_n_width(trace, n_width), 1.2, 1.44, n_width);
            for (int t = 0; t < 40; t += 3) {
                if (!(c_sigma_sigma0(trace, 1.44, t) <= c_n + 1e-12)) {
                    out.require(false, "domination violated at trial " + std::to_string(trial));
                    return;
                }
            }
        }
    }
}

void criterion6_coupling_bound(Outcome& out) {
    std::mt19937_64 rng(6606);
    const double sigma = 1.2;
    const double sigma0 = 1.44;
    const WeightSpec w_sigma(sigma, kInf);
    for (int trial = 0; trial < 200; ++trial) {
        const LoopFunction h = random_linear_loop(rng, 16, 1.0);
        const LoopFunction g = random_linear_loop(rng, 16, 0.8);
        const Signal u = random_signal(rng, 0, 16, 2, 2.0);
        const VariationTrace g_trace = variation_trace(g, {0, 15}, sigma);
        for (int t : {6, 15}) {
            Signal w(0, 2);
            for (int s = 0; s <= t; ++s) {
                w.push_back(nabla_extension_apply(g, t, u, s));
            }
            const double lhs = vec_norm(snapshot_apply(h, t, w));
            const double rhs = induced_norm_frozen(h, t, sigma0).upper * c_sigma_sigma0(g_trace, sigma0, t) *
                               norm_upto(u, w_sigma, t);
            if (!(lhs <= rhs + 1e-9)) {
                out.require(false, "bound violated at trial " + std::to_string(trial) + " (lhs " +
                                       std::to_string(lhs) + " rhs " + std::to_string(rhs) + ")");
                return;
            }
        }
    }
}

void criterion7_product_variation(Outcome& out) {
    std::mt19937_64 rng(7707);
    const double sigma = 1.2;
    const WeightSpec w_sigma(sigma, kInf);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const LoopFunction g = LoopFunction::memoryless(random_schedule(rng, 0, 10, 2, 1.0));
        const LoopFunction k = LoopFunction::one_step(
            MatrixSchedule::constant(0.7 * Eigen::MatrixXd::Random(2, 2)),
            MatrixSchedule::constant(0.4 * Eigen::MatrixXd::Random(2, 2)));
        const LoopFunction gk = LoopFunction::compose(g, k);
        const double k_norm = induced_norm_frozen(k, 0, sigma).upper;
        const VariationTrace g_trace = variation_trace(g, {0, 9}, sigma);

        VariationTrace measured;
        measured.sigma = sigma;
        measured.start_time = 0;
        for (int t = 0; t < 10; ++t) {
            double best = 0.0;
            for (int probe = 0; probe < 30; ++probe) {
                Signal u(t - 3, 2);
                for (int s = 0; s < 4; ++s) {
                    Eigen::VectorXd v(2);
                    v << unit(rng), unit(rng);
                    u.push_back(v);
                }
                const double denom = norm_upto(u, w_sigma, t);
                if (denom > 0.0) {
                    best = std::max(best, vec_norm(nabla_snapshot_apply(gk, t, u, t)) / denom);
                }
            }
            measured.values.push_back(best);
        }
        for (int n_width : {1, 2, 4}) {
            const double bound = product_variation_bound(sup_n_width(g_trace, n_width), k_norm);
            if (!(sup_n_width(measured, n_width) <= bound + 1e-9)) {
                out.require(false, "bound violated at trial " + std::to_string(trial));
                return;
            }
        }
    }
}

Scenario random_theorem1_scenario(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(0.1, 0.45);
    std::uniform_real_distribution<double> jitter(0.0, 0.06);

    const TimeRange horizon{0, 299};
    std::vector<Eigen::MatrixXd> mats;
    double angle = unit(rng);
    for (int t = horizon.first; t <= horizon.last; ++t) {
        angle += 0.3 * unit(rng) * jitter(rng) / 0.06;
        const double lambda = radius(rng) * 0.2 + (t == horizon.first ? radius(rng) : 0.8 * radius(rng));
        Eigen::Matrix2d rot;
        rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
        diag(0, 0) = lambda;
        diag(1, 1) = 0.5 * lambda;
        mats.push_back(rot * diag * rot.transpose());
    }
    LoopFunction g = LoopFunction::memoryless(MatrixSchedule(horizon.first, mats));
    LoopFunction f = LoopFunction::memoryless(MatrixSchedule::constant(Eigen::MatrixXd::Identity(2, 2)));
    return Scenario("soundness", std::move(f), std::move(g), InputSpec{ClosedFormInput{1.0, 0.0, 2.0, 2}},
                    horizon, 1.2, 1.44, 0.9, seed);
}

void criterion8_theorem1_soundness(Outcome& out) {
    const WeightSpec w_sigma(1.2, kInf);
    const WeightSpec w_sup(1.0, kInf);
    int certified = 0;
    int attempts = 0;
    while (certified < 50 && attempts < 120) {
        const Scenario s = random_theorem1_scenario(1000 + static_cast<std::uint64_t>(attempts));
        ++attempts;
        const SimResult r = simulate(s);
        if (r.divergent) {
            continue;
        }
        CertificateInputs in = collect_certificate_inputs(s, r);
        std::vector<double> psi_values;
        for (int t = in.start_time; t <= in.horizon_end(); ++t) {
            psi_values.push_back(psi(in, t));
        }
        const ProposedSequence seq = propose_time_sequence(psi_values, in.start_time, in.rho, 40);
        if (!seq.ok) {
            continue;
        }
        in.time_sequence = seq.sequence;
        const CertificateReport report = check_theorem1(in);
        if (!(report.holds && report.gain_claimed && std::isfinite(report.gain_bound))) {
            continue;
        }
        ++certified;

        const Theorem1Constants k = constants_theorem1(in);
        for (std::size_t i = 1; i < in.time_sequence.size(); ++i) {
            const int prev = in.time_sequence[i - 1];
            const int now = in.time_sequence[i];
            const double lhs = norm_upto(r.x, w_sigma, now);
            const double rhs = std::pow(in.rho, now - prev) * norm_upto(r.x, w_sigma, prev) +
                               k.beta * norm_upto(r.u, w_sup, now) + 1e-6;
            out.require(lhs <= rhs, "recursion bound violated at t_i = " + std::to_string(now));

            const double u_norm = norm_upto(r.u, w_sup, now);
            if (u_norm > 0.0) {
                out.require(norm_upto(r.x, w_sup, now) / u_norm <= report.gain_bound + 1e-6,
                            "gain bound violated at t_i = " + std::to_string(now));
            }
            if (!out.pass) {
                return;
            }
        }
    }
    out.require(certified == 50,
                "only " + std::to_string(certified) + " certified scenarios in " + std::to_string(attempts));
}

void criterion9_example1(Outcome& out) {
    const Scenario s = build_example1(2026);
    const SimResult r = simulate(s);
    out.require(!r.divergent, "simulation diverged");

    CertificateInputs in = collect_certificate_inputs(s, r);
    std::vector<double> psi_values;
    for (int t = in.start_time; t <= in.horizon_end(); ++t) {
        psi_values.push_back(psi_hat(in, t));
    }
    const ProposedSequence seq = propose_time_sequence(psi_values, in.start_time, in.rho, 200);
    out.require(seq.ok, "no feasible time sequence");
    if (!seq.ok) {
        return;
    }
    in.time_sequence = seq.sequence;

    const CertificateReport report = check_corollary2(in);
    out.require(report.holds, "corollary2 window condition failed");
    out.require(report.gain_claimed && std::isfinite(report.gain_bound), "gain bound not claimed finite");

    const GainCheck gain = verify_gain_bound(r, report.gain_bound);
    out.require(gain.ok, "measured gain " + std::to_string(gain.worst_ratio) + " above the certified bound");

    double sup_l = 0.0;
    double sup_delta = 0.0;
    for (std::size_t i = 0; i < in.l_norm.size(); ++i) {
        sup_l = std::max(sup_l, in.l_norm[i]);
        sup_delta = std::max(sup_delta, in.delta_g[i]);
    }
    out.require(std::isinf(sup_l), "expected destabilizing episodes with infinite sup ||l_t||");
    out.require(sup_delta > 0.0, "expected nonzero variation");
    const CertificateReport baseline = zames_wang_check(in.delta_g_trace(), sup_l, in.sigma, in.sigma0, in.rho);
    out.require(!baseline.holds, "baseline unexpectedly holds");
    out.require(baseline.windows.front().log_required == 0.0, "baseline bound should be zero");
}

void criterion10_example2(Outcome& out) {
    const Scenario s = build_example2(2027);
    const SimResult r = simulate(s);
    out.require(!r.divergent, "simulation diverged");

    CertificateInputs in = collect_certificate_inputs(s, r);
    std::vector<double> psi_values;
    for (int t = in.start_time; t <= in.horizon_end(); ++t) {
        psi_values.push_back(psi_hat(in, t));
    }
    const ProposedSequence seq = propose_time_sequence(psi_values, in.start_time, in.rho, 200);
    out.require(seq.ok, "no feasible time sequence");
    if (!seq.ok) {
        return;
    }
    in.time_sequence = seq.sequence;

    for (bool stab : in.stabilizing) {
        if (!stab) {
            out.require(false, "expected an all-stabilizing schedule");
            return;
        }
    }

    const CertificateReport report = check_corollary2(in);
    out.require(report.holds, "corollary2 window condition failed");
    out.require(report.gain_claimed && std::isfinite(report.gain_bound), "gain bound not claimed finite");

    const GainCheck gain = verify_gain_bound(r, report.gain_bound);
    out.require(gain.ok, "measured gain " + std::to_string(gain.worst_ratio) + " above the certified bound");

    double sup_l = 0.0;
    for (double l : in.l_norm) {
        sup_l = std::max(sup_l, l);
    }
    out.require(std::isfinite(sup_l), "sup ||l_t|| should be finite");

    const CertificateReport baseline = zames_wang_check(in.delta_g_trace(), sup_l, in.sigma, in.sigma0, in.rho);
    out.require(!baseline.holds, "baseline unexpectedly holds");
    const double failure_fraction =
        static_cast<double>(baseline.failure_locations.size()) / static_cast<double>(in.delta_g.size());
    out.require(failure_fraction > 0.5,
                "baseline fails at only " + std::to_string(100.0 * failure_fraction) + "% of times");
}

void criterion11_separation_witness(Outcome& out) {
    const double sigma = 1.2;
    const double sigma0 = 1.44;
    const double rho = 0.9;
    const double sup_l = 4.8839;
    const int n_width = 2;

    const double bound_1 = tolerable_variation_bound(sup_l, sigma, sigma0, rho, 1);
    const double bound_n = tolerable_variation_bound(sup_l, sigma, sigma0, rho, n_width);
    out.require(n_width * std::pow(sigma0 / sigma, 1 - n_width) > 1.0, "witness region is empty");

    CertificateInputs in;
    in.sigma = sigma;
    in.sigma0 = sigma0;
    in.rho = rho;
    in.f_norm = 1.0;
    in.start_time = 0;
    const int n = 41;
    in.s_norm.assign(n, 1.5);
    in.s_norm_sigma.assign(n, 1.8);
    in.l_norm.assign(n, sup_l);
    in.g_norm.assign(n, 0.8);
    in.delta_g.assign(n, 0.0);
    in.delta_g[20] = 0.5 * (bound_1 + n_width * bound_n);
    in.stabilizing.assign(n, true);
    in.c_coeff = c_sigma_sigma0_trace(in.delta_g_trace(), sigma0, in.horizon());

    const CertificateReport baseline = zames_wang_check(in.delta_g_trace(), sup_l, sigma, sigma0, rho);
    const CertificateReport ours = check_corollary3(in, n_width);
    out.require(baseline.holds == false, "baseline should fail");
    out.require(baseline.failure_locations == std::vector<int>{20}, "baseline should fail exactly at the spike");
    out.require(ours.holds == true, "averaged condition should hold");
}

void criterion12_unrolling(Outcome& out) {
    std::mt19937_64 rng(1212);
    std::uniform_real_distribution<double> d_draw(0.0, 0.99);
    std::uniform_real_distribution<double> f_draw(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> decay(200);
        std::vector<double> forcing(200);
        for (auto& d : decay) {
            d = d_draw(rng);
        }
        for (auto& f : forcing) {
            f = f_draw(rng);
        }
        const double initial = f_draw(rng);
        const auto unrolled = unroll_recursion(decay, forcing, initial);
        double direct = initial;
        for (std::size_t i = 0; i < decay.size(); ++i) {
            direct = decay[i] * direct + forcing[i];
            if (std::abs(unrolled[i] - direct) > 1e-12 * std::max(1.0, std::abs(direct))) {
                out.require(false, "mismatch at trial " + std::to_string(trial));
                return;
            }
        }
    }
}

} // namespace

int main() {
    std::cout << "frozentime acceptance suite\n";
    run_criterion(1, "baseline bound anchor 0.0913 +- 0.0005, < 1 ms per call", 5.0, criterion1_formula_anchor);
    run_criterion(2, "N = 1 tolerable bound equals the baseline bit-exactly on 100 tuples", 5.0,
                  criterion2_n1_consistency);
    run_criterion(3, "fading-memory inequality on 1000 random signals x {p, sigma} grid", 5.0,
                  criterion3_fading_memory_suite);
    run_criterion(4, "variation-sum oracle equivalence on 500 random systems (1e-9)", 10.0,
                  criterion4_variation_oracle);
    run_criterion(5, "exact coefficient dominated by the averaged coefficient on 1000 traces", 30.0,
                  criterion5_average_coefficient_suite);
    run_criterion(6, "frozen-coupling bound on 200 random linear triples (1e-9)", 60.0, criterion6_coupling_bound);
    run_criterion(7, "product variation bound on 100 random instances", 60.0, criterion7_product_variation);
    run_criterion(8, "window-certificate soundness on 50 certified scenarios", 120.0,
                  criterion8_theorem1_soundness);
    run_criterion(9, "episodically destabilized dead-zone loop end to end", 60.0, criterion9_example1);
    run_criterion(10, "all-stabilizing persistently varying loop end to end", 60.0, criterion10_example2);
    run_criterion(11, "spike separation witness: averaged check passes, baseline fails", 5.0,
                  criterion11_separation_witness);
    run_criterion(12, "closed-form unrolling equals the direct recursion on 1000 traces", 30.0,
                  criterion12_unrolling);

    if (g_failures == 0) {
        std::cout << "all criteria passed\n";
    } else {
        std::cout << g_failures << " criteria failed\n";
    }
    return g_failures;
}
