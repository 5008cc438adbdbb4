#include <doctest.h>

#include <cmath>
#include <thread>

#include "pmean/adversary.hpp"
#include "pmean/diagnostics.hpp"
#include "pmean/error.hpp"
#include "pmean/online_alg.hpp"
#include "pmean/oracle.hpp"
#include "pmean/rng.hpp"

using namespace pmean;

TEST_CASE("level count is ceil(log2(2n))") {
    CHECK(level_count(1) == 1);
    CHECK(level_count(2) == 2);
    CHECK(level_count(3) == 3);
    CHECK(level_count(4) == 3);
    CHECK(level_count(8) == 4);
    CHECK(level_count(27) == 6);
    CHECK(level_count(64) == 7);
    CHECK(level_alpha(3) == 0.125);
}

TEST_CASE("threshold table values at n=8") {
    const double lg = 4.0; // log2(16)
    CHECK(threshold_for(Exponent::nash(), 8) == doctest::Approx(512.0));
    CHECK(threshold_for(Exponent::neg_infinity(), 8) ==
          doctest::Approx(8.0 * std::sqrt(8.0) * lg).epsilon(1e-14));
    CHECK(threshold_for(Exponent::finite(-0.5), 8) == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(threshold_for(Exponent::finite(0.5), 8) == doctest::Approx(1024.0));
    CHECK(threshold_for(Exponent::finite(1.0), 8) == doctest::Approx(1024.0));
    CHECK(threshold_for(Exponent::finite(-3.0), 8) ==
          doctest::Approx(8.0 * std::sqrt(8.0) * lg).epsilon(1e-14));
    CHECK(threshold_universal(8) == doctest::Approx(8.0 * std::sqrt(8.0) * lg).epsilon(1e-14));
    // small negative p, inside (-1/log(2n), 0)
    CHECK(threshold_for(Exponent::finite(-0.1), 8) == doctest::Approx(32.0 * 64.0));
    // the boundary p = -1/log(2n) goes to the (2n)^{2|p|} row
    CHECK(threshold_for(Exponent::finite(-0.25), 8) ==
          doctest::Approx(8.0 * std::pow(16.0, 0.5) * 64.0).epsilon(1e-12));
    CHECK_THROWS_AS(threshold_for(Exponent::nash(), 1), Error);
}

TEST_CASE("hand-traced first step at n=2") {
    OnlineAllocator alg(2, 10.0);
    const StepShares shares = alg.step(std::vector<double>{0.01, 0.005});
    // base 1/4 each; agent 1 wins the argmax at both levels (1/8 each);
    // vulnerable sets are empty, so their two 1/8 shares are withheld
    CHECK(shares.fractions[0] == 0.5);
    CHECK(shares.fractions[1] == 0.25);
    CHECK(shares.leftover == 0.25);

    OnlineAllocator tie(2, 10.0);
    const StepShares zero = tie.step(std::vector<double>{0.0, 0.0});
    CHECK(zero.fractions[0] == 0.5); // argmax tie broken to agent 1
    CHECK(zero.fractions[1] == 0.25);
    CHECK(zero.leftover == 0.25);
    CHECK(tie.level_value(1, 0) == 0.0); // zero values accrue nothing
}

TEST_CASE("redirect option hands the empty vulnerable share to the argmax agent") {
    OnlineAllocator alg(2, 10.0, {.redirect_unassigned = true});
    const StepShares shares = alg.step(std::vector<double>{0.01, 0.005});
    CHECK(shares.fractions[0] == 0.75);
    CHECK(shares.fractions[1] == 0.25);
    CHECK(shares.leftover == 0.0);
}

TEST_CASE("step rejects goods over the value cap") {
    OnlineAllocator alg(4, 10.0);
    CHECK_THROWS_AS(alg.step(std::vector<double>{0.5, 0.0, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(alg.step(std::vector<double>{0.01, 0.01, 0.01}), Error); // wrong arity
}

TEST_CASE("agents exit a level once its accrued value reaches alpha/phi") {
    // phi tiny so the first hit already crosses: alpha/phi = 0.5/0.5 = 1,
    // n=2 cap is 0.25, so pick phi larger: alpha/phi = 0.5/8 = 1/16 needs a
    // few rounds of value 1/4 at fraction ~1/2.
    OnlineAllocator alg(2, 8.0);
    std::vector<double> good{0.25, 0.2};
    for (int round = 0; round < 64 && alg.active_count(1) == 2; ++round) alg.step(good);
    CHECK(alg.active_count(1) < 2);
    CHECK_FALSE(alg.is_active(1, 0)); // the argmax winner exits first
    CHECK(alg.level_value(1, 0) >= 0.5 / 8.0);
}

TEST_CASE("vulnerable sets fill as the remaining value drains") {
    // Two agents, goods worth 1/4 each to both; after seen > 1 - alpha/4 an
    // active agent becomes vulnerable at that level.
    OnlineAllocator alg(2, 0.01); // tiny phi: the alpha/phi exit level is unreachable
    std::vector<double> good{0.25, 0.25};
    for (int round = 0; round < 4; ++round) alg.step(good);
    // seen = 1.0 > 1 - alpha/4 for every level
    CHECK(alg.vulnerable(1).size() == 2);
    CHECK(alg.vulnerable(2).size() == 2);
    const StepShares shares = alg.step(std::vector<double>{0.0, 0.0});
    // base 1/4 + argmax 1/8 + B share 1/16 for agent 1; 1/4 + 1/16 for agent 2
    CHECK(shares.fractions[0] == doctest::Approx(0.25 + 0.125 + 0.0625 + 0.125 + 0.0625));
    CHECK(shares.fractions[1] == doctest::Approx(0.25 + 0.0625 + 0.0625));
    CHECK(shares.leftover == doctest::Approx(0.0));
}

namespace {

Instance dirichlet(int n, long t, std::uint64_t seed) {
    AdversaryParams params;
    params.n = n;
    params.t = t;
    params.seed = seed;
    return generate_random(AdversaryKind::random_dirichlet, params);
}

} // namespace

TEST_CASE("full runs stay feasible and guarantee the base value") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const int n = 4 << (seed % 2);
        const Instance inst = split_to_cap(dirichlet(n, 64, seed));
        OnlineAllocator alg(n, threshold_for(Exponent::nash(), n));
        std::vector<double> values(n, 0.0);
        for (long t = 0; t < inst.goods(); ++t) {
            const auto v = inst.good(t);
            const StepShares shares = alg.step(v);
            double total = shares.leftover;
            for (int i = 0; i < n; ++i) {
                total += shares.fractions[i];
                values[i] += shares.fractions[i] * v[i];
            }
            CHECK(std::fabs(total - 1.0) <= 1e-9);
            CHECK(shares.leftover <= 0.5 + 1e-9);
        }
        for (double v : values) CHECK(v >= 0.5 / n - 1e-9);
    }
}

TEST_CASE("redirecting never changes the active or vulnerable evolution") {
    const Instance inst = split_to_cap(dirichlet(4, 40, 12));
    OnlineAllocator withhold(4, 1.0);
    OnlineAllocator redirect(4, 1.0, {.redirect_unassigned = true});
    for (long t = 0; t < inst.goods(); ++t) {
        const auto v = inst.good(t);
        const StepShares a = withhold.step(v);
        const StepShares b = redirect.step(v);
        double welfare_a = 0.0, welfare_b = 0.0;
        for (int i = 0; i < 4; ++i) {
            welfare_a += a.fractions[i] * v[i];
            welfare_b += b.fractions[i] * v[i];
        }
        CHECK(welfare_b >= welfare_a - 1e-15);
        for (int k = 1; k <= withhold.levels(); ++k) {
            CHECK(withhold.vulnerable(k) == redirect.vulnerable(k));
            for (int i = 0; i < 4; ++i)
                CHECK(withhold.is_active(k, i) == redirect.is_active(k, i));
        }
    }
}

TEST_CASE("identical goods example keeps everyone at 1/(2n) or better") {
    const long t = 8;
    const Instance inst =
        Instance(2, std::vector<double>(2 * t, 1.0 / t)); // (1/8, 1/8) x 8, cap = 1/4 holds
    OnlineAllocator alg(2, 64.0);
    const RunResult run = run_online(inst, alg);
    CHECK(run.values[0] >= 0.25 - 1e-12);
    CHECK(run.values[1] >= 0.25 - 1e-12);
    CHECK(run.allocation->max_feasibility_violation() <= 1e-9);
}

TEST_CASE("runs are deterministic") {
    const Instance inst = split_to_cap(dirichlet(8, 32, 3));
    OnlineAllocator a(8, 100.0), b(8, 100.0);
    const RunResult ra = run_online(inst, a);
    const RunResult rb = run_online(inst, b);
    CHECK(ra.values == rb.values);
    CHECK(ra.leftover_total == rb.leftover_total);

    // streamed values agree with a post-hoc evaluation of the allocation
    const auto recomputed = agent_values(inst, *ra.allocation);
    for (int i = 0; i < 8; ++i) CHECK(ra.values[i] == doctest::Approx(recomputed[i]).epsilon(1e-12));
}

TEST_CASE("structural invariants hold on random instances") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Instance inst = split_to_cap(dirichlet(8, 48, 40 + seed));
        const InvariantTrace trace = run_invariant_trace(inst, 2.0); // phi = n/4
        CHECK(trace.ok);
        CHECK(trace.max_feasibility_violation <= 1e-9);
        CHECK(trace.active_monotone);
        CHECK(trace.exit_correct);
    }
}

TEST_CASE("lemma diagnostics hold under the hypothesis and report otherwise") {
    const int n = 16;
    const Instance inst = split_to_cap(dirichlet(n, 48, 7));
    const OracleResult oracle = solve_concave(inst, Exponent::nash(), 150);
    const Allocation omega = shift_allocation(oracle.allocation, n);
    const auto omega_values = agent_values(inst, omega);

    const LemmaDiagnostics diag = run_lemma_diagnostics(inst, n / 4.0, omega_values);
    CHECK(diag.hypothesis_met);
    CHECK(diag.all_ok);
    CHECK(diag.bound_suboptimal == doctest::Approx(8.0 * n * 25.0 / (n / 4.0)));

    const LemmaDiagnostics loose = run_lemma_diagnostics(inst, n / 2.0, omega_values);
    CHECK_FALSE(loose.hypothesis_met);
    CHECK(loose.note.find("hypothesis not met") != std::string::npos);
}

TEST_CASE("uniform reference allocation pins the high/low partition") {
    const int n = 8;
    const Instance inst = split_to_cap(dirichlet(n, 48, 19));
    // omega = uniform gives every agent exactly 1/n, inside [1/(2n), 1)
    const std::vector<double> omega(n, 1.0 / n);
    const LemmaDiagnostics diag = run_lemma_diagnostics(inst, n / 4.0, omega);
    CHECK(diag.hypothesis_met);
    CHECK(diag.all_ok);
    for (const auto& level : diag.per_level) {
        // every agent clears alpha <= 1/n, none clears alpha > 1/n
        if (level.alpha <= 1.0 / n)
            CHECK(level.low_reference == 0);
        else
            CHECK(level.low_reference == n);
    }
}

TEST_CASE("instances are safe to share across concurrent runs") {
    const Instance inst = split_to_cap(dirichlet(8, 64, 23));
    OnlineAllocator reference(8, 100.0);
    const RunResult expected = run_online(inst, reference, false);

    std::vector<std::vector<double>> results(4);
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w)
        workers.emplace_back([&inst, &results, w] {
            OnlineAllocator alg(8, 100.0);
            results[w] = run_online(inst, alg, false).values;
        });
    for (auto& worker : workers) worker.join();
    for (const auto& values : results) CHECK(values == expected.values);
}

TEST_CASE("baselines behave as documented") {
    GreedyAllocator greedy(3);
    const StepShares g = greedy.step(std::vector<double>{0.1, 0.3, 0.3});
    CHECK(g.fractions == std::vector<double>{0.0, 1.0, 0.0}); // tie to the lower index
    CHECK(g.leftover == 0.0);

    UniformAllocator uniform(4);
    const StepShares u = uniform.step(std::vector<double>{0.0, 0.0, 0.0, 0.1});
    for (double f : u.fractions) CHECK(f == 0.25);

    auto made = make_allocator(OnlineAlgorithm::greedy, 3, 1.0);
    CHECK(made->agents() == 3);
}
