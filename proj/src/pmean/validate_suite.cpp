#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmean/adversary.hpp"
#include "pmean/diagnostics.hpp"
#include "pmean/error.hpp"
#include "pmean/experiment.hpp"
#include "pmean/oracle.hpp"
#include "pmean/rng.hpp"

namespace pmean {

namespace {

CheckResult check(const std::string& name, bool pass, const std::string& detail = "") {
    return CheckResult{name, pass, pass ? "" : detail};
}

std::vector<double> random_vector(std::mt19937_64& eng, int n, bool allow_zero) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = rng::uniform01(eng);
        if (allow_zero && rng::uniform01(eng) < 0.1) v[i] = 0.0;
    }
    return v;
}

const Exponent kPGrid[] = {
    Exponent::neg_infinity(),  Exponent::finite(-8.0),  Exponent::finite(-2.0),
    Exponent::finite(-1.0),    Exponent::finite(-0.5),  Exponent::finite(-0.2),
    Exponent::nash(),          Exponent::finite(0.4),   Exponent::finite(1.0),
};

} // namespace

std::vector<CheckResult> validate_welfare_properties(std::uint64_t seed) {
    std::vector<CheckResult> results;
    auto eng = rng::engine(seed, 0xF00D);

    bool symmetry = true, monotone = true, mean_ineq = true, idempotent = true, zero_conv = true;
    std::string detail;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng::below(eng, 16));
        std::vector<double> v = random_vector(eng, n, trial % 3 == 0);
        std::vector<double> shuffled = v;
        for (int i = n - 1; i > 0; --i)
            std::swap(shuffled[i], shuffled[rng::below(eng, static_cast<std::uint64_t>(i) + 1)]);

        for (const Exponent& p : kPGrid) {
            const double w = p_mean(v, p);
            if (std::fabs(w - p_mean(shuffled, p)) > 1e-12 * std::max(1.0, w)) {
                symmetry = false;
                detail = "symmetry broken at p=" + p.str();
            }
            std::vector<double> bumped = v;
            const int coord = static_cast<int>(rng::below(eng, n));
            bumped[coord] += 0.25;
            if (p_mean(bumped, p) < w - 1e-12) {
                monotone = false;
                detail = "monotonicity broken at p=" + p.str();
            }
            bool has_zero = std::find(v.begin(), v.end(), 0.0) != v.end();
            const bool p_nonpositive = p.is_neg_infinity() || p.value() <= 0.0;
            if (has_zero && p_nonpositive && w != 0.0) {
                zero_conv = false;
                detail = "zero convention broken at p=" + p.str();
            }
        }
        for (std::size_t a = 0; a < std::size(kPGrid); ++a)
            for (std::size_t b = a + 1; b < std::size(kPGrid); ++b) {
                const double lo = p_mean(v, kPGrid[a]);
                const double hi = p_mean(v, kPGrid[b]);
                if (lo > hi + 1e-9 * std::max(1.0, hi)) {
                    mean_ineq = false;
                    detail = "generalized mean inequality broken: p=" + kPGrid[a].str() +
                             " q=" + kPGrid[b].str();
                }
            }
        const double c = 0.05 + rng::uniform01(eng);
        std::vector<double> constant(n, c);
        for (const Exponent& p : kPGrid)
            if (std::fabs(p_mean(constant, p) - c) > 1e-12) idempotent = false;
    }
    results.push_back(check("pmean_symmetry", symmetry, detail));
    results.push_back(check("pmean_monotonicity", monotone, detail));
    results.push_back(check("pmean_generalized_mean_inequality", mean_ineq, detail));
    results.push_back(check("pmean_idempotence", idempotent, detail));
    results.push_back(check("pmean_zero_convention", zero_conv, detail));

    // Pigou-Dalton: a transfer from the higher to the lower of two coordinates
    // strictly increases the mean for every p < 1. low stays the unique
    // minimum so the strict change is visible in double precision.
    bool pigou = true;
    for (int trial = 0; trial < 100 && pigou; ++trial) {
        const double low = 0.001 + rng::uniform01(eng) * 0.4;
        const double high = low + 0.1 + rng::uniform01(eng) * 0.5;
        const double delta = (0.1 + 0.8 * rng::uniform01(eng)) * (high - low) / 2.0;
        const double c1 = low + 0.01 + rng::uniform01(eng);
        const double c2 = low + 0.01 + rng::uniform01(eng);
        for (const Exponent& p : kPGrid) {
            if (p.is_finite() && p.value() == 1.0) continue;
            const double before = p_mean(std::vector<double>{low, high, c1, c2}, p);
            const double after = p_mean(std::vector<double>{low + delta, high - delta, c1, c2}, p);
            if (!(after > before)) pigou = false;
        }
    }
    results.push_back(check("pmean_pigou_dalton_strict", pigou, "transfer failed to increase the mean"));

    bool continuity = true, egal_proxy = true;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng::below(eng, 63));
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = 1e-3 + (1.0 - 1e-3) * rng::uniform01(eng);
        const double nash = p_mean(v, Exponent::nash());
        if (std::fabs(p_mean(v, Exponent::finite(1e-6)) - nash) > 1e-6) continuity = false;
        if (std::fabs(p_mean(v, Exponent::finite(-1e-6)) - nash) > 1e-6) continuity = false;

        // sharp proxy envelope: min <= M_{-50} <= min * n^(1/50)
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = 0.1 + 0.9 * rng::uniform01(eng); // min/max >= 0.1
        const double min_w = *std::min_element(w.begin(), w.end());
        const double proxy = p_mean(w, Exponent::finite(-50.0));
        if (proxy < min_w - 1e-12 ||
            proxy > min_w * std::pow(static_cast<double>(n), 0.02) * (1.0 + 1e-12))
            egal_proxy = false;
    }
    results.push_back(check("pmean_nash_limit_continuity", continuity, "p->0 limit drifted past 1e-6"));
    results.push_back(check("pmean_egalitarian_proxy", egal_proxy,
                            "p=-50 left the [min, min*n^(1/50)] envelope"));
    return results;
}

std::vector<CheckResult> validate_online_invariants(std::uint64_t seed,
                                                    const std::vector<int>& agent_counts,
                                                    std::optional<double> phi_override) {
    std::vector<CheckResult> results;
    bool feasible = true, structural = true, lemmas_ok = true, deterministic = true;
    bool hypothesis_met_somewhere = false;
    std::string detail;

    for (int n : agent_counts) {
        for (std::uint64_t s = 0; s < 10; ++s) {
            AdversaryParams params;
            params.n = n;
            params.t = 48;
            params.seed = rng::mix(seed) + s;
            const Instance raw = generate_random(AdversaryKind::random_dirichlet, params);
            const Instance instance = split_to_cap(raw);
            const double phi = phi_override ? *phi_override : n / 4.0;

            const InvariantTrace trace = run_invariant_trace(instance, phi);
            if (!trace.ok) {
                feasible = feasible && trace.max_feasibility_violation <= kFeasTol;
                structural = false;
                detail = "n=" + std::to_string(n) + " seed=" + std::to_string(s) + ": " + trace.detail;
            }

            const OracleResult oracle = solve_concave(instance, Exponent::nash(), 120);
            const Allocation omega = shift_allocation(oracle.allocation, n);
            const LemmaDiagnostics diag =
                run_lemma_diagnostics(instance, phi, agent_values(instance, omega));
            if (diag.hypothesis_met) {
                hypothesis_met_somewhere = true;
                if (!diag.all_ok) {
                    lemmas_ok = false;
                    detail = "lemma bound violated at n=" + std::to_string(n) +
                             " seed=" + std::to_string(s);
                }
            }

            if (s == 0) {
                OnlineAllocator a1(n, phi), a2(n, phi);
                const RunResult r1 = run_online(instance, a1, false);
                const RunResult r2 = run_online(instance, a2, false);
                if (r1.values != r2.values) deterministic = false;
            }
        }
    }
    results.push_back(check("online_feasibility", feasible, detail));
    results.push_back(check("online_structural_invariants", structural, detail));
    results.push_back(check("online_determinism", deterministic, "identical runs diverged"));
    if (hypothesis_met_somewhere)
        results.push_back(check("online_lemma_bounds", lemmas_ok, detail));
    else
        results.push_back(CheckResult{"online_lemma_bounds", true,
                                      "hypothesis not met (phi > n/4); bounds reported, not asserted"});
    return results;
}

std::vector<CheckResult> validate_oracle_agreement(std::uint64_t seed) {
    std::vector<CheckResult> results;
    bool agreement = true, shift_ok = true, edge_ok = true;
    std::string detail;
    const Exponent probes[] = {Exponent::finite(-2.0), Exponent::nash(), Exponent::finite(1.0)};

    auto eng = rng::engine(seed, 0x04ac1e);
    for (int trial = 0; trial < 10; ++trial) {
        AdversaryParams params;
        params.n = 1 + static_cast<int>(rng::below(eng, 3));
        params.t = 2 + static_cast<long>(rng::below(eng, 3));
        params.seed = rng::mix(seed) + 100 + trial;
        const Instance instance = generate_random(AdversaryKind::random_dirichlet, params);
        const double step = 0.125;
        for (const Exponent& p : probes) {
            const OracleResult grid = solve_grid(instance, p, step);
            const OracleResult fw = solve_concave(instance, p, 2000);
            const double slack = params.n * static_cast<double>(params.t) * step + 1e-6;
            if (std::fabs(fw.welfare - grid.welfare) > slack) {
                agreement = false;
                detail = "fw=" + std::to_string(fw.welfare) + " grid=" + std::to_string(grid.welfare) +
                         " n=" + std::to_string(params.n) + " t=" + std::to_string(params.t) +
                         " p=" + p.str();
            }
            if (params.n >= 2) {
                const Allocation omega = shift_allocation(fw.allocation, params.n);
                const std::vector<double> ov = agent_values(instance, omega);
                const double half = 0.5 / params.n;
                for (double v : ov)
                    if (v < half - kFeasTol || v >= 1.0) shift_ok = false;
                if (p_mean(ov, p) < 0.5 * fw.welfare - 1e-9) shift_ok = false;
            }
        }
    }

    {
        AdversaryParams params;
        params.n = 1;
        params.t = 3;
        params.seed = 7;
        const Instance one = generate_random(AdversaryKind::random_dirichlet, params);
        if (std::fabs(solve_grid(one, Exponent::nash(), 0.25).welfare - 1.0) > 1e-9) edge_ok = false;
        if (std::fabs(solve_concave(one, Exponent::nash(), 50).welfare - 1.0) > 1e-6) edge_ok = false;
        const OracleResult lazy = solve_concave(one, Exponent::nash(), 0);
        if (lazy.iterations != 0 || std::isfinite(lazy.gap_estimate)) edge_ok = false;
    }

    results.push_back(check("oracle_grid_agreement", agreement, detail));
    results.push_back(check("oracle_shift_allocation", shift_ok,
                            "shifted allocation left [1/(2n),1) or halved welfare too far"));
    results.push_back(check("oracle_edge_cases", edge_ok, "single-agent or zero-budget misbehaved"));
    return results;
}

std::vector<CheckResult> validate_adversary_counts() {
    std::vector<CheckResult> results;

    {
        AdversaryParams params;
        params.n = 27;
        params.p = Exponent::finite(-1.0);
        AdaptiveAdversary adversary(AdversaryKind::negative_p_groups, params);
        OnlineAllocator allocator(27, threshold_universal(27));
        const InteractionResult result =
            run_adversarial(adversary, allocator, {.record_transcript = true});

        const bool groups_ok = adversary.groups().size() == 3 && adversary.groups()[0].size() == 9 &&
                               adversary.specials_per_group() == 3 &&
                               adversary.special_agents().size() == 9;
        results.push_back(check("adversary_group_counts", groups_ok,
                                "expected 3 groups of 9 with 3 specials each at n=27, p=-1"));
        const ScalingReport scaling = validate_scaling(*result.transcript);
        results.push_back(check("adversary_transcript_scaling", scaling.ok,
                                "transcript row sums deviate by " +
                                    std::to_string(scaling.worst_deviation)));
        results.push_back(check("adversary_subround_count",
                                result.sub_goods_per_round == 365 && result.rounds == 22,
                                "expected ceil(729/2)=365 sub-goods over 22 rounds"));
    }

    {
        AdversaryParams params;
        params.n = 4;
        AdaptiveAdversary adversary(AdversaryKind::suboptimality_4agent, params);
        GreedyAllocator allocator(4);
        const InteractionResult result =
            run_adversarial(adversary, allocator, {.record_transcript = true});
        bool ok = result.total_goods == 40 && result.rounds == 5;
        const ScalingReport scaling = validate_scaling(*result.transcript);
        ok = ok && scaling.ok;
        for (double v : result.offline_values) ok = ok && std::fabs(v - 0.625) < 1e-12;
        results.push_back(check("adversary_4agent_structure", ok,
                                "5 rounds x 8 sub-goods with 5/8 offline values expected"));
    }

    {
        const PredictedBounds b =
            predicted_bounds(AdversaryKind::negative_p_groups, Exponent::finite(-1.0), 27);
        const bool ok = std::fabs(b.oracle_lower - 0.25) < 1e-12 &&
                        std::fabs(b.online_upper - 4.0 / 3.0) < 1e-12 &&
                        std::fabs(b.ratio_lower - 0.1875) < 1e-12;
        results.push_back(check("adversary_predicted_bounds", ok,
                                "closed forms at p=-1, n=27 should be (1/4, 4/3, 3/16)"));
    }
    return results;
}

} // namespace pmean
