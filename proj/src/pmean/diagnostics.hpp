#pragma once

#include <span>
#include <string>
#include <vector>

#include "pmean/online_alg.hpp"
#include "pmean/types.hpp"

namespace pmean {

// Lemma bound checks for a run of the threshold algorithm against a reference
// allocation omega with 1/(2n) <= v_i(omega_i) < 1. The bounds are guaranteed
// only under phi <= n/4; outside that hypothesis the sizes are still reported
// but nothing is asserted.
struct LemmaLevelRecord {
    int k = 0;
    double alpha = 0.0;
    long max_vulnerable_high = 0; // max over rounds of |B_t^alpha ∩ H(alpha, omega)|
    long worst_round = 0;
    double bound_vulnerable_high = 0.0; // 8 n K / phi
    bool vulnerable_high_ok = true;     // Lemma: |B ∩ H| within bound at every round
    long low_online = 0;                // |{i : v_i(x_i) < alpha/(8 phi)}| at t = T
    long low_reference = 0;             // |{i : v_i(omega_i) < alpha}|
    double bound_low = 0.0;             // low_reference + 8 n K / phi
    bool low_ok = true;
};

struct LemmaDiagnostics {
    bool hypothesis_met = false;
    std::string note;
    int agents = 0;
    int levels = 0;
    double phi = 0.0;
    std::vector<LemmaLevelRecord> per_level;
    long suboptimal_count = 0;    // |{i : v_i(x_i) < v_i(omega_i)/(2 phi)}|
    double bound_suboptimal = 0.0; // 8 n K^2 / phi
    bool suboptimal_ok = true;
    bool all_ok = true; // asserted bounds only; vacuously true if hypothesis unmet
};

LemmaDiagnostics run_lemma_diagnostics(const Instance& instance, double phi,
                                       std::span<const double> omega_values,
                                       AllocatorOptions options = {});

// Per-round structural invariants of the allocator: feasibility, active-set
// monotonicity, vulnerable ⊆ active, exit correctness, and the per-level
// accrued-value cap alpha/phi + 1/n^2.
struct InvariantTrace {
    double max_feasibility_violation = 0.0;
    double max_leftover = 0.0;
    double max_level_value_excess = 0.0; // above alpha/phi + 1/n^2
    bool active_monotone = true;
    bool vulnerable_subset_active = true;
    bool exit_correct = true;
    bool baseline_value_ok = true; // final v_i(x_i) >= 1/(2n) - tol
    bool ok = true;
    std::string detail;
};

InvariantTrace run_invariant_trace(const Instance& instance, double phi,
                                   AllocatorOptions options = {});

} // namespace pmean
