#include "pmean/diagnostics.hpp"

#include <cmath>

#include "pmean/error.hpp"

namespace pmean {

LemmaDiagnostics run_lemma_diagnostics(const Instance& instance, double phi,
                                       std::span<const double> omega_values,
                                       AllocatorOptions options) {
    const int n = instance.agents();
    if (static_cast<int>(omega_values.size()) != n)
        fail(Errc::dimension, "lemma diagnostics: omega value vector length mismatch");

    LemmaDiagnostics diag;
    diag.agents = n;
    diag.phi = phi;
    const int k_levels = level_count(n);
    diag.levels = k_levels;

    diag.hypothesis_met = phi <= n / 4.0 + 1e-12;
    if (!diag.hypothesis_met) diag.note = "hypothesis not met: phi > n/4";
    for (int i = 0; i < n; ++i) {
        if (omega_values[i] < 0.5 / n - kFeasTol || omega_values[i] >= 1.0) {
            diag.hypothesis_met = false;
            diag.note = "hypothesis not met: omega values outside [1/(2n), 1)";
            break;
        }
    }

    const double lemma_bound = 8.0 * n * k_levels / phi; // 8 n log(2n) / phi
    diag.per_level.resize(k_levels);
    std::vector<std::vector<unsigned char>> high(k_levels); // H(alpha, omega) per level
    for (int k = 1; k <= k_levels; ++k) {
        auto& rec = diag.per_level[k - 1];
        rec.k = k;
        rec.alpha = level_alpha(k);
        rec.bound_vulnerable_high = lemma_bound;
        high[k - 1].assign(n, 0);
        for (int i = 0; i < n; ++i)
            if (omega_values[i] >= rec.alpha) high[k - 1][i] = 1;
    }

    OnlineAllocator allocator(n, phi, options);
    std::vector<double> online_values(n, 0.0);
    for (long t = 0; t < instance.goods(); ++t) {
        // B_t^alpha is the set in force while good t is being assigned, i.e.
        // the state before this step.
        for (int k = 1; k <= k_levels; ++k) {
            long count = 0;
            for (int agent : allocator.vulnerable(k))
                if (high[k - 1][agent]) ++count;
            auto& rec = diag.per_level[k - 1];
            if (count > rec.max_vulnerable_high) {
                rec.max_vulnerable_high = count;
                rec.worst_round = t;
            }
        }
        const auto v = instance.good(t);
        const StepShares shares = allocator.step(v);
        for (int i = 0; i < n; ++i) online_values[i] += shares.fractions[i] * v[i];
    }

    for (int k = 1; k <= k_levels; ++k) {
        auto& rec = diag.per_level[k - 1];
        rec.vulnerable_high_ok =
            !diag.hypothesis_met || rec.max_vulnerable_high <= rec.bound_vulnerable_high + 1e-9;
        const double low_cut = rec.alpha / (8.0 * phi);
        for (int i = 0; i < n; ++i) {
            if (online_values[i] < low_cut) ++rec.low_online;
            if (omega_values[i] < rec.alpha) ++rec.low_reference;
        }
        rec.bound_low = static_cast<double>(rec.low_reference) + lemma_bound;
        rec.low_ok = !diag.hypothesis_met || rec.low_online <= rec.bound_low + 1e-9;
        diag.all_ok = diag.all_ok && rec.vulnerable_high_ok && rec.low_ok;
    }

    for (int i = 0; i < n; ++i)
        if (online_values[i] < omega_values[i] / (2.0 * phi)) ++diag.suboptimal_count;
    diag.bound_suboptimal = 8.0 * n * k_levels * k_levels / phi;
    diag.suboptimal_ok =
        !diag.hypothesis_met || diag.suboptimal_count <= diag.bound_suboptimal + 1e-9;
    diag.all_ok = diag.all_ok && diag.suboptimal_ok;
    return diag;
}

InvariantTrace run_invariant_trace(const Instance& instance, double phi,
                                   AllocatorOptions options) {
    const int n = instance.agents();
    const int k_levels = level_count(n);
    const double cap = 1.0 / (static_cast<double>(n) * n);

    InvariantTrace trace;
    OnlineAllocator allocator(n, phi, options);
    std::vector<std::vector<unsigned char>> prev_active(k_levels,
                                                        std::vector<unsigned char>(n, 1));
    std::vector<double> online_values(n, 0.0);

    for (long t = 0; t < instance.goods(); ++t) {
        for (int k = 1; k <= k_levels; ++k)
            for (int agent : allocator.vulnerable(k))
                if (!allocator.is_active(k, agent)) trace.vulnerable_subset_active = false;

        const auto v = instance.good(t);
        const StepShares shares = allocator.step(v);
        double sum = shares.leftover;
        for (double f : shares.fractions) sum += f;
        trace.max_feasibility_violation =
            std::max(trace.max_feasibility_violation, std::fabs(sum - 1.0));
        trace.max_leftover = std::max(trace.max_leftover, shares.leftover);
        for (int i = 0; i < n; ++i) online_values[i] += shares.fractions[i] * v[i];

        for (int k = 1; k <= k_levels; ++k) {
            const double alpha = level_alpha(k);
            const double exit_threshold = alpha / phi;
            for (int i = 0; i < n; ++i) {
                const bool active_now = allocator.is_active(k, i);
                if (active_now && !prev_active[k - 1][i]) trace.active_monotone = false;
                if (!active_now && prev_active[k - 1][i] &&
                    allocator.level_value(k, i) < exit_threshold)
                    trace.exit_correct = false;
                const double excess = allocator.level_value(k, i) - (exit_threshold + cap);
                trace.max_level_value_excess = std::max(trace.max_level_value_excess, excess);
                prev_active[k - 1][i] = active_now ? 1 : 0;
            }
        }
    }

    for (int i = 0; i < n; ++i)
        if (online_values[i] < 0.5 / n - kFeasTol) trace.baseline_value_ok = false;

    trace.ok = trace.max_feasibility_violation <= kFeasTol && trace.max_leftover <= 0.5 + kFeasTol &&
               trace.max_level_value_excess <= 1e-12 && trace.active_monotone &&
               trace.vulnerable_subset_active && trace.exit_correct && trace.baseline_value_ok;
    if (!trace.ok) {
        trace.detail = "feas=" + std::to_string(trace.max_feasibility_violation) +
                       " leftover=" + std::to_string(trace.max_leftover) +
                       " level_excess=" + std::to_string(trace.max_level_value_excess) +
                       " monotone=" + std::to_string(trace.active_monotone) +
                       " subset=" + std::to_string(trace.vulnerable_subset_active) +
                       " exit=" + std::to_string(trace.exit_correct) +
                       " baseline=" + std::to_string(trace.baseline_value_ok);
    }
    return trace;
}

} // namespace pmean
