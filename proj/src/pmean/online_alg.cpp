#include "pmean/online_alg.hpp"

#include <bit>
#include <cmath>

#include "pmean/error.hpp"

namespace pmean {

int level_count(int agents) {
    if (agents < 1) fail(Errc::invalid_argument, "level_count: need at least one agent");
    const unsigned long long two_n = 2ULL * static_cast<unsigned long long>(agents);
    return static_cast<int>(std::bit_width(two_n - 1)); // ceil(log2(2n))
}

double level_alpha(int k) { return std::ldexp(1.0, -k); }

double threshold_for(Exponent p, int agents) {
    if (agents < 2) fail(Errc::invalid_argument, "threshold_for: need n >= 2");
    const double n = agents;
    const double lg = std::log2(2.0 * n);
    if (p.is_neg_infinity()) return 8.0 * std::sqrt(n) * lg;
    if (p.is_nash()) return 8.0 * lg * lg * lg;
    const double pe = p.value();
    if (pe > 0.0) return 16.0 * lg * lg * lg;
    const double ap = -pe;
    // boundary rule: p = -1/log(2n) exactly belongs to the (2n)^{2|p|} row
    if (pe == -1.0 / lg) return 8.0 * std::pow(2.0 * n, 2.0 * ap) * lg * lg * lg;
    if (pe <= -1.0) return 8.0 * std::sqrt(n) * lg;
    if (pe <= -0.25) return 8.0 * std::pow(n, ap / (ap + 1.0)) * lg * lg;
    if (pe <= -1.0 / lg) return 8.0 * std::pow(2.0 * n, 2.0 * ap) * lg * lg * lg;
    return 32.0 * lg * lg * lg;
}

double threshold_universal(int agents) {
    if (agents < 2) fail(Errc::invalid_argument, "threshold_universal: need n >= 2");
    const double n = agents;
    return 8.0 * std::sqrt(n) * std::log2(2.0 * n);
}

OnlineAllocator::OnlineAllocator(int agents, double phi, AllocatorOptions options)
    : n_(agents), phi_(phi), options_(options), k_levels_(level_count(agents)),
      cap_(1.0 / (static_cast<double>(agents) * agents)),
      active_(static_cast<std::size_t>(k_levels_) * agents, 1),
      active_count_(k_levels_, agents), vulnerable_(k_levels_),
      level_value_(static_cast<std::size_t>(k_levels_) * agents, 0.0), seen_(agents, 0.0) {
    if (agents < 1) fail(Errc::invalid_argument, "allocator needs at least one agent");
    if (!(phi > 0.0)) fail(Errc::invalid_argument, "threshold phi must be positive");
}

StepShares OnlineAllocator::step(std::span<const double> v) {
    if (static_cast<int>(v.size()) != n_) fail(Errc::dimension, "good value vector length mismatch");
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0) fail(Errc::domain, "good values must be finite and nonnegative");
        if (x > cap_ + kValueTol)
            fail(Errc::invalid_argument, "value cap violated: good has a value above 1/n^2");
    }

    StepShares out;
    out.fractions.assign(n_, 0.5 / n_);
    const double share = 0.25 / k_levels_; // 1/(4K)

    for (int k = 0; k < k_levels_; ++k) {
        unsigned char* active = active_.data() + static_cast<std::size_t>(k) * n_;
        double* lv = level_value_.data() + static_cast<std::size_t>(k) * n_;

        int argmax = -1;
        double best = -1.0;
        for (int i = 0; i < n_; ++i) {
            if (active[i] && v[i] > best) {
                best = v[i];
                argmax = i;
            }
        }
        if (argmax >= 0) {
            out.fractions[argmax] += share;
            lv[argmax] += share * v[argmax];
        }
        const auto& vul = vulnerable_[k];
        if (!vul.empty()) {
            const double each = share / static_cast<double>(vul.size());
            for (int i : vul) {
                out.fractions[i] += each;
                lv[i] += each * v[i];
            }
        } else if (options_.redirect_unassigned && argmax >= 0) {
            // extra welfare only; kept out of the level accounting so the
            // active/vulnerable evolution matches the withholding variant
            out.fractions[argmax] += share;
        }
    }

    for (int i = 0; i < n_; ++i) seen_[i] += v[i];

    // Exit and vulnerability updates for the next round: an agent leaves a
    // level once its accrued level value reaches alpha/phi; the vulnerable set
    // is re-derived from exact cumulative sums (strict inequality, no
    // tolerance).
    for (int k = 0; k < k_levels_; ++k) {
        const double alpha = level_alpha(k + 1);
        const double exit_threshold = alpha / phi_;
        const double remaining_threshold = 1.0 - alpha / 4.0;
        unsigned char* active = active_.data() + static_cast<std::size_t>(k) * n_;
        const double* lv = level_value_.data() + static_cast<std::size_t>(k) * n_;
        auto& vul = vulnerable_[k];
        vul.clear();
        for (int i = 0; i < n_; ++i) {
            if (!active[i]) continue;
            if (lv[i] >= exit_threshold) {
                active[i] = 0;
                --active_count_[k];
                continue;
            }
            if (seen_[i] > remaining_threshold) vul.push_back(i);
        }
    }

    ++round_;
    double assigned = 0.0;
    for (double f : out.fractions) assigned += f;
    out.leftover = std::max(0.0, 1.0 - assigned);
    return out;
}

StepShares GreedyAllocator::step(std::span<const double> v) {
    if (static_cast<int>(v.size()) != n_) fail(Errc::dimension, "good value vector length mismatch");
    StepShares out;
    out.fractions.assign(n_, 0.0);
    int argmax = 0;
    for (int i = 1; i < n_; ++i)
        if (v[i] > v[argmax]) argmax = i;
    out.fractions[argmax] = 1.0;
    out.leftover = 0.0;
    return out;
}

StepShares UniformAllocator::step(std::span<const double> v) {
    if (static_cast<int>(v.size()) != n_) fail(Errc::dimension, "good value vector length mismatch");
    StepShares out;
    out.fractions.assign(n_, 1.0 / n_);
    double assigned = 0.0;
    for (double f : out.fractions) assigned += f;
    out.leftover = std::max(0.0, 1.0 - assigned);
    return out;
}

std::unique_ptr<OnlineAllocatorBase> make_allocator(OnlineAlgorithm algorithm, int agents, double phi,
                                                    AllocatorOptions options) {
    switch (algorithm) {
    case OnlineAlgorithm::alg_phi:
        return std::make_unique<OnlineAllocator>(agents, phi, options);
    case OnlineAlgorithm::greedy:
        return std::make_unique<GreedyAllocator>(agents);
    case OnlineAlgorithm::uniform:
        return std::make_unique<UniformAllocator>(agents);
    }
    fail(Errc::internal, "unknown algorithm");
}

RunResult run_online(const Instance& instance, OnlineAllocatorBase& allocator,
                     bool record_allocation) {
    if (instance.agents() != allocator.agents())
        fail(Errc::dimension, "instance and allocator agent counts differ");
    const int n = instance.agents();
    const long goods = instance.goods();
    RunResult result;
    result.values.assign(n, 0.0);
    if (record_allocation) result.allocation = Allocation::zeros(n, goods);
    for (long t = 0; t < goods; ++t) {
        const auto v = instance.good(t);
        StepShares shares = allocator.step(v);
        for (int i = 0; i < n; ++i) result.values[i] += shares.fractions[i] * v[i];
        result.leftover_total += shares.leftover;
        if (record_allocation) result.allocation->set_good(t, shares.fractions);
    }
    return result;
}

} // namespace pmean
