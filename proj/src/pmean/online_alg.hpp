#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pmean/types.hpp"
#include "pmean/welfare.hpp"

namespace pmean {

// Number of value levels: K = ceil(log2(2n)). alpha_k = 2^-k for k = 1..K.
int level_count(int agents);
double level_alpha(int k);

enum class ThresholdMode { table, universal, manual };

// The tailored threshold for the interval containing p (log base 2
// throughout). p exactly equal to -1/log2(2n) selects the (2n)^{2|p|} row.
// Requires n >= 2.
double threshold_for(Exponent p, int agents);

// 8 sqrt(n) log2(2n), valid for every p <= 1 simultaneously.
double threshold_universal(int agents);

struct StepShares {
    std::vector<double> fractions;
    double leftover = 0.0;
};

// Interface shared by the threshold algorithm and the comparison baselines so
// the adversaries can drive any of them.
class OnlineAllocatorBase {
public:
    virtual ~OnlineAllocatorBase() = default;
    virtual StepShares step(std::span<const double> good_values) = 0;
    virtual int agents() const = 0;
};

struct AllocatorOptions {
    // When the argmax or vulnerable share has no recipient it is withheld as
    // leftover; this redirects an empty vulnerable set's share to the argmax
    // agent instead.
    bool redirect_unassigned = false;
};

// The online allocator: half of each good uniformly, the rest split across K
// value levels between the most-valuing active agent and the vulnerable set.
class OnlineAllocator final : public OnlineAllocatorBase {
public:
    OnlineAllocator(int agents, double phi, AllocatorOptions options = {});

    // Requires max_i v_i <= 1/n^2 (+ tolerance). Ties in the argmax break to
    // the lowest agent index. Deterministic.
    StepShares step(std::span<const double> good_values) override;

    int agents() const override { return n_; }
    double phi() const { return phi_; }
    int levels() const { return k_levels_; }
    double alpha(int k) const { return level_alpha(k); }
    long round() const { return round_; }

    bool is_active(int k, int agent) const { return active_[(k - 1) * n_ + agent] != 0; }
    long active_count(int k) const { return active_count_[k - 1]; }
    // Ascending agent indices; the set used by the *next* step call.
    const std::vector<int>& vulnerable(int k) const { return vulnerable_[k - 1]; }
    double level_value(int k, int agent) const { return level_value_[(k - 1) * n_ + agent]; }
    double seen_value(int agent) const { return seen_[agent]; }

private:
    int n_;
    double phi_;
    AllocatorOptions options_;
    int k_levels_;
    double cap_;
    long round_ = 0;
    std::vector<unsigned char> active_; // K x n
    std::vector<long> active_count_;
    std::vector<std::vector<int>> vulnerable_;
    std::vector<double> level_value_; // K x n
    std::vector<double> seen_;
};

// Baseline: the whole good to the agent valuing it most (ties to the lowest
// index). Optimal for p = 1.
class GreedyAllocator final : public OnlineAllocatorBase {
public:
    explicit GreedyAllocator(int agents) : n_(agents) {}
    StepShares step(std::span<const double> good_values) override;
    int agents() const override { return n_; }

private:
    int n_;
};

// Baseline: 1/n of every good to every agent.
class UniformAllocator final : public OnlineAllocatorBase {
public:
    explicit UniformAllocator(int agents) : n_(agents) {}
    StepShares step(std::span<const double> good_values) override;
    int agents() const override { return n_; }

private:
    int n_;
};

enum class OnlineAlgorithm { alg_phi, greedy, uniform };

std::unique_ptr<OnlineAllocatorBase> make_allocator(OnlineAlgorithm algorithm, int agents, double phi,
                                                    AllocatorOptions options = {});

struct RunResult {
    std::optional<Allocation> allocation; // absent when record_allocation is off
    std::vector<double> values;           // v_i(x_i), accumulated online
    double leftover_total = 0.0;
};

// Feeds every good of a preprocessed instance to the allocator in order.
// Deterministic: identical inputs give bit-identical outputs.
RunResult run_online(const Instance& instance, OnlineAllocatorBase& allocator,
                     bool record_allocation = true);

} // namespace pmean
