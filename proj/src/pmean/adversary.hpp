#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmean/online_alg.hpp"
#include "pmean/types.hpp"
#include "pmean/welfare.hpp"

namespace pmean {

enum class AdversaryKind {
    suboptimality_4agent, // forces sub-optimality for every p < 1
    negative_p_groups,    // group construction for p < 0
    random_dirichlet,
    random_sparse,
};

const char* adversary_kind_name(AdversaryKind kind);
std::optional<AdversaryKind> parse_adversary_kind(std::string_view name);
bool adversary_is_adaptive(AdversaryKind kind);

struct AdversaryParams {
    int n = 4;
    long t = 64;            // random kinds only
    Exponent p = Exponent::finite(-1.0); // negative_p_groups only
    std::uint64_t seed = 0;
};

// Closed-form bounds from the lower-bound constructions: a lower bound on the
// optimal p-mean welfare, an upper bound on any online algorithm's welfare,
// and the implied lower bound on the competitive ratio.
struct PredictedBounds {
    double oracle_lower = 0.0;
    double online_upper = 0.0;
    double ratio_lower = 0.0;
    bool strict = false; // ratio strictly above ratio_lower (the 4-agent case)
};

PredictedBounds predicted_bounds(AdversaryKind kind, Exponent p, int agents);

// Adaptive instance generator speaking in conceptual rounds: each round is a
// per-agent value vector whose choice may depend on the fractions the online
// algorithm assigned in earlier rounds.
class AdaptiveAdversary {
public:
    AdaptiveAdversary(AdversaryKind kind, const AdversaryParams& params);

    int agents() const { return n_; }
    AdversaryKind kind() const { return kind_; }

    // Values for the next round, or nullopt once the interaction is over.
    // previous_fractions: the per-agent fraction of the previous round's good
    // received by each agent (mean over its capped sub-goods); empty on the
    // first call.
    std::optional<GoodArrival> next_round(std::span<const double> previous_fractions);

    // The benchmark allocation from the construction, one fraction vector per
    // conceptual round. Valid once the interaction is complete.
    std::vector<std::vector<double>> explicit_offline_rounds() const;
    std::vector<double> explicit_offline_values() const;

    // negative_p_groups structure, for the counting invariants.
    const std::vector<std::vector<int>>& groups() const { return groups_; }
    const std::vector<int>& special_agents() const { return specials_; }
    int specials_per_group() const { return specials_per_group_; }
    const std::string& structure_note() const { return note_; }

    bool done() const { return done_; }
    int rounds_emitted() const { return emitted_; }

private:
    std::vector<double> round_values_4agent(int round);
    std::vector<double> round_values_groups(int round);
    void select_specials();

    AdversaryKind kind_;
    int n_;
    double ap_ = 1.0;  // |p|; infinity for the egalitarian limit
    double a_ = 0.0;   // (|p|+1)/(2|p|+1)
    int emitted_ = 0;
    bool done_ = false;
    std::vector<std::vector<double>> history_; // fractions per completed round

    // 4-agent construction
    int blocks_ = 0;

    // group construction
    int group_count_ = 0;
    int specials_per_group_ = 0;
    double special_fraction_cutoff_ = 0.0;
    std::vector<std::vector<int>> groups_;
    std::vector<int> specials_;     // E, ascending
    std::vector<int> non_specials_; // M, ascending
    std::string note_;
};

// Non-adaptive generators. Dirichlet: each agent's row is an independent
// symmetric Dirichlet draw over T goods. Sparse: each good is valued by a
// random subset of agents, rows renormalized to sum 1.
Instance generate_random(AdversaryKind kind, const AdversaryParams& params);

struct InteractionOptions {
    bool record_allocation = false;
    bool record_transcript = false;
};

struct InteractionResult {
    std::vector<double> online_values;
    std::vector<double> offline_values; // from the explicit construction
    std::optional<Instance> transcript;
    std::optional<Allocation> allocation;
    std::optional<Allocation> offline_allocation;
    int rounds = 0;
    int sub_goods_per_round = 0;
    long total_goods = 0;
    std::string note;
};

// Runs the full adaptive interaction, emitting each conceptual round of value
// 1/2 as ceil(n^2/2) identical sub-goods so the value cap holds. The
// adversary's decisions are fed the per-round mean fractions.
InteractionResult run_adversarial(AdaptiveAdversary& adversary, OnlineAllocatorBase& allocator,
                                  const InteractionOptions& options = {});

} // namespace pmean
