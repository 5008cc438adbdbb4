#include "pmean/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmean/error.hpp"
#include "pmean/log.hpp"
#include "pmean/rng.hpp"

namespace pmean {

const char* adversary_kind_name(AdversaryKind kind) {
    switch (kind) {
    case AdversaryKind::suboptimality_4agent: return "suboptimality_4agent";
    case AdversaryKind::negative_p_groups: return "negative_p_groups";
    case AdversaryKind::random_dirichlet: return "random_dirichlet";
    case AdversaryKind::random_sparse: return "random_sparse";
    }
    return "?";
}

std::optional<AdversaryKind> parse_adversary_kind(std::string_view name) {
    if (name == "suboptimality_4agent") return AdversaryKind::suboptimality_4agent;
    if (name == "negative_p_groups") return AdversaryKind::negative_p_groups;
    if (name == "random_dirichlet") return AdversaryKind::random_dirichlet;
    if (name == "random_sparse") return AdversaryKind::random_sparse;
    return std::nullopt;
}

bool adversary_is_adaptive(AdversaryKind kind) {
    return kind == AdversaryKind::suboptimality_4agent || kind == AdversaryKind::negative_p_groups;
}

PredictedBounds predicted_bounds(AdversaryKind kind, Exponent p, int agents) {
    PredictedBounds bounds;
    if (kind == AdversaryKind::suboptimality_4agent) {
        bounds.oracle_lower = 5.0 / 8.0;
        bounds.online_upper = 5.0 / 8.0;
        bounds.ratio_lower = 1.0;
        bounds.strict = true;
        return bounds;
    }
    if (kind != AdversaryKind::negative_p_groups)
        fail(Errc::invalid_argument, "predicted_bounds: no closed form for this kind");
    double inv_ap = 0.0;      // 1/|p|, 0 in the egalitarian limit
    double ratio_exp = 0.5;   // |p|/(2|p|+1), 1/2 in the limit
    if (!p.is_neg_infinity()) {
        const double pe = p.value();
        if (pe >= 0.0) fail(Errc::domain, "negative_p_groups requires p < 0");
        inv_ap = 1.0 / -pe;
        ratio_exp = -pe / (2.0 * -pe + 1.0);
    }
    bounds.oracle_lower = std::pow(2.0, -(1.0 + inv_ap));
    bounds.online_upper = std::pow(2.0, 1.0 + inv_ap) / std::pow(agents, ratio_exp);
    bounds.ratio_lower = std::pow(2.0, -(2.0 + 2.0 * inv_ap)) * std::pow(agents, ratio_exp);
    return bounds;
}

namespace {

// Round to an integer when within tolerance, otherwise floor; flags which.
long integral_or_floor(double x, bool& exact) {
    const double r = std::round(x);
    if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) {
        exact = true;
        return static_cast<long>(r);
    }
    exact = false;
    return static_cast<long>(std::floor(x));
}

bool exponent_is_nonnegative(const Exponent& p) {
    return !p.is_neg_infinity() && p.value() >= 0.0;
}

} // namespace

AdaptiveAdversary::AdaptiveAdversary(AdversaryKind kind, const AdversaryParams& params)
    : kind_(kind), n_(params.n) {
    if (!adversary_is_adaptive(kind))
        fail(Errc::invalid_argument, "AdaptiveAdversary: kind is not adaptive; use generate_random");
    if (kind == AdversaryKind::suboptimality_4agent) {
        if (n_ < 4 || n_ % 4 != 0)
            fail(Errc::invalid_argument, "suboptimality_4agent requires n to be a positive multiple of 4");
        blocks_ = n_ / 4;
        return;
    }

    // negative_p_groups
    if (exponent_is_nonnegative(params.p))
        fail(Errc::domain, "negative_p_groups requires p < 0");
    if (params.p.is_neg_infinity()) {
        ap_ = std::numeric_limits<double>::infinity();
        a_ = 0.5;
    } else {
        ap_ = -params.p.value();
        a_ = (ap_ + 1.0) / (2.0 * ap_ + 1.0);
    }
    // n must exceed 2^{(2|p|+1)/|p|} so the pigeonhole count is positive.
    const double min_n = params.p.is_neg_infinity() ? 4.0 : std::pow(2.0, (2.0 * ap_ + 1.0) / ap_);
    if (!(static_cast<double>(n_) > min_n))
        fail(Errc::invalid_argument,
             "negative_p_groups requires n > 2^((2|p|+1)/|p|) = " + std::to_string(min_n) +
                 " (ideally n = b^(2|p|+1) for integer b)");

    bool groups_exact = true, specials_exact = true;
    group_count_ = static_cast<int>(integral_or_floor(std::pow(n_, 1.0 - a_), groups_exact));
    const double special_exp = params.p.is_neg_infinity() ? 0.0 : a_ / (ap_ + 1.0);
    specials_per_group_ =
        static_cast<int>(integral_or_floor(std::pow(n_, special_exp), specials_exact));
    group_count_ = std::max(group_count_, 1);
    specials_per_group_ = std::max(specials_per_group_, 1);
    if (!groups_exact || !specials_exact) {
        note_ = "non-integral group structure for n=" + std::to_string(n_) +
                ", using floors (groups=" + std::to_string(group_count_) +
                ", specials/group=" + std::to_string(specials_per_group_) + ")";
        log(LogLevel::info, "negative_p_groups: " + note_);
    }
    special_fraction_cutoff_ = 2.0 * std::pow(n_, -a_);

    // consecutive agent indices, remainder spread over the leading groups
    groups_.resize(group_count_);
    const int base = n_ / group_count_;
    const int rem = n_ % group_count_;
    int next = 0;
    for (int g = 0; g < group_count_; ++g) {
        const int size = base + (g < rem ? 1 : 0);
        for (int j = 0; j < size; ++j) groups_[g].push_back(next++);
    }
}

std::vector<double> AdaptiveAdversary::round_values_4agent(int round) {
    const int block = round / 5;
    const int phase = round % 5;
    const int base = 4 * block;
    std::vector<double> values(n_, 0.0);
    auto frac = [&](int r, int agent) { return history_[r][agent]; };
    switch (phase) {
    case 0:
        values[base] = values[base + 1] = 0.5;
        break;
    case 1:
        values[base + 2] = values[base + 3] = 0.5;
        break;
    default: {
        const int r1 = 5 * block, r2 = 5 * block + 1;
        const int h1 = frac(r1, base) >= frac(r1, base + 1) ? base : base + 1;
        const int l1 = h1 == base ? base + 1 : base;
        const int h2 = frac(r2, base + 2) >= frac(r2, base + 3) ? base + 2 : base + 3;
        const int l2 = h2 == base + 2 ? base + 3 : base + 2;
        if (phase == 2) values[l1] = values[l2] = 0.5;
        if (phase == 3) values[h1] = 0.5;
        if (phase == 4) values[h2] = 0.5;
        break;
    }
    }
    return values;
}

void AdaptiveAdversary::select_specials() {
    specials_.clear();
    for (int g = 0; g < group_count_; ++g) {
        std::vector<int> chosen;
        for (int agent : groups_[g]) {
            if (history_[g][agent] <= special_fraction_cutoff_ + 1e-12) {
                chosen.push_back(agent);
                if (static_cast<int>(chosen.size()) == specials_per_group_) break;
            }
        }
        if (static_cast<int>(chosen.size()) < specials_per_group_)
            fail(Errc::check_failed,
                 "negative_p_groups: pigeonhole violated, group " + std::to_string(g) + " has only " +
                     std::to_string(chosen.size()) + " special candidates");
        specials_.insert(specials_.end(), chosen.begin(), chosen.end());
    }
    std::sort(specials_.begin(), specials_.end());
    non_specials_.clear();
    std::size_t e = 0;
    for (int i = 0; i < n_; ++i) {
        if (e < specials_.size() && specials_[e] == i) {
            ++e;
            continue;
        }
        non_specials_.push_back(i);
    }
}

std::vector<double> AdaptiveAdversary::round_values_groups(int round) {
    std::vector<double> values(n_, 0.0);
    if (round < group_count_) {
        for (int agent : groups_[round]) values[agent] = 0.5;
        return values;
    }
    if (round == group_count_) {
        select_specials();
        for (int agent : specials_) values[agent] = 0.5;
        return values;
    }
    const int j = round - group_count_ - 1; // j-th non-special agent, ascending
    values[non_specials_[j]] = 0.5;
    return values;
}

std::optional<GoodArrival> AdaptiveAdversary::next_round(
    std::span<const double> previous_fractions) {
    if (emitted_ > 0) {
        if (static_cast<int>(previous_fractions.size()) != n_)
            fail(Errc::dimension, "adversary expects the previous round's per-agent fractions");
        history_.emplace_back(previous_fractions.begin(), previous_fractions.end());
    }
    if (done_) return std::nullopt;

    int total_rounds;
    if (kind_ == AdversaryKind::suboptimality_4agent) {
        total_rounds = 5 * blocks_;
    } else {
        // group rounds + one special round + one round per non-special agent
        const int specials_total = group_count_ * specials_per_group_;
        total_rounds = group_count_ + 1 + (n_ - specials_total);
    }
    if (emitted_ == total_rounds) {
        done_ = true;
        return std::nullopt;
    }
    GoodArrival good{kind_ == AdversaryKind::suboptimality_4agent
                         ? round_values_4agent(emitted_)
                         : round_values_groups(emitted_)};
    ++emitted_;
    return good;
}

std::vector<std::vector<double>> AdaptiveAdversary::explicit_offline_rounds() const {
    if (!done_) fail(Errc::internal, "explicit offline allocation requested before the interaction ended");
    std::vector<std::vector<double>> rounds;
    if (kind_ == AdversaryKind::suboptimality_4agent) {
        for (int block = 0; block < blocks_; ++block) {
            const int base = 4 * block;
            const int r1 = 5 * block, r2 = 5 * block + 1;
            const int h1 = history_[r1][base] >= history_[r1][base + 1] ? base : base + 1;
            const int l1 = h1 == base ? base + 1 : base;
            const int h2 = history_[r2][base + 2] >= history_[r2][base + 3] ? base + 2 : base + 3;
            const int l2 = h2 == base + 2 ? base + 3 : base + 2;
            std::vector<double> w(n_, 0.0);
            w[l1] = 0.75;
            w[h1] = 0.25;
            rounds.push_back(w);
            std::fill(w.begin(), w.end(), 0.0);
            w[l2] = 0.75;
            w[h2] = 0.25;
            rounds.push_back(w);
            std::fill(w.begin(), w.end(), 0.0);
            w[l1] = w[l2] = 0.5;
            rounds.push_back(w);
            std::fill(w.begin(), w.end(), 0.0);
            w[h1] = 1.0;
            rounds.push_back(w);
            std::fill(w.begin(), w.end(), 0.0);
            w[h2] = 1.0;
            rounds.push_back(w);
        }
        return rounds;
    }
    // group rounds: uniform over the group's specials; the special round is
    // left unassigned; each non-special agent takes its own round whole.
    for (int g = 0; g < group_count_; ++g) {
        std::vector<double> w(n_, 0.0);
        std::vector<int> group_specials;
        for (int agent : groups_[g])
            if (std::binary_search(specials_.begin(), specials_.end(), agent))
                group_specials.push_back(agent);
        for (int agent : group_specials) w[agent] = 1.0 / static_cast<double>(group_specials.size());
        rounds.push_back(std::move(w));
    }
    rounds.emplace_back(n_, 0.0);
    for (int agent : non_specials_) {
        std::vector<double> w(n_, 0.0);
        w[agent] = 1.0;
        rounds.push_back(std::move(w));
    }
    return rounds;
}

std::vector<double> AdaptiveAdversary::explicit_offline_values() const {
    if (kind_ == AdversaryKind::suboptimality_4agent)
        return std::vector<double>(n_, 5.0 / 8.0);
    if (!done_) fail(Errc::internal, "explicit offline values requested before the interaction ended");
    std::vector<double> values(n_, 0.5);
    for (int agent : specials_) values[agent] = 0.5 / static_cast<double>(specials_per_group_);
    return values;
}

Instance generate_random(AdversaryKind kind, const AdversaryParams& params) {
    const int n = params.n;
    const long t = params.t;
    if (n < 1 || t < 1) fail(Errc::invalid_argument, "random generator needs n >= 1 and t >= 1");
    std::vector<double> flat(static_cast<std::size_t>(t) * n, 0.0);

    if (kind == AdversaryKind::random_dirichlet) {
        for (int i = 0; i < n; ++i) {
            auto eng = rng::engine(params.seed, static_cast<std::uint64_t>(i));
            std::vector<double> row(t);
            double sum = 0.0;
            do {
                sum = 0.0;
                for (long g = 0; g < t; ++g) {
                    row[g] = rng::exponential1(eng);
                    sum += row[g];
                }
            } while (sum <= 0.0);
            for (long g = 0; g < t; ++g) flat[g * n + i] = row[g] / sum;
        }
    } else if (kind == AdversaryKind::random_sparse) {
        for (long g = 0; g < t; ++g) {
            auto eng = rng::engine(params.seed, 0x900dULL + static_cast<std::uint64_t>(g));
            bool any = false;
            for (int i = 0; i < n; ++i) {
                if (rng::uniform01(eng) < 0.3) {
                    flat[g * n + i] = rng::uniform01(eng);
                    any = true;
                }
            }
            if (!any) flat[g * n + static_cast<int>(rng::below(eng, n))] = rng::uniform01(eng);
        }
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (long g = 0; g < t; ++g) sum += flat[g * n + i];
            if (sum == 0.0) {
                flat[(i % t) * n + i] = 0.5;
                sum = 0.5;
            }
            for (long g = 0; g < t; ++g) flat[g * n + i] /= sum;
        }
    } else {
        fail(Errc::invalid_argument, "generate_random: adaptive kinds go through AdaptiveAdversary");
    }

    std::string meta = std::string(adversary_kind_name(kind)) + " n=" + std::to_string(n) +
                       " t=" + std::to_string(t) + " seed=" + std::to_string(params.seed);
    return Instance(n, std::move(flat), std::move(meta));
}

InteractionResult run_adversarial(AdaptiveAdversary& adversary, OnlineAllocatorBase& allocator,
                                  const InteractionOptions& options) {
    const int n = adversary.agents();
    if (allocator.agents() != n) fail(Errc::dimension, "adversary and allocator agent counts differ");
    const long m = (static_cast<long>(n) * n + 1) / 2; // ceil(n^2/2) sub-goods per round

    InteractionResult result;
    result.sub_goods_per_round = static_cast<int>(m);
    result.online_values.assign(n, 0.0);

    std::vector<double> transcript_flat;
    std::vector<std::vector<double>> recorded_fractions; // per sub-good, only when recording
    std::vector<double> means;
    std::vector<double> sub(n);

    while (true) {
        auto round = adversary.next_round(means);
        if (!round) break;
        const auto& values = round->values;
        for (int i = 0; i < n; ++i) sub[i] = values[i] / static_cast<double>(m);

        std::vector<double> sums(n, 0.0);
        for (long s = 0; s < m; ++s) {
            StepShares shares = allocator.step(sub);
            for (int i = 0; i < n; ++i) {
                sums[i] += shares.fractions[i];
                result.online_values[i] += shares.fractions[i] * sub[i];
            }
            if (options.record_transcript)
                transcript_flat.insert(transcript_flat.end(), sub.begin(), sub.end());
            if (options.record_allocation) recorded_fractions.push_back(std::move(shares.fractions));
        }
        means.resize(n);
        for (int i = 0; i < n; ++i) means[i] = sums[i] / static_cast<double>(m);
        ++result.rounds;
    }
    result.total_goods = static_cast<long>(result.rounds) * m;
    result.offline_values = adversary.explicit_offline_values();
    result.note = adversary.structure_note();

    if (options.record_transcript) {
        std::string meta = std::string(adversary_kind_name(adversary.kind())) +
                           " n=" + std::to_string(n) + " rounds=" + std::to_string(result.rounds) +
                           " sub_goods_per_round=" + std::to_string(m);
        result.transcript = Instance(n, std::move(transcript_flat), std::move(meta));

        Allocation offline = Allocation::zeros(n, result.total_goods);
        const auto offline_rounds = adversary.explicit_offline_rounds();
        for (int r = 0; r < result.rounds; ++r)
            for (long s = 0; s < m; ++s) offline.set_good(static_cast<long>(r) * m + s, offline_rounds[r]);
        result.offline_allocation = std::move(offline);
    }
    if (options.record_allocation) {
        Allocation allocation = Allocation::zeros(n, result.total_goods);
        for (long g = 0; g < result.total_goods; ++g) allocation.set_good(g, recorded_fractions[g]);
        result.allocation = std::move(allocation);
    }
    return result;
}

} // namespace pmean
