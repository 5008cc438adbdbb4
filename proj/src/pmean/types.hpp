#pragma once

#include <span>
#include <string>
#include <vector>

namespace pmean {

// Tolerances shared across the library. Double accumulation over T <= 1e6
// terms stays well inside these.
inline constexpr double kScaleTol = 1e-9;
inline constexpr double kValueTol = 1e-9;
inline constexpr double kFeasTol = 1e-9;

// One round's per-agent value vector.
struct GoodArrival {
    std::vector<double> values;
};

// A sequence of goods for n agents, stored densely good-major. Valuations are
// expected to be scaled (each agent's values sum to 1); construction only
// enforces structure (finite, nonnegative), scaling is checked separately so
// that violations can be reported rather than refused.
class Instance {
public:
    // flat.size() must be a multiple of n; entries finite and >= 0.
    Instance(int agents, std::vector<double> flat, std::string meta = "");

    static Instance from_goods(int agents, const std::vector<std::vector<double>>& goods,
                               std::string meta = "");

    int agents() const { return n_; }
    long goods() const { return static_cast<long>(values_.size() / n_); }
    std::span<const double> good(long t) const { return {values_.data() + t * n_, static_cast<std::size_t>(n_)}; }
    double value(long t, int agent) const { return values_[t * n_ + agent]; }
    const std::string& meta() const { return meta_; }
    void set_meta(std::string meta) { meta_ = std::move(meta); }

    // max_t max_i v_i^t
    double max_value() const;
    // The per-good value cap 1/n^2 holds (within kValueTol).
    bool cap_satisfied() const;

private:
    int n_;
    std::vector<double> values_; // T*n, good-major
    std::string meta_;
};

struct ScalingReport {
    bool ok = true;
    int worst_agent = -1;      // 1-based in messages, 0-based here
    double worst_deviation = 0.0;
    int violations = 0;
};

// ok iff every agent's values sum to 1 within kScaleTol; otherwise reports the
// worst-offending agent. Throws Errc::invalid_argument for empty instances.
ScalingReport validate_scaling(const Instance& instance);

enum class SplitMode {
    minimal, // m = ceil(n^2 * max_i v_i^t) copies, only for goods over the cap
    paper,   // n^2 copies for every good
};

// Replaces each good over the value cap 1/n^2 by m consecutive identical
// copies of value v/m. Preserves good order and per-agent totals; idempotent
// in minimal mode.
Instance split_to_cap(const Instance& instance, SplitMode mode = SplitMode::minimal);

// Fractional assignment x in [0,1]^{n x T} plus the unassigned fraction per
// good. sum_i x_i^t + leftover_t = 1 for every good.
class Allocation {
public:
    static Allocation zeros(int agents, long goods);   // leftover 1 everywhere
    static Allocation uniform(int agents, long goods); // x = 1/n, leftover 0

    int agents() const { return n_; }
    long goods() const { return t_; }

    std::span<double> good(long t) { return {frac_.data() + t * n_, static_cast<std::size_t>(n_)}; }
    std::span<const double> good(long t) const { return {frac_.data() + t * n_, static_cast<std::size_t>(n_)}; }
    double frac(long t, int agent) const { return frac_[t * n_ + agent]; }
    double leftover(long t) const { return leftover_[t]; }

    // Sets one good's fractions; entries must lie in [0,1] and sum to at most
    // 1 + kFeasTol. leftover becomes max(0, 1 - sum).
    void set_good(long t, std::span<const double> fractions);

    // Largest |sum_i x_i^t + leftover_t - 1| over goods, plus range checks.
    double max_feasibility_violation() const;

private:
    Allocation(int agents, long goods, double fill, double leftover);
    int n_;
    long t_;
    std::vector<double> frac_; // T*n, good-major
    std::vector<double> leftover_;
};

// (sum_t x_i^t v_i^t)_i. Throws Errc::dimension on shape mismatch.
std::vector<double> agent_values(const Instance& instance, const Allocation& allocation);

} // namespace pmean
