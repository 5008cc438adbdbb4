#include "pmean/types.hpp"

#include <algorithm>
#include <cmath>

#include "pmean/error.hpp"

namespace pmean {

Instance::Instance(int agents, std::vector<double> flat, std::string meta)
    : n_(agents), values_(std::move(flat)), meta_(std::move(meta)) {
    if (n_ < 1) fail(Errc::invalid_argument, "instance needs at least one agent");
    if (values_.size() % static_cast<std::size_t>(n_) != 0)
        fail(Errc::dimension, "instance value buffer is not a multiple of the agent count");
    for (double v : values_) {
        if (!std::isfinite(v)) fail(Errc::domain, "instance values must be finite");
        if (v < 0.0) fail(Errc::domain, "instance values must be nonnegative");
    }
}

Instance Instance::from_goods(int agents, const std::vector<std::vector<double>>& goods,
                              std::string meta) {
    std::vector<double> flat;
    flat.reserve(goods.size() * static_cast<std::size_t>(agents));
    for (const auto& g : goods) {
        if (static_cast<int>(g.size()) != agents)
            fail(Errc::dimension, "good value vector length does not match agent count");
        flat.insert(flat.end(), g.begin(), g.end());
    }
    return Instance(agents, std::move(flat), std::move(meta));
}

double Instance::max_value() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v);
    return m;
}

bool Instance::cap_satisfied() const {
    return max_value() <= 1.0 / (static_cast<double>(n_) * n_) + kValueTol;
}

ScalingReport validate_scaling(const Instance& instance) {
    if (instance.goods() == 0) fail(Errc::invalid_argument, "cannot validate an instance with no goods");
    const int n = instance.agents();
    ScalingReport report;
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (long t = 0; t < instance.goods(); ++t) sum += instance.value(t, i);
        const double dev = std::fabs(sum - 1.0);
        if (dev > kScaleTol) {
            report.ok = false;
            ++report.violations;
        }
        if (dev > report.worst_deviation) {
            report.worst_deviation = dev;
            report.worst_agent = i;
        }
    }
    return report;
}

Instance split_to_cap(const Instance& instance, SplitMode mode) {
    const int n = instance.agents();
    const double cap = 1.0 / (static_cast<double>(n) * n);
    std::vector<double> out;
    out.reserve(instance.goods() * static_cast<std::size_t>(n));
    for (long t = 0; t < instance.goods(); ++t) {
        const auto good = instance.good(t);
        double vmax = 0.0;
        for (double v : good) vmax = std::max(vmax, v);
        long copies = 1;
        if (mode == SplitMode::paper) {
            copies = static_cast<long>(n) * n;
        } else if (vmax > cap) {
            copies = static_cast<long>(std::ceil(static_cast<double>(n) * n * vmax));
        }
        if (copies == 1) {
            out.insert(out.end(), good.begin(), good.end());
            continue;
        }
        const double inv = 1.0 / static_cast<double>(copies);
        for (long c = 0; c < copies; ++c)
            for (double v : good) out.push_back(v * inv);
    }
    return Instance(n, std::move(out), instance.meta());
}

Allocation::Allocation(int agents, long goods, double fill, double leftover)
    : n_(agents), t_(goods), frac_(static_cast<std::size_t>(goods) * agents, fill),
      leftover_(goods, leftover) {
    if (agents < 1 || goods < 0) fail(Errc::invalid_argument, "allocation shape invalid");
}

Allocation Allocation::zeros(int agents, long goods) { return Allocation(agents, goods, 0.0, 1.0); }

Allocation Allocation::uniform(int agents, long goods) {
    return Allocation(agents, goods, 1.0 / agents, 0.0);
}

void Allocation::set_good(long t, std::span<const double> fractions) {
    if (static_cast<int>(fractions.size()) != n_) fail(Errc::dimension, "fraction vector length mismatch");
    double sum = 0.0;
    for (double f : fractions) {
        if (!std::isfinite(f) || f < 0.0 || f > 1.0 + kFeasTol)
            fail(Errc::domain, "fractions must lie in [0,1]");
        sum += f;
    }
    if (sum > 1.0 + kFeasTol) fail(Errc::domain, "per-good fractions exceed one unit");
    std::copy(fractions.begin(), fractions.end(), frac_.begin() + t * n_);
    leftover_[t] = std::max(0.0, 1.0 - sum);
}

double Allocation::max_feasibility_violation() const {
    double worst = 0.0;
    for (long t = 0; t < t_; ++t) {
        double sum = leftover_[t];
        if (leftover_[t] < 0.0) worst = std::max(worst, -leftover_[t]);
        for (int i = 0; i < n_; ++i) {
            const double f = frac_[t * n_ + i];
            sum += f;
            if (f < 0.0) worst = std::max(worst, -f);
            if (f > 1.0) worst = std::max(worst, f - 1.0);
        }
        worst = std::max(worst, std::fabs(sum - 1.0));
    }
    return worst;
}

std::vector<double> agent_values(const Instance& instance, const Allocation& allocation) {
    if (instance.agents() != allocation.agents() || instance.goods() != allocation.goods())
        fail(Errc::dimension, "instance and allocation shapes differ");
    const int n = instance.agents();
    std::vector<double> values(n, 0.0);
    for (long t = 0; t < instance.goods(); ++t) {
        const auto v = instance.good(t);
        const auto x = allocation.good(t);
        for (int i = 0; i < n; ++i) values[i] += x[i] * v[i];
    }
    return values;
}

} // namespace pmean
