#include "pmean/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pmean/error.hpp"
#include "pmean/log.hpp"

namespace pmean {

const char* oracle_method_name(OracleMethod method) {
    switch (method) {
    case OracleMethod::conditional_gradient: return "conditional_gradient";
    case OracleMethod::grid_bruteforce: return "grid_bruteforce";
    case OracleMethod::explicit_construction: return "explicit";
    }
    return "?";
}

namespace {

constexpr double kGradientFloor = 1e-12;

// d M_p / d v_i, including the common positive factor so that Frank-Wolfe
// gaps are meaningful. Values are floored at 1e-12 (reachable only before the
// interior start has been left, or in degenerate inputs).
void gradient(std::span<const double> values, Exponent p, std::vector<double>& g) {
    const std::size_t n = values.size();
    g.resize(n);
    if (p.is_nash()) {
        double log_sum = 0.0;
        for (double v : values) log_sum += std::log(std::max(v, kGradientFloor));
        const double f = std::exp(log_sum / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            g[i] = f / (static_cast<double>(n) * std::max(values[i], kGradientFloor));
        return;
    }
    const double pe = p.value();
    // avg = (1/n) sum (v/m)^pe, computed rescaled; dM/dv_i = (1/n) avg^(1/pe-1) (v_i/m)^(pe-1)
    // with the scale m cancelling.
    double m = pe < 0 ? std::numeric_limits<double>::infinity() : 0.0;
    for (double v : values) {
        const double vv = std::max(v, kGradientFloor);
        m = pe < 0 ? std::min(m, vv) : std::max(m, vv);
    }
    double avg = 0.0;
    for (double v : values) avg += std::pow(std::max(v, kGradientFloor) / m, pe);
    avg /= static_cast<double>(n);
    const double outer = std::pow(avg, 1.0 / pe - 1.0);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = outer * std::pow(std::max(values[i], kGradientFloor) / m, pe - 1.0) / static_cast<double>(n);
}

double objective(std::span<const double> values, Exponent p) { return p_mean(values, p); }

} // namespace

OracleResult solve_concave(const Instance& instance, Exponent p, long budget) {
    const int n = instance.agents();
    const long goods = instance.goods();
    if (goods == 0) fail(Errc::invalid_argument, "solve_concave: instance has no goods");
    const Exponent effective = p.is_neg_infinity() ? Exponent::finite(-50.0) : p;

    Allocation x = Allocation::uniform(n, goods);
    std::vector<double> values = agent_values(instance, x);

    auto report_welfare = [&](const std::vector<double>& vals) {
        if (p.is_neg_infinity()) return *std::min_element(vals.begin(), vals.end());
        return p_mean(vals, p);
    };

    OracleResult result{std::move(x), 0.0, OracleMethod::conditional_gradient,
                        std::numeric_limits<double>::infinity(), 0};
    if (budget <= 0) {
        result.welfare = report_welfare(values);
        return result;
    }

    double obj = objective(values, effective);
    std::vector<double> grad;
    std::vector<int> vertex(goods);
    std::vector<double> vertex_values(n);

    for (long iter = 1; iter <= budget; ++iter) {
        gradient(values, effective, grad);

        // Linear maximization oracle: each good wholly to its max-gradient-
        // weighted agent (ties to the lowest index).
        std::fill(vertex_values.begin(), vertex_values.end(), 0.0);
        double lmo_term = 0.0;
        for (long t = 0; t < goods; ++t) {
            const auto v = instance.good(t);
            int best = 0;
            double best_score = grad[0] * v[0];
            for (int i = 1; i < n; ++i) {
                const double score = grad[i] * v[i];
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            vertex[t] = best;
            vertex_values[best] += v[best];
            lmo_term += best_score;
        }
        double inner_current = 0.0;
        for (int i = 0; i < n; ++i) inner_current += grad[i] * values[i];
        const double gap = lmo_term - inner_current;
        result.gap_estimate = gap;
        result.iterations = iter - 1;
        if (gap <= 1e-6 * std::max(obj, 0.0)) break;

        double gamma = 2.0 / (static_cast<double>(iter) + 2.0);
        std::vector<double> trial(n);
        double trial_obj = -1.0;
        bool improved = false;
        // fixed schedule with a halving safeguard so the ascent stays monotone
        for (int attempt = 0; attempt < 50; ++attempt) {
            for (int i = 0; i < n; ++i)
                trial[i] = (1.0 - gamma) * values[i] + gamma * vertex_values[i];
            trial_obj = objective(trial, effective);
            if (trial_obj >= obj) {
                improved = true;
                break;
            }
            gamma *= 0.5;
        }
        if (!improved) {
            result.iterations = iter;
            break;
        }

        for (long t = 0; t < goods; ++t) {
            auto row = result.allocation.good(t);
            for (int i = 0; i < n; ++i) row[i] *= 1.0 - gamma;
            row[vertex[t]] += gamma;
        }
        values = std::move(trial);
        obj = trial_obj;
        result.iterations = iter;

        if (iter % 64 == 0) values = agent_values(instance, result.allocation); // drift hygiene
    }

    // leftover bookkeeping after in-place blending
    for (long t = 0; t < goods; ++t) {
        auto row = result.allocation.good(t);
        std::vector<double> copy(row.begin(), row.end());
        result.allocation.set_good(t, copy);
    }
    values = agent_values(instance, result.allocation);
    result.welfare = report_welfare(values);
    log(LogLevel::debug, "solve_concave: welfare " + std::to_string(result.welfare) + " gap " +
                             std::to_string(result.gap_estimate) + " iters " +
                             std::to_string(result.iterations));
    return result;
}

namespace {

struct GridSearch {
    const Instance& instance;
    Exponent p;
    int units;
    int n;
    long goods;
    std::vector<int> choice; // composition index per good
    std::vector<int> best_choice;
    std::vector<std::vector<int>> compositions; // all (c_1..c_n) with sum == units
    std::vector<double> values;
    std::vector<double> eval;
    double best = -1.0;
    long leaves = 0;

    void build_compositions(std::vector<int>& cur, int idx, int remaining) {
        if (idx == n - 1) {
            cur[idx] = remaining;
            compositions.push_back(cur);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            cur[idx] = c;
            build_compositions(cur, idx + 1, remaining - c);
        }
    }

    void dfs(long t) {
        if (t == goods) {
            ++leaves;
            // incremental add/subtract can leave -1e-18 dust on a coordinate
            for (int i = 0; i < n; ++i) eval[i] = values[i] < 0.0 ? 0.0 : values[i];
            const double w = p_mean(eval, p);
            if (w > best) {
                best = w;
                best_choice = choice;
            }
            return;
        }
        const auto good = instance.good(t);
        const double unit = 1.0 / units;
        for (std::size_t c = 0; c < compositions.size(); ++c) {
            const auto& comp = compositions[c];
            for (int i = 0; i < n; ++i) values[i] += comp[i] * unit * good[i];
            choice[t] = static_cast<int>(c);
            dfs(t + 1);
            for (int i = 0; i < n; ++i) values[i] -= comp[i] * unit * good[i];
        }
    }
};

} // namespace

OracleResult solve_grid(const Instance& instance, Exponent p, double step) {
    if (step != 0.25 && step != 0.125)
        fail(Errc::invalid_argument, "solve_grid: step must be 1/4 or 1/8");
    const int n = instance.agents();
    const long goods = instance.goods();
    if (n > 3 || goods > 5)
        fail(Errc::size, "solve_grid: instance too large (n=" + std::to_string(n) +
                             ", T=" + std::to_string(goods) + "; limits are n <= 3, T <= 5)");
    if (goods == 0) fail(Errc::invalid_argument, "solve_grid: instance has no goods");

    GridSearch search{instance, p, static_cast<int>(std::lround(1.0 / step)), n, goods,
                      std::vector<int>(goods), {}, {}, std::vector<double>(n, 0.0),
                      std::vector<double>(n, 0.0)};
    std::vector<int> cur(n, 0);
    // Only exact full assignments are enumerated: the objective is monotone in
    // every fraction, so any partial assignment is dominated by topping it up.
    search.build_compositions(cur, 0, search.units);
    search.dfs(0);

    Allocation allocation = Allocation::zeros(n, goods);
    const double unit = 1.0 / search.units;
    std::vector<double> row(n);
    for (long t = 0; t < goods; ++t) {
        const auto& comp = search.compositions[search.best_choice[t]];
        for (int i = 0; i < n; ++i) row[i] = comp[i] * unit;
        allocation.set_good(t, row);
    }
    OracleResult result{std::move(allocation), search.best, OracleMethod::grid_bruteforce,
                        n * static_cast<double>(goods) * step, search.leaves};
    return result;
}

Allocation shift_allocation(const Allocation& hat, int agents) {
    if (agents != hat.agents()) fail(Errc::dimension, "shift_allocation: agent count mismatch");
    const int n = hat.agents();
    const long goods = hat.goods();
    Allocation out = Allocation::zeros(n, goods);
    const double base = 0.5 / n;
    std::vector<double> row(n);
    for (long t = 0; t < goods; ++t) {
        const auto h = hat.good(t);
        for (int i = 0; i < n; ++i) row[i] = base + 0.5 * h[i];
        out.set_good(t, row);
    }
    return out;
}

} // namespace pmean
