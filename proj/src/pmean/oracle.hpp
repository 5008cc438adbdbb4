#pragma once

#include "pmean/types.hpp"
#include "pmean/welfare.hpp"

namespace pmean {

enum class OracleMethod { conditional_gradient, grid_bruteforce, explicit_construction };

const char* oracle_method_name(OracleMethod method);

struct OracleResult {
    Allocation allocation;
    double welfare = 0.0;
    OracleMethod method = OracleMethod::conditional_gradient;
    double gap_estimate = 0.0; // upper bound on the optimality gap; +inf if unknown
    long iterations = 0;
};

// Near-optimal p-mean welfare over { x >= 0, sum_i x_i^t <= 1 } by
// conditional-gradient ascent from the uniform interior point. Stops at a
// duality gap of 1e-6 * welfare or at the iteration budget. For p = -inf the
// smooth proxy p = -50 drives the ascent and the reported welfare is the
// minimum agent value of the returned allocation. budget = 0 returns the
// uniform starting point with gap +inf.
OracleResult solve_concave(const Instance& instance, Exponent p, long budget = 400);

// Exhaustive grid search, feasible only at desk scale (n <= 3, T <= 5,
// step 1/4 or 1/8); larger inputs are refused with a size report. The
// gap_estimate is the Lipschitz bound n*T*step (documented, not certified).
OracleResult solve_grid(const Instance& instance, Exponent p, double step);

// omega_i^t = 1/(2n) + hat_i^t / 2. On a scaled instance every agent's value
// under the result lies in [1/(2n), 1) and the p-mean welfare is at least half
// of the input's.
Allocation shift_allocation(const Allocation& hat, int agents);

} // namespace pmean
