#pragma once

#include <vector>

#include "iirl/matrix.hpp"

namespace iirl {

/// Dense linear program:
///   maximize c.x  subject to  A x >= b,  E x = d,  and x_i >= 0 for
/// every variable with nonneg[i] (default true; others are free).
struct LpProblem {
    int n = 0;  // number of variables
    Vec c;
    Matrix a;  // inequality rows, a x >= b
    Vec b;
    Matrix e;  // equality rows, e x = d
    Vec d;
    std::vector<bool> nonneg;  // size n; empty means all nonnegative

    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double objective_value = 0.0;
    bool is_vertex = false;
    Vec dual_ineq;  // one multiplier per inequality row (Optimal only)
    Vec dual_eq;    // one multiplier per equality row (Optimal only)
};

/// Two-phase dense simplex with Bland's rule. Returns a vertex solution
/// when Optimal; feasibility tolerance 1e-9. Set `verbose` to dump
/// tableau progress for debugging.
LpSolution lp_solve(const LpProblem& problem, bool verbose = false);

/// Phase-one only: true iff a feasible point exists within tolerance.
bool lp_feasible(const LpProblem& problem);

}  // namespace iirl
