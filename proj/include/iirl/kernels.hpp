#pragma once

#include <utility>
#include <vector>

#include "iirl/matrix.hpp"
#include "iirl/mdp.hpp"

// Data-parallel inner loops shared by the solvers. Every kernel writes
// each output element from exactly one thread with a serial inner loop,
// so results are bit-identical for any thread count. The iirl::kernels::serial
// namespace keeps plain-loop twins used as reference implementations by
// the tests and the benchmark target.

namespace iirl::kernels {

struct FollowerQResult {
    Matrix q;  // n_states x n_a2
    int iterations = 0;
};

void marginalize_into(const TwoAgentMdp& mdp, const Matrix& pi1_probs, Vec& out);

void joint_transition_into(const TwoAgentMdp& mdp, const Matrix& pi1_probs,
                           const Matrix& pi2_probs, Matrix& out);

/// Synchronous value iteration for the follower MDP defined by a marginal
/// kernel. Stops when the sup-norm change of Q drops to `tol`.
FollowerQResult follower_q_vi(const MarginalKernel& kernel, const Vec& reward, double discount,
                              double tol, long max_iterations);

/// Synchronous value iteration over the product action space. Returns the
/// optimal value and the greedy joint action per state, ties broken by
/// lowest (a, b) index pair.
std::pair<Vec, std::vector<std::pair<int, int>>> joint_value_iteration(const TwoAgentMdp& mdp,
                                                                       double tol,
                                                                       long max_iterations);

double influence_max(const TwoAgentMdp& mdp, Agent agent);

namespace serial {

void marginalize_into(const TwoAgentMdp& mdp, const Matrix& pi1_probs, Vec& out);
void joint_transition_into(const TwoAgentMdp& mdp, const Matrix& pi1_probs,
                           const Matrix& pi2_probs, Matrix& out);
FollowerQResult follower_q_vi(const MarginalKernel& kernel, const Vec& reward, double discount,
                              double tol, long max_iterations);
std::pair<Vec, std::vector<std::pair<int, int>>> joint_value_iteration(const TwoAgentMdp& mdp,
                                                                       double tol,
                                                                       long max_iterations);
double influence_max(const TwoAgentMdp& mdp, Agent agent);

}  // namespace serial

}  // namespace iirl::kernels
