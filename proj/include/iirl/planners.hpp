#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iirl/mdp.hpp"
#include "iirl/rng.hpp"

namespace iirl {

/// Behavioural model of the follower. Ties inside an argmax are always
/// resolved uniformly over the argmax set (tolerance 1e-9).
struct ResponseModel {
    enum class Kind { Optimal, Boltzmann, EpsGreedy };
    Kind kind = Kind::Optimal;
    double beta = 0.0;     // Boltzmann inverse temperature, >= 0
    double epsilon = 0.0;  // EpsGreedy mixing weight, in [0, 1]

    static ResponseModel optimal() { return {Kind::Optimal, 0.0, 0.0}; }
    static ResponseModel boltzmann(double beta);
    static ResponseModel eps_greedy(double epsilon);

    /// The follower's stochastic response to a commitment under this model.
    ResponsePolicy respond(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1) const;

    static ResponseModel from_json(const std::string& text);
    std::string to_json() const;
};

/// Output of the approximate value-iteration planners: the commitment
/// policy, the leader's value V and the follower-belief value Vhat.
struct PlanResult {
    CommitmentPolicy pi1;
    Vec predicted_value;
    Vec follower_belief_value;

    std::string to_json() const;
};

struct JointPlan {
    CommitmentPolicy pi1;
    ResponsePolicy pi2;
    Vec value;
};

/// Optimal joint policy by value iteration over the product action space
/// (tolerance 1e-10), joint-action ties broken by lowest (a, b) pair.
JointPlan optimal_joint_policy(const TwoAgentMdp& mdp);

/// Per-state argmax sets of the follower's optimal Q (tolerance 1e-9).
std::vector<std::vector<int>> optimal_response_set(const TwoAgentMdp& mdp,
                                                   const CommitmentPolicy& pi1,
                                                   double tol = 1e-9);

/// Optimal response as a stochastic policy, uniform over each argmax set.
ResponsePolicy optimal_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1);

/// One deterministic optimal response, drawn uniformly from the argmax
/// set of every state (the tie-breaking the no-regret analysis assumes).
ResponsePolicy sample_optimal_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                                       Rng& rng);

/// Per-state softmax of beta * Q*, computed with max subtraction.
ResponsePolicy boltzmann_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                                  double beta);

/// (1 - eps) * optimal_response + eps * uniform.
ResponsePolicy eps_greedy_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                                   double epsilon);

struct AviOptions {
    double tol = 1e-8;
    long max_sweeps = 100000;
    bool belief_max_backup = false;  // Vhat backup: softmax-expected (default) or max
};

/// Approximate value iteration against a Boltzmann-rational follower.
/// Tracks the leader value V and the follower-belief value Vhat.
PlanResult avi_boltzmann(const TwoAgentMdp& mdp, double beta, const AviOptions& opts = {});

/// Approximate value iteration against an eps-greedy follower, planning
/// with the blended kernel P_eps.
PlanResult avi_eps_greedy(const TwoAgentMdp& mdp, double epsilon, const AviOptions& opts = {});

/// Enumerates all deterministic commitment policies (capped) and returns
/// one whose value vector dominates every other elementwise within 1e-9,
/// or nothing when no such policy exists.
std::optional<CommitmentPolicy> dominating_policy_check(const TwoAgentMdp& mdp,
                                                        const ResponseModel& model,
                                                        long enumeration_cap = 1000000);

}  // namespace iirl
