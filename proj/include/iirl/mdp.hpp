#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iirl/matrix.hpp"

namespace iirl {

/// Cooperative two-agent MDP with a dense transition tensor indexed
/// (s, a, b, s'), a state-based joint reward and discount in [0, 1).
/// All operations treat instances as immutable after construction.
struct TwoAgentMdp {
    int n_states = 0;
    int n_a1 = 0;
    int n_a2 = 0;
    Vec transition;  // row-major (s, a, b, s')
    Vec reward;      // length n_states
    double discount = 0.0;

    size_t idx(int s, int a, int b) const {
        return ((static_cast<size_t>(s) * n_a1 + a) * n_a2 + b) * n_states;
    }
    double p(int s, int a, int b, int s2) const { return transition[idx(s, a, b) + s2]; }
    std::span<const double> next_dist(int s, int a, int b) const {
        return {transition.data() + idx(s, a, b), static_cast<size_t>(n_states)};
    }

    /// Checks shapes, row-stochasticity (1e-12) and discount < 1.
    /// Throws ShapeError / ContractError.
    void validate() const;
};

/// Leader policy: rows are distributions over A1 actions per state.
struct CommitmentPolicy {
    Matrix probs;  // n_states x n_a1

    static CommitmentPolicy deterministic(int n_states, int n_a1, const std::vector<int>& actions);
    static CommitmentPolicy uniform(int n_states, int n_a1);
    void validate(int n_states, int n_a1) const;
    /// Action of a deterministic policy at s; ContractError if stochastic.
    int action_at(int s) const;
};

/// Follower policy: rows are distributions over A2 actions per state.
struct ResponsePolicy {
    Matrix probs;  // n_states x n_a2

    static ResponsePolicy deterministic(int n_states, int n_a2, const std::vector<int>& actions);
    static ResponsePolicy uniform(int n_states, int n_a2);
    void validate(int n_states, int n_a2) const;
    bool is_deterministic(double tol = 1e-12) const;
    int action_at(int s) const;
};

/// Single-agent transition function the follower faces once the leader
/// has committed: kernel(s, b, s') = E_{a~pi1}[P(s'|s,a,b)].
struct MarginalKernel {
    int n_states = 0;
    int n_a2 = 0;
    Vec kernel;  // row-major (s, b, s')

    size_t idx(int s, int b) const { return (static_cast<size_t>(s) * n_a2 + b) * n_states; }
    std::span<const double> next_dist(int s, int b) const {
        return {kernel.data() + idx(s, b), static_cast<size_t>(n_states)};
    }
    void validate() const;
};

/// One interaction rollout: ordered (state, a1, a2) triples.
struct Trajectory {
    struct Step {
        int state;
        int a1;
        int a2;
    };
    std::vector<Step> steps;

    void validate(const TwoAgentMdp& mdp) const;
};

struct StartDistribution {
    Vec probs;

    static StartDistribution uniform(int n_states);
    static StartDistribution point(int n_states, int s);
    void validate(int n_states) const;
    double expectation(const Vec& values) const;
};

enum class Agent { Leader, Follower };

// --- Core computations ------------------------------------------------

MarginalKernel marginalize(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1);

/// S x S one-step matrix under the joint policy (pi1, pi2).
Matrix joint_transition(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                        const ResponsePolicy& pi2);

/// Unique solution of (I - gamma P_{pi1,pi2}) V = r via a dense solve.
Vec joint_value(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1, const ResponsePolicy& pi2);

/// Q(s,a,b) = r(s) + gamma * sum_s' P(s'|s,a,b) V(s'), V = joint_value.
Vec joint_q(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1, const ResponsePolicy& pi2);

/// Optimal follower Q over A2 in the single-agent MDP (S, A2, P_pi1, r, gamma),
/// by value iteration to sup-norm tolerance 1e-10.
Matrix follower_optimal_q(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1);

/// Same computation from a precomputed kernel and an arbitrary reward.
Matrix follower_optimal_q(const MarginalKernel& kernel, const Vec& reward, double discount);

/// Max over states and same-side action pairs of the L1 distance between
/// next-state distributions; lies in [0, 2].
double influence(const TwoAgentMdp& mdp, Agent agent);

// --- Serialization ----------------------------------------------------

std::string mdp_to_json(const TwoAgentMdp& mdp);
TwoAgentMdp mdp_from_json(const std::string& text);
void save_mdp(const TwoAgentMdp& mdp, const std::string& path);
TwoAgentMdp load_mdp(const std::string& path);

}  // namespace iirl
