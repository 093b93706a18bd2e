#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "iirl/matrix.hpp"
#include "iirl/mdp.hpp"
#include "iirl/rng.hpp"

namespace iirl {

/// One generated block of |S| constraint rows: the observation it came
/// from and the alternative follower action the rows compare against.
struct RowBlock {
    int episode = 0;
    int action_b = 0;
    CommitmentPolicy pi1;
    ResponsePolicy pi2;
};

/// Stacked linear rows G with the feasible-reward semantics G r >= 0.
struct ConstraintSet {
    int n_states = 0;
    Matrix rows;  // m x n_states
    std::vector<RowBlock> blocks;

    int row_count() const { return rows.rows(); }
    /// min over rows of G r (0 when the set is empty).
    double min_slack(const Vec& r) const;
};

/// Rows of (P_{pi1,pi2} - P_{pi1,b}) (I - gamma P_{pi1,pi2})^-1 for every
/// b in A2. Rows for b equal to pi2(s) everywhere are identically zero
/// and retained. pi2 must be deterministic; the mdp reward is ignored.
ConstraintSet constraints_for(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                              const ResponsePolicy& pi2, int episode = 0);

/// Row-wise concatenation with provenance preserved.
ConstraintSet accumulate(const ConstraintSet& existing, const ConstraintSet& fresh);

/// Draws a uniform[-1,1] objective and solves the feasible-set LP over
/// the reward simplex, resampling the objective whenever the solution is
/// the constant vector (up to `max_resamples` times). Returns a vertex.
/// `probe_count`, when given, receives the number of objectives tried.
Vec sample_feasible_vertex(const ConstraintSet& cs, Rng& rng, int max_resamples = 100,
                           int* probe_count = nullptr);

/// The constructed reward-identifying environment of the ideal-learning
/// analysis: Phi rows are the half-space normals, kernel_b1 is uniform
/// and kernel_b2 = kernel_b1 - Phi.
struct IdealEnvironment {
    Matrix phi;        // N x N
    Matrix kernel_b1;  // N x N, constant 1/N
    Matrix kernel_b2;  // N x N
    Vec target_reward;
    double discount = 0.0;
};

/// Builds the ideal environment for a non-constant target reward.
/// Set `constant_mode` to use the N-half-space line variant instead
/// (required when r_star is constant).
IdealEnvironment build_ideal_environment(const Vec& r_star, double discount,
                                         bool constant_mode = false);

/// Wraps an ideal environment as a TwoAgentMdp with a single (trivial)
/// leader action, so the follower faces exactly kernel_b1 / kernel_b2.
TwoAgentMdp ideal_environment_mdp(const IdealEnvironment& env, const Vec& reward);

using ResponseOracle =
    std::function<ResponsePolicy(const TwoAgentMdp& env, const CommitmentPolicy& pi1)>;

/// Checks whether `candidate_r` is a positive affine transformation of
/// the (hidden) reward the oracle responds with: builds the candidate's
/// ideal environment, queries the oracle once and tests the resulting
/// feasible set against Aff(candidate) by probing.
bool verify_affine_of_true(int n_states, double discount, const Vec& candidate_r,
                           const ResponseOracle& oracle, Rng& rng, int n_probes = 20,
                           double probe_tol = 1e-7);

/// L2 distance of r to the span of {r_star, 1} (the affine hull of the
/// positive affine transformations, sign constraint ignored).
double distance_to_affine_span(const Vec& r, const Vec& r_star);

/// Text dump: one row per line, space-separated decimals, provenance as
/// comment lines.
void export_text(const ConstraintSet& cs, std::ostream& out);

}  // namespace iirl
