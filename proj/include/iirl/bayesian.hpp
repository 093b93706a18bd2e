#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "iirl/interactive.hpp"
#include "iirl/mdp.hpp"
#include "iirl/planners.hpp"
#include "iirl/rng.hpp"

namespace iirl {

/// Metropolis-Hastings tuning. The proposal on rewards is a simplex walk
/// on the delta-grid: an ordered coordinate pair chosen uniformly among
/// all pairs, moving delta of mass; a pair whose source coordinate holds
/// less than delta proposes no move, which keeps the walk symmetric.
struct MhConfig {
    double delta = 0.0;              // grid step; 0 means 1 / (10 n_states)
    double beta_prior_rate = 0.1;    // exponential prior on beta (mean 10)
    double beta_proposal_shape = 20.0;  // Gamma proposal, mean at current beta
    bool propose_beta = true;
    bool belief_max_backup = false;  // forwarded to the Boltzmann planner

    double grid_step(int n_states) const {
        return delta > 0.0 ? delta : 1.0 / (10.0 * n_states);
    }
};

/// One MCMC chain state on the discretized reward simplex.
struct PosteriorState {
    Vec r;
    double beta = 0.0;
    double log_score = 0.0;  // log of the acceptance quantity p
};

/// Observed (commitment, trajectory) pairs with precomputed marginal
/// kernels, plus a chain-local cache of follower Q tables keyed by
/// (episode, grid point). The cache makes beta-only moves cheap.
class ObservationLog {
  public:
    void add(const TwoAgentMdp& skeleton, const CommitmentPolicy& pi1, Trajectory tau);
    int size() const { return static_cast<int>(trajectories_.size()); }
    const Trajectory& trajectory(int i) const { return trajectories_[i]; }
    const CommitmentPolicy& commitment(int i) const { return commitments_[i]; }

    /// Sum of exact trajectory log-likelihoods over all observations.
    double log_likelihood(const Vec& r, double beta, double grid_step) const;
    void clear_cache() const { cache_.clear(); }

  private:
    std::vector<CommitmentPolicy> commitments_;
    std::vector<MarginalKernel> kernels_;
    std::vector<Trajectory> trajectories_;
    double discount_ = 0.0;
    int n_a2_ = 0;
    mutable std::unordered_map<std::string, Matrix> cache_;

    const Matrix& follower_q(int episode, const Vec& r, double grid_step) const;
};

/// Exact log-probability of the follower actions along tau under the
/// Boltzmann model with reward r: includes the per-state log-partition
/// terms, which depend on (r, beta) and must not be dropped.
double trajectory_log_likelihood(const TwoAgentMdp& mdp_skeleton, const CommitmentPolicy& pi1,
                                 const Trajectory& tau, const Vec& r, double beta);

/// One Metropolis-Hastings step: simplex-walk proposal on r, Gamma
/// proposal on beta, acceptance with min{1, p'/p} where p divides the
/// posterior numerator by the Gamma proposal density. `accepted`, when
/// given, reports whether the proposal was taken.
PosteriorState mh_step(const PosteriorState& state, const ObservationLog& log,
                       const MhConfig& config, Rng& rng, bool* accepted = nullptr);

/// Draws the initial chain state from the priors: uniform over the
/// delta-grid and exponential over beta.
PosteriorState initial_posterior_state(int n_states, const ObservationLog& log,
                                       const MhConfig& config, Rng& rng);

/// Bayesian interactive IRL: per episode commit, observe one trajectory
/// of geometric length (minimum two steps), run K sampler steps carrying
/// the chain across episodes, and plan the next commitment from the
/// posterior means via the Boltzmann planner. `non_interactive` freezes
/// the commitment at the initial policy. `reference_vstar` (when finite)
/// enables the regret column.
std::vector<EpisodeRecord> run_algorithm2(const TwoAgentMdp& mdp_true,
                                          const StartDistribution& start, int episodes,
                                          int samples_per_episode, const MhConfig& config,
                                          double true_beta, uint64_t seed,
                                          bool non_interactive = false,
                                          double reference_vstar =
                                              std::numeric_limits<double>::quiet_NaN());

}  // namespace iirl
