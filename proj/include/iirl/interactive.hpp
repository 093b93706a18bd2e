#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "iirl/feasible.hpp"
#include "iirl/mdp.hpp"
#include "iirl/planners.hpp"
#include "iirl/rng.hpp"

namespace iirl {

/// One interaction round. The inference fields describe the estimate
/// produced after observing this episode (it drives the next commitment);
/// they stay NaN/empty where a pipeline does not produce them.
struct EpisodeRecord {
    int index = 0;
    CommitmentPolicy pi1;
    ResponsePolicy pi2;                   // full-information observation
    std::optional<Trajectory> trajectory; // partial-information observation
    Vec reward_estimate;
    double realized_value = 0.0;
    double regret = std::numeric_limits<double>::quiet_NaN();
    int feasible_probe_count = 0;
    double distance_to_aff = std::numeric_limits<double>::quiet_NaN();
    double posterior_mean_beta = std::numeric_limits<double>::quiet_NaN();
    double reward_l1_error = std::numeric_limits<double>::quiet_NaN();
    double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Full-information episode loop against an optimally responding
/// follower: observe the response, stack the feasibility constraints,
/// sample a feasible reward vertex and commit the leader's part of the
/// optimal joint policy under it. The true reward only feeds the
/// follower and the regret bookkeeping.
std::vector<EpisodeRecord> run_algorithm1(const TwoAgentMdp& mdp_true,
                                          const StartDistribution& start, int episodes,
                                          uint64_t seed);

/// Single-environment maximum-margin reward recovery from one observed
/// (pi1, pi2) pair: maximizes the summed minimum constraint slack minus
/// lambda * |r|_1 subject to the feasibility rows and |r(s)| <= 1.
Vec max_margin_baseline(const TwoAgentMdp& mdp_skeleton, const CommitmentPolicy& pi1,
                        const ResponsePolicy& pi2, double lambda = 1.0);

/// Per-episode regret: reference_vstar minus the start-weighted value of
/// committing pi1 against the model's response.
double regret(const TwoAgentMdp& mdp, const StartDistribution& start,
              const CommitmentPolicy& pi1, const ResponseModel& model, double reference_vstar);

/// Brute-force optimal commitment value at a start distribution, by
/// enumeration over deterministic commitments (capped).
double brute_force_vstar(const TwoAgentMdp& mdp, const StartDistribution& start,
                         const ResponseModel& model, long enumeration_cap = 1000000);

/// Uniformly random deterministic commitment.
CommitmentPolicy random_commitment(const TwoAgentMdp& mdp, Rng& rng);

}  // namespace iirl
