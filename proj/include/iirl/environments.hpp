#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iirl/mdp.hpp"

namespace iirl {

/// Grid world in which the leader unlocks two of four doors per step and
/// the follower drives the cart. States are (cell, collected-bitmask).
struct MazeMakerSpec {
    int side = 7;
    std::vector<std::pair<int, double>> rewards;  // (cell, value), distinct cells
    double move_success = 0.8;
    double discount = 0.9;
    bool all_doors_open_debug = false;    // attempted moves ignore the door state
    bool random_move_over_existing = false;  // 0.2 mass over existing neighbours
                                             // instead of 0.05 per direction

    /// The 7x7, three-reward instance (values +1, +2, +3) with the
    /// documented default placement.
    static MazeMakerSpec canonical();
    void validate() const;
};

struct RandomMdpSpec {
    int n_states = 2;
    int n_a1 = 2;
    int n_a2 = 2;
    double dirichlet_alpha = 1.0;
    double beta_a = 2.0;
    double beta_b = 2.0;
    double influence_cap_a1 = 2.0;  // 2 disables the cap
    double influence_cap_a2 = 2.0;
    double discount = 0.9;
    uint64_t seed = 0;

    void validate() const;
};

TwoAgentMdp build_maze_maker(const MazeMakerSpec& spec);

/// Decodes a maze state index into (cell, collected mask).
std::pair<int, int> maze_decode(const MazeMakerSpec& spec, int state);

TwoAgentMdp build_random_mdp(const RandomMdpSpec& spec);

/// Counterexample for response models that weight actions by a strictly
/// increasing function of Q*: at s0 the follower chooses between a branch
/// worth x and a branch through s2 whose worth (y or 0) the leader's
/// action at s2 controls.
TwoAgentMdp build_theorem3_fixture(double x, double y);

/// Counterexample fixture for eps-greedy responses: the chain through s2
/// pays +2 then -(2-delta) when the leader enables it, while the branch
/// to s1 pays +1.
TwoAgentMdp build_lemma3_fixture(double delta);

/// Constant commitment playing `leader_action` in every state.
CommitmentPolicy fixture_commit(const TwoAgentMdp& mdp, int leader_action);

/// The eps-greedy response policy the dominance analysis of the lemma-3
/// fixture evaluates: under the a0 commitment the follower heads to s2
/// and plays the chain; under a1 it heads to s1. Mixed with uniform
/// exploration at rate eps.
ResponsePolicy lemma3_analysis_response(const TwoAgentMdp& fixture, int leader_action,
                                        double eps);

/// Closed forms of the three fixture values (undiscounted chain sums).
struct Lemma3ClosedForm {
    double v_a1_s0 = 0.0;
    double v_a2_s0 = 0.0;
    double v_a1_s2 = 0.0;
};
Lemma3ClosedForm lemma3_closed_form(double eps, double delta);

}  // namespace iirl
