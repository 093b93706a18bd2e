#include "iirl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "iirl/errors.hpp"
#include "iirl/rng.hpp"

namespace iirl {

namespace {

// Fixture discount: close enough to one that the undiscounted chain sums
// of the counterexample analyses come out exactly (all fixture states are
// absorbing within a few steps, so value iteration still terminates).
constexpr double kFixtureDiscount = 1.0 - 5e-13;

// N, E, S, W
constexpr int kRowDelta[4] = {-1, 0, 1, 0};
constexpr int kColDelta[4] = {0, 1, 0, -1};
// unordered door pairs in lexicographic order
constexpr int kDoorPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

}  // namespace

MazeMakerSpec MazeMakerSpec::canonical() {
    MazeMakerSpec spec;
    spec.side = 7;
    spec.rewards = {{8, 1.0}, {24, 2.0}, {40, 3.0}};
    return spec;
}

void MazeMakerSpec::validate() const {
    if (side < 2) throw ContractError("MazeMakerSpec: side must be at least 2");
    if (rewards.empty() || rewards.size() > 8)
        throw ContractError("MazeMakerSpec: between 1 and 8 reward cells");
    std::set<int> cells;
    for (auto [cell, value] : rewards) {
        if (cell < 0 || cell >= side * side)
            throw ContractError("MazeMakerSpec: reward cell outside the grid");
        if (!cells.insert(cell).second)
            throw ContractError("MazeMakerSpec: reward cells must be distinct");
        (void)value;
    }
    if (!(move_success > 0.0 && move_success <= 1.0))
        throw ContractError("MazeMakerSpec: move success probability in (0, 1]");
    if (!(discount >= 0.0 && discount < 1.0))
        throw ContractError("MazeMakerSpec: discount must lie in [0, 1)");
}

std::pair<int, int> maze_decode(const MazeMakerSpec& spec, int state) {
    const int n_masks = 1 << spec.rewards.size();
    return {state / n_masks, state % n_masks};
}

TwoAgentMdp build_maze_maker(const MazeMakerSpec& spec) {
    spec.validate();
    const int side = spec.side;
    const int n_cells = side * side;
    const int k = static_cast<int>(spec.rewards.size());
    const int n_masks = 1 << k;
    const int n = n_cells * n_masks;

    auto reward_bit = [&](int cell) {
        for (int i = 0; i < k; ++i)
            if (spec.rewards[i].first == cell) return i;
        return -1;
    };
    auto encode = [&](int cell, int mask) { return cell * n_masks + mask; };
    auto neighbour = [&](int cell, int dir) -> int {
        const int row = cell / side + kRowDelta[dir];
        const int col = cell % side + kColDelta[dir];
        if (row < 0 || row >= side || col < 0 || col >= side) return -1;
        return row * side + col;
    };

    TwoAgentMdp mdp;
    mdp.n_states = n;
    mdp.n_a1 = 6;
    mdp.n_a2 = 4;
    mdp.discount = spec.discount;
    mdp.reward.assign(n, 0.0);
    for (int cell = 0; cell < n_cells; ++cell) {
        const int bit = reward_bit(cell);
        if (bit < 0) continue;
        for (int mask = 0; mask < n_masks; ++mask)
            if (mask & (1 << bit)) mdp.reward[encode(cell, mask)] = spec.rewards[bit].second;
    }

    mdp.transition.assign(static_cast<size_t>(n) * 6 * 4 * n, 0.0);
    const double p_hit = spec.move_success;
    const double p_rand = 1.0 - spec.move_success;

    for (int cell = 0; cell < n_cells; ++cell) {
        for (int mask = 0; mask < n_masks; ++mask) {
            const int s = encode(cell, mask);
            for (int a = 0; a < 6; ++a) {
                const bool unlocked[4] = {
                    spec.all_doors_open_debug || kDoorPairs[a][0] == 0 || kDoorPairs[a][1] == 0,
                    spec.all_doors_open_debug || kDoorPairs[a][0] == 1 || kDoorPairs[a][1] == 1,
                    spec.all_doors_open_debug || kDoorPairs[a][0] == 2 || kDoorPairs[a][1] == 2,
                    spec.all_doors_open_debug || kDoorPairs[a][0] == 3 || kDoorPairs[a][1] == 3,
                };
                for (int b = 0; b < 4; ++b) {
                    double* row = mdp.transition.data() + mdp.idx(s, a, b);
                    auto land = [&](int target_cell, double prob) {
                        if (prob <= 0.0) return;
                        int m2 = mask;
                        const int bit = reward_bit(target_cell);
                        if (bit >= 0) m2 |= 1 << bit;
                        row[encode(target_cell, m2)] += prob;
                    };
                    const int target = neighbour(cell, b);
                    if (target < 0 || !unlocked[b]) {
                        // locked door or wall: the cart stays where it was
                        row[s] += 1.0;
                        continue;
                    }
                    land(target, p_hit);
                    if (spec.random_move_over_existing) {
                        int existing = 0;
                        for (int d = 0; d < 4; ++d)
                            if (neighbour(cell, d) >= 0) ++existing;
                        for (int d = 0; d < 4; ++d) {
                            const int t = neighbour(cell, d);
                            if (t >= 0) land(t, p_rand / existing);
                        }
                    } else {
                        // p_rand split over the four compass directions,
                        // walls return their share to "stay"
                        for (int d = 0; d < 4; ++d) {
                            const int t = neighbour(cell, d);
                            if (t >= 0)
                                land(t, p_rand / 4.0);
                            else
                                row[s] += p_rand / 4.0;
                        }
                    }
                }
            }
        }
    }
    mdp.validate();
    return mdp;
}

void RandomMdpSpec::validate() const {
    if (n_states < 2) throw ContractError("RandomMdpSpec: at least two states");
    if (n_a1 < 1 || n_a2 < 1) throw ContractError("RandomMdpSpec: actions must be positive");
    if (dirichlet_alpha <= 0.0) throw ContractError("RandomMdpSpec: concentration must be positive");
    if (beta_a <= 0.0 || beta_b <= 0.0) throw ContractError("RandomMdpSpec: Beta parameters positive");
    if (influence_cap_a1 < 0.0 || influence_cap_a2 < 0.0)
        throw ContractError("RandomMdpSpec: influence caps must be nonnegative");
    if (!(discount >= 0.0 && discount < 1.0))
        throw ContractError("RandomMdpSpec: discount must lie in [0, 1)");
}

TwoAgentMdp build_random_mdp(const RandomMdpSpec& spec) {
    spec.validate();
    Rng rng = Rng::stream(spec.seed, 0);  // environment stream

    TwoAgentMdp mdp;
    mdp.n_states = spec.n_states;
    mdp.n_a1 = spec.n_a1;
    mdp.n_a2 = spec.n_a2;
    mdp.discount = spec.discount;
    mdp.transition.assign(
        static_cast<size_t>(spec.n_states) * spec.n_a1 * spec.n_a2 * spec.n_states, 0.0);
    for (int s = 0; s < spec.n_states; ++s)
        for (int a = 0; a < spec.n_a1; ++a)
            for (int b = 0; b < spec.n_a2; ++b)
                rng.dirichlet(spec.dirichlet_alpha,
                              {mdp.transition.data() + mdp.idx(s, a, b),
                               static_cast<size_t>(spec.n_states)});

    mdp.reward.assign(spec.n_states, 0.0);
    for (int s = 0; s < spec.n_states; ++s) mdp.reward[s] = rng.beta(spec.beta_a, spec.beta_b);

    // Influence caps: mix every row of a state toward the action-averaged
    // row for the capped agent. Mixing with a single factor scales the
    // agent's L1 influence linearly and never increases the other's.
    auto cap_agent = [&](Agent agent, double cap) {
        const double current = influence(mdp, agent);
        if (current <= cap || current <= 0.0) return;
        const double f = cap / current;
        const int n = spec.n_states;
        if (agent == Agent::Leader) {
            for (int s = 0; s < n; ++s) {
                for (int b = 0; b < spec.n_a2; ++b) {
                    Vec base(n, 0.0);
                    for (int a = 0; a < spec.n_a1; ++a) {
                        const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                        for (int t = 0; t < n; ++t) base[t] += p[t] / spec.n_a1;
                    }
                    for (int a = 0; a < spec.n_a1; ++a) {
                        double* p = mdp.transition.data() + mdp.idx(s, a, b);
                        for (int t = 0; t < n; ++t) p[t] = f * p[t] + (1.0 - f) * base[t];
                    }
                }
            }
        } else {
            for (int s = 0; s < n; ++s) {
                for (int a = 0; a < spec.n_a1; ++a) {
                    Vec base(n, 0.0);
                    for (int b = 0; b < spec.n_a2; ++b) {
                        const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                        for (int t = 0; t < n; ++t) base[t] += p[t] / spec.n_a2;
                    }
                    for (int b = 0; b < spec.n_a2; ++b) {
                        double* p = mdp.transition.data() + mdp.idx(s, a, b);
                        for (int t = 0; t < n; ++t) p[t] = f * p[t] + (1.0 - f) * base[t];
                    }
                }
            }
        }
    };
    cap_agent(Agent::Leader, spec.influence_cap_a1);
    cap_agent(Agent::Follower, spec.influence_cap_a2);

    mdp.validate();
    return mdp;
}

namespace {

// Shared skeleton of the two counterexample fixtures: six states where
// s5 is the absorbing terminal and only s2's outgoing transitions depend
// on the leader. Rewards are pre-divided by discount powers so values at
// s0 equal the plain chain sums.
TwoAgentMdp fixture_skeleton() {
    TwoAgentMdp mdp;
    mdp.n_states = 6;
    mdp.n_a1 = 2;
    mdp.n_a2 = 2;
    mdp.discount = kFixtureDiscount;
    mdp.reward.assign(6, 0.0);
    mdp.transition.assign(static_cast<size_t>(6) * 2 * 2 * 6, 0.0);
    return mdp;
}

void set_all_actions(TwoAgentMdp& mdp, int s, int target) {
    for (int a = 0; a < mdp.n_a1; ++a)
        for (int b = 0; b < mdp.n_a2; ++b) mdp.transition[mdp.idx(s, a, b) + target] = 1.0;
}

}  // namespace

TwoAgentMdp build_theorem3_fixture(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw ContractError("build_theorem3_fixture: x and y must be positive");
    TwoAgentMdp mdp = fixture_skeleton();
    const double g = mdp.discount;
    mdp.reward[1] = x / g;
    mdp.reward[3] = y / (g * g);

    // s0: follower picks the branch; s2: the leader picks the continuation
    for (int a = 0; a < 2; ++a) {
        mdp.transition[mdp.idx(0, a, 0) + 1] = 1.0;  // b0 -> s1 (worth x)
        mdp.transition[mdp.idx(0, a, 1) + 2] = 1.0;  // b1 -> s2
    }
    set_all_actions(mdp, 1, 5);
    for (int b = 0; b < 2; ++b) {
        mdp.transition[mdp.idx(2, 0, b) + 3] = 1.0;  // a0 enables the y continuation
        mdp.transition[mdp.idx(2, 1, b) + 4] = 1.0;  // a1 leads to nothing
    }
    set_all_actions(mdp, 3, 5);
    set_all_actions(mdp, 4, 5);
    set_all_actions(mdp, 5, 5);
    mdp.validate();
    return mdp;
}

TwoAgentMdp build_lemma3_fixture(double delta) {
    if (!(delta > 0.0 && delta < 2.0))
        throw ContractError("build_lemma3_fixture: delta must lie in (0, 2)");
    TwoAgentMdp mdp = fixture_skeleton();
    const double g = mdp.discount;
    mdp.reward[1] = 1.0 / g;
    mdp.reward[3] = 2.0 / (g * g);
    mdp.reward[4] = -(2.0 - delta) / (g * g * g);

    for (int a = 0; a < 2; ++a) {
        mdp.transition[mdp.idx(0, a, 0) + 1] = 1.0;  // b0 -> s1 (+1)
        mdp.transition[mdp.idx(0, a, 1) + 2] = 1.0;  // b1 -> s2
    }
    set_all_actions(mdp, 1, 5);
    // s2 under a0: the follower chooses the +2 / -(2-delta) chain or nothing;
    // under a1 both follower actions lead to nothing
    mdp.transition[mdp.idx(2, 0, 0) + 3] = 1.0;
    mdp.transition[mdp.idx(2, 0, 1) + 5] = 1.0;
    mdp.transition[mdp.idx(2, 1, 0) + 5] = 1.0;
    mdp.transition[mdp.idx(2, 1, 1) + 5] = 1.0;
    set_all_actions(mdp, 3, 4);  // the chain is forced: +2 then -(2-delta)
    set_all_actions(mdp, 4, 5);
    set_all_actions(mdp, 5, 5);
    mdp.validate();
    return mdp;
}

CommitmentPolicy fixture_commit(const TwoAgentMdp& mdp, int leader_action) {
    return CommitmentPolicy::deterministic(mdp.n_states, mdp.n_a1,
                                           std::vector<int>(mdp.n_states, leader_action));
}

ResponsePolicy lemma3_analysis_response(const TwoAgentMdp& fixture, int leader_action,
                                        double eps) {
    if (fixture.n_states != 6 || fixture.n_a2 != 2)
        throw ShapeError("lemma3_analysis_response: not a lemma-3 fixture");
    if (eps < 0.0 || eps > 1.0) throw ContractError("lemma3_analysis_response: eps in [0,1]");
    // Base response the analysis evaluates: into the chain (b1 at s0,
    // b0 at s2) when the leader enables it, to s1 otherwise.
    std::vector<int> base(6, 0);
    if (leader_action == 0) base[0] = 1;
    ResponsePolicy pi = ResponsePolicy::deterministic(6, 2, base);
    for (int s = 0; s < 6; ++s)
        for (int b = 0; b < 2; ++b) pi.probs(s, b) = (1.0 - eps) * pi.probs(s, b) + eps / 2.0;
    return pi;
}

Lemma3ClosedForm lemma3_closed_form(double eps, double delta) {
    const double q = 1.0 - eps / 2.0;
    Lemma3ClosedForm out;
    out.v_a1_s2 = delta * q;           // 2(1-eps/2) - (2-delta)(1-eps/2)
    out.v_a1_s0 = delta * q * q + eps / 2.0;
    out.v_a2_s0 = q;
    return out;
}

}  // namespace iirl
