#include "iirl/interactive.hpp"

#include <algorithm>
#include <cmath>

#include "iirl/errors.hpp"
#include "iirl/lp.hpp"

namespace iirl {

CommitmentPolicy random_commitment(const TwoAgentMdp& mdp, Rng& rng) {
    std::vector<int> actions(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) actions[s] = rng.uniform_int(mdp.n_a1);
    return CommitmentPolicy::deterministic(mdp.n_states, mdp.n_a1, actions);
}

std::vector<EpisodeRecord> run_algorithm1(const TwoAgentMdp& mdp_true,
                                          const StartDistribution& start, int episodes,
                                          uint64_t seed) {
    if (episodes < 1) throw ContractError("run_algorithm1: at least one episode");
    mdp_true.validate();
    start.validate(mdp_true.n_states);

    Rng follower_rng = Rng::stream(seed, 1);
    Rng objective_rng = Rng::stream(seed, 3);

    const double vstar = start.expectation(optimal_joint_policy(mdp_true).value);
    Vec r_true_unit = mdp_true.reward;
    {
        const double norm = l1_norm(r_true_unit);
        if (norm > 0.0)
            for (double& v : r_true_unit) v /= norm;
    }

    CommitmentPolicy pi1 = random_commitment(mdp_true, objective_rng);
    ConstraintSet constraints;
    constraints.n_states = mdp_true.n_states;

    std::vector<EpisodeRecord> records;
    records.reserve(episodes);
    for (int t = 1; t <= episodes; ++t) {
        ResponsePolicy pi2 = sample_optimal_response(mdp_true, pi1, follower_rng);
        EpisodeRecord rec;
        rec.index = t;
        rec.pi1 = pi1;
        rec.pi2 = pi2;
        rec.realized_value = start.expectation(joint_value(mdp_true, pi1, pi2));
        rec.regret = vstar - rec.realized_value;

        constraints = accumulate(constraints, constraints_for(mdp_true, pi1, pi2, t));
        // the true reward stays feasible after every observation
        if (constraints.min_slack(r_true_unit) < -1e-9)
            throw Error("run_algorithm1: true reward left the feasible set");

        rec.reward_estimate =
            sample_feasible_vertex(constraints, objective_rng, 100, &rec.feasible_probe_count);
        if (constraints.min_slack(rec.reward_estimate) < -1e-8)
            throw Error("run_algorithm1: sampled reward violates the constraints");
        rec.distance_to_aff = distance_to_affine_span(rec.reward_estimate, mdp_true.reward);

        TwoAgentMdp planning = mdp_true;
        planning.reward = rec.reward_estimate;
        pi1 = optimal_joint_policy(planning).pi1;
        records.push_back(std::move(rec));
    }
    return records;
}

Vec max_margin_baseline(const TwoAgentMdp& mdp_skeleton, const CommitmentPolicy& pi1,
                        const ResponsePolicy& pi2, double lambda) {
    ConstraintSet cs = constraints_for(mdp_skeleton, pi1, pi2);
    const int n = mdp_skeleton.n_states;
    const int n_a2 = mdp_skeleton.n_a2;
    const bool with_slack = n_a2 > 1;

    // variables: r (free, n) | t (free, n, only when |A2| > 1) | u (n)
    const int nt = with_slack ? n : 0;
    LpProblem lp;
    lp.n = n + nt + n;
    lp.nonneg.assign(lp.n, false);
    for (int i = 0; i < n; ++i) lp.nonneg[n + nt + i] = true;  // u >= 0
    lp.c.assign(lp.n, 0.0);
    for (int i = 0; i < nt; ++i) lp.c[n + i] = 1.0;
    for (int i = 0; i < n; ++i) lp.c[n + nt + i] = -lambda;

    std::vector<Vec> rows;
    Vec rhs;
    auto add_row = [&](const Vec& row, double b) {
        rows.push_back(row);
        rhs.push_back(b);
    };

    for (int b = 0; b < n_a2; ++b) {
        for (int s = 0; s < n; ++s) {
            const double* g = cs.rows.row(b * n + s);
            Vec row(lp.n, 0.0);
            std::copy(g, g + n, row.begin());
            add_row(row, 0.0);  // feasibility: G r >= 0
            if (with_slack && b != pi2.action_at(s)) {
                Vec slack_row(lp.n, 0.0);
                std::copy(g, g + n, slack_row.begin());
                slack_row[n + s] = -1.0;  // g.r - t_s >= 0
                add_row(slack_row, 0.0);
            }
        }
    }
    for (int s = 0; s < n; ++s) {
        Vec up(lp.n, 0.0), lo(lp.n, 0.0), u1(lp.n, 0.0), u2(lp.n, 0.0);
        up[s] = -1.0;
        add_row(up, -1.0);  // r_s <= 1
        lo[s] = 1.0;
        add_row(lo, -1.0);  // r_s >= -1
        u1[s] = -1.0;
        u1[n + nt + s] = 1.0;
        add_row(u1, 0.0);  // u_s >= r_s
        u2[s] = 1.0;
        u2[n + nt + s] = 1.0;
        add_row(u2, 0.0);  // u_s >= -r_s
    }

    lp.a = Matrix(static_cast<int>(rows.size()), lp.n, 0.0);
    lp.b = rhs;
    for (size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), lp.a.row(static_cast<int>(i)));

    LpSolution sol = lp_solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw SolverError("max_margin_baseline: LP did not reach an optimum");
    return Vec(sol.x.begin(), sol.x.begin() + n);
}

double regret(const TwoAgentMdp& mdp, const StartDistribution& start,
              const CommitmentPolicy& pi1, const ResponseModel& model, double reference_vstar) {
    ResponsePolicy pi2 = model.respond(mdp, pi1);
    return reference_vstar - start.expectation(joint_value(mdp, pi1, pi2));
}

double brute_force_vstar(const TwoAgentMdp& mdp, const StartDistribution& start,
                         const ResponseModel& model, long enumeration_cap) {
    double count_d = 1.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        count_d *= mdp.n_a1;
        if (count_d > static_cast<double>(enumeration_cap))
            throw CapacityError("brute_force_vstar: enumeration cap exceeded");
    }
    const long count = static_cast<long>(count_d);
    double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(dynamic, 8) reduction(max : best)
    for (long k = 0; k < count; ++k) {
        std::vector<int> actions(mdp.n_states);
        long idx = k;
        for (int s = 0; s < mdp.n_states; ++s) {
            actions[s] = static_cast<int>(idx % mdp.n_a1);
            idx /= mdp.n_a1;
        }
        CommitmentPolicy pi1 = CommitmentPolicy::deterministic(mdp.n_states, mdp.n_a1, actions);
        ResponsePolicy pi2 = model.respond(mdp, pi1);
        best = std::max(best, start.expectation(joint_value(mdp, pi1, pi2)));
    }
    return best;
}

}  // namespace iirl
