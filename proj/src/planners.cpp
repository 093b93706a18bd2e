#include "iirl/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "iirl/errors.hpp"
#include "iirl/kernels.hpp"

namespace iirl {

namespace {

constexpr double kViTol = 1e-10;
constexpr long kViMaxIterations = 1000000;
constexpr double kArgmaxTol = 1e-9;
constexpr double kDominanceTol = 1e-9;

std::vector<int> argmax_set(const double* q, int n, double tol) {
    double best = q[0];
    for (int i = 1; i < n; ++i) best = std::max(best, q[i]);
    std::vector<int> set;
    for (int i = 0; i < n; ++i)
        if (q[i] >= best - tol) set.push_back(i);
    return set;
}

CommitmentPolicy candidate_policy(const TwoAgentMdp& mdp, long index) {
    std::vector<int> actions(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) {
        actions[s] = static_cast<int>(index % mdp.n_a1);
        index /= mdp.n_a1;
    }
    return CommitmentPolicy::deterministic(mdp.n_states, mdp.n_a1, actions);
}

}  // namespace

ResponseModel ResponseModel::boltzmann(double beta) {
    if (beta < 0.0) throw ContractError("ResponseModel: beta must be nonnegative");
    return {Kind::Boltzmann, beta, 0.0};
}

ResponseModel ResponseModel::eps_greedy(double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ContractError("ResponseModel: epsilon in [0,1]");
    return {Kind::EpsGreedy, 0.0, epsilon};
}

ResponsePolicy ResponseModel::respond(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1) const {
    switch (kind) {
        case Kind::Optimal:
            return optimal_response(mdp, pi1);
        case Kind::Boltzmann:
            return boltzmann_response(mdp, pi1, beta);
        case Kind::EpsGreedy:
            return eps_greedy_response(mdp, pi1, epsilon);
    }
    throw ContractError("ResponseModel: unknown kind");
}

ResponseModel ResponseModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string name = j.at("model").get<std::string>();
    if (name == "optimal") return optimal();
    if (name == "boltzmann") return boltzmann(j.at("beta").get<double>());
    if (name == "eps_greedy") return eps_greedy(j.at("epsilon").get<double>());
    throw ContractError("ResponseModel: unknown model name " + name);
}

std::string ResponseModel::to_json() const {
    nlohmann::json j;
    switch (kind) {
        case Kind::Optimal:
            j["model"] = "optimal";
            break;
        case Kind::Boltzmann:
            j["model"] = "boltzmann";
            j["beta"] = beta;
            break;
        case Kind::EpsGreedy:
            j["model"] = "eps_greedy";
            j["epsilon"] = epsilon;
            break;
    }
    return j.dump();
}

std::string PlanResult::to_json() const {
    nlohmann::json j;
    std::vector<Vec> rows;
    for (int s = 0; s < pi1.probs.rows(); ++s)
        rows.emplace_back(pi1.probs.row(s), pi1.probs.row(s) + pi1.probs.cols());
    j["pi1"] = rows;
    j["predicted_value"] = predicted_value;
    j["follower_belief_value"] = follower_belief_value;
    return j.dump(2);
}

JointPlan optimal_joint_policy(const TwoAgentMdp& mdp) {
    mdp.validate();
    auto [value, joint] = kernels::joint_value_iteration(mdp, kViTol, kViMaxIterations);
    std::vector<int> a1(mdp.n_states), a2(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) {
        a1[s] = joint[s].first;
        a2[s] = joint[s].second;
    }
    return {CommitmentPolicy::deterministic(mdp.n_states, mdp.n_a1, a1),
            ResponsePolicy::deterministic(mdp.n_states, mdp.n_a2, a2), std::move(value)};
}

std::vector<std::vector<int>> optimal_response_set(const TwoAgentMdp& mdp,
                                                   const CommitmentPolicy& pi1, double tol) {
    Matrix q = follower_optimal_q(mdp, pi1);
    std::vector<std::vector<int>> sets(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) sets[s] = argmax_set(q.row(s), mdp.n_a2, tol);
    return sets;
}

ResponsePolicy optimal_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1) {
    auto sets = optimal_response_set(mdp, pi1, kArgmaxTol);
    ResponsePolicy pi;
    pi.probs = Matrix(mdp.n_states, mdp.n_a2, 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
        const double w = 1.0 / sets[s].size();
        for (int b : sets[s]) pi.probs(s, b) = w;
    }
    return pi;
}

ResponsePolicy sample_optimal_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                                       Rng& rng) {
    auto sets = optimal_response_set(mdp, pi1, kArgmaxTol);
    std::vector<int> actions(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        actions[s] = sets[s][rng.uniform_int(static_cast<int>(sets[s].size()))];
    return ResponsePolicy::deterministic(mdp.n_states, mdp.n_a2, actions);
}

ResponsePolicy boltzmann_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                                  double beta) {
    if (beta < 0.0) throw ContractError("boltzmann_response: beta must be nonnegative");
    Matrix q = follower_optimal_q(mdp, pi1);
    ResponsePolicy pi;
    pi.probs = Matrix(mdp.n_states, mdp.n_a2, 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < mdp.n_a2; ++b) mx = std::max(mx, beta * q(s, b));
        double z = 0.0;
        for (int b = 0; b < mdp.n_a2; ++b) {
            pi.probs(s, b) = std::exp(beta * q(s, b) - mx);
            z += pi.probs(s, b);
        }
        for (int b = 0; b < mdp.n_a2; ++b) pi.probs(s, b) /= z;
    }
    return pi;
}

ResponsePolicy eps_greedy_response(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                                   double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw ContractError("eps_greedy_response: epsilon must lie in [0,1]");
    ResponsePolicy base = optimal_response(mdp, pi1);
    const double u = epsilon / mdp.n_a2;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int b = 0; b < mdp.n_a2; ++b)
            base.probs(s, b) = (1.0 - epsilon) * base.probs(s, b) + u;
    return base;
}

PlanResult avi_boltzmann(const TwoAgentMdp& mdp, double beta, const AviOptions& opts) {
    if (beta < 0.0) throw ContractError("avi_boltzmann: beta must be nonnegative");
    mdp.validate();
    const int n = mdp.n_states;
    Vec v(n, 0.0), vhat(n, 0.0);
    std::vector<int> pi1(n, 0);
    Vec qhat(mdp.n_a2), w(mdp.n_a2), onestep(mdp.n_a2);

    for (long sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < n; ++s) {
            double best_val = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            Vec best_w(mdp.n_a2);
            for (int a = 0; a < mdp.n_a1; ++a) {
                // follower's Boltzmann distribution over b given (s, a),
                // formed from its believed continuation Vhat
                double mx = -std::numeric_limits<double>::infinity();
                for (int b = 0; b < mdp.n_a2; ++b) {
                    const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                    double acc_belief = 0.0, acc_v = 0.0;
                    for (int t = 0; t < n; ++t) {
                        acc_belief += p[t] * vhat[t];
                        acc_v += p[t] * v[t];
                    }
                    qhat[b] = beta * (mdp.reward[s] + mdp.discount * acc_belief);
                    onestep[b] = acc_v;
                    mx = std::max(mx, qhat[b]);
                }
                double z = 0.0;
                for (int b = 0; b < mdp.n_a2; ++b) {
                    w[b] = std::exp(qhat[b] - mx);
                    z += w[b];
                }
                double val = 0.0;
                for (int b = 0; b < mdp.n_a2; ++b) {
                    w[b] /= z;
                    val += w[b] * onestep[b];
                }
                if (val > best_val + 0.0) {  // strict: lowest index wins ties
                    best_val = val;
                    best_a = a;
                    best_w = w;
                }
            }
            pi1[s] = best_a;
            double acc_v = 0.0, acc_belief_soft = 0.0, acc_belief_max =
                -std::numeric_limits<double>::infinity();
            for (int b = 0; b < mdp.n_a2; ++b) {
                const double* p = mdp.transition.data() + mdp.idx(s, best_a, b);
                double ev = 0.0, ebelief = 0.0;
                for (int t = 0; t < n; ++t) {
                    ev += p[t] * v[t];
                    ebelief += p[t] * vhat[t];
                }
                acc_v += best_w[b] * ev;
                acc_belief_soft += best_w[b] * ebelief;
                acc_belief_max = std::max(acc_belief_max, ebelief);
            }
            const double v_new = mdp.reward[s] + mdp.discount * acc_v;
            const double vhat_new =
                mdp.reward[s] +
                mdp.discount * (opts.belief_max_backup ? acc_belief_max : acc_belief_soft);
            delta = std::max(delta, std::abs(v_new - v[s]));
            v[s] = v_new;
            vhat[s] = vhat_new;
        }
        if (delta <= opts.tol)
            return {CommitmentPolicy::deterministic(n, mdp.n_a1, pi1), std::move(v),
                    std::move(vhat)};
    }
    throw ConvergenceError("avi_boltzmann: no convergence within sweep budget", v, vhat);
}

PlanResult avi_eps_greedy(const TwoAgentMdp& mdp, double epsilon, const AviOptions& opts) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw ContractError("avi_eps_greedy: epsilon must lie in [0,1]");
    mdp.validate();
    const int n = mdp.n_states;
    const double mix = epsilon / mdp.n_a2;
    Vec v(n, 0.0), vhat(n, 0.0);
    std::vector<int> pi1(n, 0);

    // P_eps(.|s,a,b) = eps * P(.|s,a,U(A2)) + (1-eps) * P(.|s,a,b); the
    // uniform part is independent of b, so precompute its V-projection.
    for (long sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < n; ++s) {
            int best_a = 0, best_b = 0;
            double best_val = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_a1; ++a) {
                double uniform_v = 0.0, uniform_belief = 0.0;
                double best_belief = -std::numeric_limits<double>::infinity();
                int b_star = 0;
                Vec ev(mdp.n_a2, 0.0);
                for (int b = 0; b < mdp.n_a2; ++b) {
                    const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                    double acc_v = 0.0, acc_belief = 0.0;
                    for (int t = 0; t < n; ++t) {
                        acc_v += p[t] * v[t];
                        acc_belief += p[t] * vhat[t];
                    }
                    ev[b] = acc_v;
                    uniform_v += mix * acc_v;
                    uniform_belief += mix * acc_belief;
                    if (acc_belief > best_belief) {  // pi2(s,a): lowest index on ties
                        best_belief = acc_belief;
                        b_star = b;
                    }
                }
                const double val = uniform_v + (1.0 - epsilon) * ev[b_star];
                if (val > best_val) {  // pi1(s): lowest index on ties
                    best_val = val;
                    best_a = a;
                    best_b = b_star;
                }
            }
            pi1[s] = best_a;
            // V backs up through P_eps, Vhat through the original kernel
            double acc_v_eps = 0.0, acc_belief = 0.0;
            {
                for (int b = 0; b < mdp.n_a2; ++b) {
                    const double* p = mdp.transition.data() + mdp.idx(s, best_a, b);
                    double acc_v = 0.0;
                    for (int t = 0; t < n; ++t) acc_v += p[t] * v[t];
                    acc_v_eps += mix * acc_v;
                }
                const double* p = mdp.transition.data() + mdp.idx(s, best_a, best_b);
                double acc_v = 0.0;
                for (int t = 0; t < n; ++t) {
                    acc_v += p[t] * v[t];
                    acc_belief += p[t] * vhat[t];
                }
                acc_v_eps += (1.0 - epsilon) * acc_v;
            }
            const double v_new = mdp.reward[s] + mdp.discount * acc_v_eps;
            const double vhat_new = mdp.reward[s] + mdp.discount * acc_belief;
            delta = std::max(delta, std::abs(v_new - v[s]));
            v[s] = v_new;
            vhat[s] = vhat_new;
        }
        if (delta <= opts.tol)
            return {CommitmentPolicy::deterministic(n, mdp.n_a1, pi1), std::move(v),
                    std::move(vhat)};
    }
    throw ConvergenceError("avi_eps_greedy: no convergence within sweep budget", v, vhat);
}

std::optional<CommitmentPolicy> dominating_policy_check(const TwoAgentMdp& mdp,
                                                        const ResponseModel& model,
                                                        long enumeration_cap) {
    mdp.validate();
    double count_d = 1.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        count_d *= mdp.n_a1;
        if (count_d > static_cast<double>(enumeration_cap))
            throw CapacityError("dominating_policy_check: enumeration cap exceeded");
    }
    const long count = static_cast<long>(count_d);

    auto evaluate = [&](long k) {
        CommitmentPolicy pi1 = candidate_policy(mdp, k);
        ResponsePolicy pi2 = model.respond(mdp, pi1);
        return joint_value(mdp, pi1, pi2);
    };

    // Pass 1: elementwise max over all candidate value vectors.
    Vec best(mdp.n_states, -std::numeric_limits<double>::infinity());
#pragma omp parallel
    {
        Vec local(mdp.n_states, -std::numeric_limits<double>::infinity());
#pragma omp for schedule(dynamic, 8) nowait
        for (long k = 0; k < count; ++k) {
            Vec v = evaluate(k);
            for (int s = 0; s < mdp.n_states; ++s) local[s] = std::max(local[s], v[s]);
        }
#pragma omp critical
        for (int s = 0; s < mdp.n_states; ++s) best[s] = std::max(best[s], local[s]);
    }

    // Pass 2: lowest candidate index whose value dominates within tolerance.
    long found = count;
#pragma omp parallel for schedule(dynamic, 8) reduction(min : found)
    for (long k = 0; k < count; ++k) {
        Vec v = evaluate(k);
        bool dominates = true;
        for (int s = 0; s < mdp.n_states; ++s) {
            if (v[s] < best[s] - kDominanceTol) {
                dominates = false;
                break;
            }
        }
        if (dominates) found = std::min(found, k);
    }
    if (found == count) return std::nullopt;
    return candidate_policy(mdp, found);
}

}  // namespace iirl
