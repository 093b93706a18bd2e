#include "iirl/mdp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "iirl/errors.hpp"
#include "iirl/kernels.hpp"

namespace iirl {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kViTol = 1e-10;
constexpr long kViMaxIterations = 1000000;

void check_rows_stochastic(const Matrix& probs, const char* what) {
    for (int s = 0; s < probs.rows(); ++s) {
        double sum = 0.0;
        for (int j = 0; j < probs.cols(); ++j) {
            if (probs(s, j) < 0.0) throw ContractError(std::string(what) + ": negative probability");
            sum += probs(s, j);
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw ContractError(std::string(what) + ": row does not sum to 1");
    }
}

}  // namespace

void TwoAgentMdp::validate() const {
    if (n_states <= 0 || n_a1 <= 0 || n_a2 <= 0)
        throw ShapeError("TwoAgentMdp: state and action counts must be positive");
    if (static_cast<size_t>(n_states) * n_a1 * n_a2 * n_states != transition.size())
        throw ShapeError("TwoAgentMdp: transition tensor size mismatch");
    if (static_cast<int>(reward.size()) != n_states)
        throw ShapeError("TwoAgentMdp: reward length mismatch");
    if (!(discount >= 0.0 && discount < 1.0))
        throw ContractError("TwoAgentMdp: discount must lie in [0, 1)");
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_a1; ++a) {
            for (int b = 0; b < n_a2; ++b) {
                auto row = next_dist(s, a, b);
                double sum = 0.0;
                for (double v : row) {
                    if (v < 0.0) throw ContractError("TwoAgentMdp: negative transition probability");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > kRowSumTol)
                    throw ContractError("TwoAgentMdp: transition row does not sum to 1");
            }
        }
    }
}

CommitmentPolicy CommitmentPolicy::deterministic(int n_states, int n_a1,
                                                 const std::vector<int>& actions) {
    if (static_cast<int>(actions.size()) != n_states)
        throw ShapeError("CommitmentPolicy: one action per state required");
    CommitmentPolicy pi;
    pi.probs = Matrix(n_states, n_a1, 0.0);
    for (int s = 0; s < n_states; ++s) {
        if (actions[s] < 0 || actions[s] >= n_a1)
            throw ContractError("CommitmentPolicy: action index out of range");
        pi.probs(s, actions[s]) = 1.0;
    }
    return pi;
}

CommitmentPolicy CommitmentPolicy::uniform(int n_states, int n_a1) {
    CommitmentPolicy pi;
    pi.probs = Matrix(n_states, n_a1, 1.0 / n_a1);
    return pi;
}

void CommitmentPolicy::validate(int n_states, int n_a1) const {
    if (probs.rows() != n_states || probs.cols() != n_a1)
        throw ShapeError("CommitmentPolicy: shape mismatch");
    check_rows_stochastic(probs, "CommitmentPolicy");
}

int CommitmentPolicy::action_at(int s) const {
    for (int a = 0; a < probs.cols(); ++a)
        if (std::abs(probs(s, a) - 1.0) <= kRowSumTol) return a;
    throw ContractError("CommitmentPolicy: policy is not deterministic at state");
}

ResponsePolicy ResponsePolicy::deterministic(int n_states, int n_a2,
                                             const std::vector<int>& actions) {
    if (static_cast<int>(actions.size()) != n_states)
        throw ShapeError("ResponsePolicy: one action per state required");
    ResponsePolicy pi;
    pi.probs = Matrix(n_states, n_a2, 0.0);
    for (int s = 0; s < n_states; ++s) {
        if (actions[s] < 0 || actions[s] >= n_a2)
            throw ContractError("ResponsePolicy: action index out of range");
        pi.probs(s, actions[s]) = 1.0;
    }
    return pi;
}

ResponsePolicy ResponsePolicy::uniform(int n_states, int n_a2) {
    ResponsePolicy pi;
    pi.probs = Matrix(n_states, n_a2, 1.0 / n_a2);
    return pi;
}

void ResponsePolicy::validate(int n_states, int n_a2) const {
    if (probs.rows() != n_states || probs.cols() != n_a2)
        throw ShapeError("ResponsePolicy: shape mismatch");
    check_rows_stochastic(probs, "ResponsePolicy");
}

bool ResponsePolicy::is_deterministic(double tol) const {
    for (int s = 0; s < probs.rows(); ++s) {
        double mx = 0.0;
        for (int b = 0; b < probs.cols(); ++b) mx = std::max(mx, probs(s, b));
        if (std::abs(mx - 1.0) > tol) return false;
    }
    return true;
}

int ResponsePolicy::action_at(int s) const {
    for (int b = 0; b < probs.cols(); ++b)
        if (std::abs(probs(s, b) - 1.0) <= kRowSumTol) return b;
    throw ContractError("ResponsePolicy: policy is not deterministic at state");
}

void MarginalKernel::validate() const {
    if (static_cast<size_t>(n_states) * n_a2 * n_states != kernel.size())
        throw ShapeError("MarginalKernel: size mismatch");
    for (int s = 0; s < n_states; ++s) {
        for (int b = 0; b < n_a2; ++b) {
            auto row = next_dist(s, b);
            double sum = 0.0;
            for (double v : row) {
                if (v < -kRowSumTol) throw ContractError("MarginalKernel: negative probability");
                sum += v;
            }
            if (std::abs(sum - 1.0) > kRowSumTol)
                throw ContractError("MarginalKernel: row does not sum to 1");
        }
    }
}

void Trajectory::validate(const TwoAgentMdp& mdp) const {
    if (steps.size() < 2) throw ContractError("Trajectory: at least two steps required");
    for (const auto& st : steps) {
        if (st.state < 0 || st.state >= mdp.n_states || st.a1 < 0 || st.a1 >= mdp.n_a1 ||
            st.a2 < 0 || st.a2 >= mdp.n_a2)
            throw ContractError("Trajectory: index out of range");
    }
}

StartDistribution StartDistribution::uniform(int n_states) {
    StartDistribution d;
    d.probs.assign(n_states, 1.0 / n_states);
    return d;
}

StartDistribution StartDistribution::point(int n_states, int s) {
    StartDistribution d;
    d.probs.assign(n_states, 0.0);
    d.probs[s] = 1.0;
    return d;
}

void StartDistribution::validate(int n_states) const {
    if (static_cast<int>(probs.size()) != n_states)
        throw ShapeError("StartDistribution: length mismatch");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ContractError("StartDistribution: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw ContractError("StartDistribution: does not sum to 1");
}

double StartDistribution::expectation(const Vec& values) const {
    if (values.size() != probs.size()) throw ShapeError("StartDistribution: length mismatch");
    return dot(probs, values);
}

MarginalKernel marginalize(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1) {
    pi1.validate(mdp.n_states, mdp.n_a1);
    MarginalKernel k;
    k.n_states = mdp.n_states;
    k.n_a2 = mdp.n_a2;
    kernels::marginalize_into(mdp, pi1.probs, k.kernel);
    return k;
}

Matrix joint_transition(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                        const ResponsePolicy& pi2) {
    pi1.validate(mdp.n_states, mdp.n_a1);
    pi2.validate(mdp.n_states, mdp.n_a2);
    Matrix out;
    kernels::joint_transition_into(mdp, pi1.probs, pi2.probs, out);
    return out;
}

Vec joint_value(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1, const ResponsePolicy& pi2) {
    Matrix p = joint_transition(mdp, pi1, pi2);
    const int n = mdp.n_states;
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - mdp.discount * p(i, j);
    }
    Vec v = lu_solve(m, mdp.reward);
    // residual check: the system is well conditioned for gamma < 1
    Vec res = mat_vec(m, v);
    double rnorm = 0.0;
    for (int i = 0; i < n; ++i) rnorm = std::max(rnorm, std::abs(res[i] - mdp.reward[i]));
    if (rnorm > 1e-10 * std::max(1.0, max_abs(mdp.reward)))
        throw SolverError("joint_value: residual too large");
    return v;
}

Vec joint_q(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1, const ResponsePolicy& pi2) {
    Vec v = joint_value(mdp, pi1, pi2);
    const int n = mdp.n_states;
    Vec q(static_cast<size_t>(n) * mdp.n_a1 * mdp.n_a2, 0.0);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < mdp.n_a1; ++a) {
            for (int b = 0; b < mdp.n_a2; ++b) {
                const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                double acc = 0.0;
                for (int t = 0; t < n; ++t) acc += p[t] * v[t];
                q[(static_cast<size_t>(s) * mdp.n_a1 + a) * mdp.n_a2 + b] =
                    mdp.reward[s] + mdp.discount * acc;
            }
        }
    }
    return q;
}

Matrix follower_optimal_q(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1) {
    MarginalKernel kernel = marginalize(mdp, pi1);
    return follower_optimal_q(kernel, mdp.reward, mdp.discount);
}

Matrix follower_optimal_q(const MarginalKernel& kernel, const Vec& reward, double discount) {
    if (static_cast<int>(reward.size()) != kernel.n_states)
        throw ShapeError("follower_optimal_q: reward length mismatch");
    return kernels::follower_q_vi(kernel, reward, discount, kViTol, kViMaxIterations).q;
}

double influence(const TwoAgentMdp& mdp, Agent agent) {
    return kernels::influence_max(mdp, agent);
}

// --- Serialization ----------------------------------------------------

std::string mdp_to_json(const TwoAgentMdp& mdp) {
    nlohmann::json j;
    j["n_states"] = mdp.n_states;
    j["n_a1"] = mdp.n_a1;
    j["n_a2"] = mdp.n_a2;
    j["discount"] = mdp.discount;
    j["reward"] = mdp.reward;
    nlohmann::json trans = nlohmann::json::array();
    for (int s = 0; s < mdp.n_states; ++s) {
        nlohmann::json by_a = nlohmann::json::array();
        for (int a = 0; a < mdp.n_a1; ++a) {
            nlohmann::json by_b = nlohmann::json::array();
            for (int b = 0; b < mdp.n_a2; ++b) {
                auto row = mdp.next_dist(s, a, b);
                by_b.push_back(std::vector<double>(row.begin(), row.end()));
            }
            by_a.push_back(std::move(by_b));
        }
        trans.push_back(std::move(by_a));
    }
    j["transition"] = std::move(trans);
    return j.dump(2);
}

TwoAgentMdp mdp_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TwoAgentMdp mdp;
    mdp.n_states = j.at("n_states").get<int>();
    mdp.n_a1 = j.at("n_a1").get<int>();
    mdp.n_a2 = j.at("n_a2").get<int>();
    mdp.discount = j.at("discount").get<double>();
    mdp.reward = j.at("reward").get<Vec>();
    const auto& trans = j.at("transition");
    mdp.transition.reserve(static_cast<size_t>(mdp.n_states) * mdp.n_a1 * mdp.n_a2 * mdp.n_states);
    for (const auto& by_a : trans)
        for (const auto& by_b : by_a)
            for (const auto& row : by_b)
                for (const auto& v : row) mdp.transition.push_back(v.get<double>());
    mdp.validate();
    return mdp;
}

void save_mdp(const TwoAgentMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_mdp: cannot open " + path);
    out << mdp_to_json(mdp);
}

TwoAgentMdp load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_mdp: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return mdp_from_json(ss.str());
}

}  // namespace iirl
