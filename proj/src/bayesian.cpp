#include "iirl/bayesian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "iirl/errors.hpp"

namespace iirl {

namespace {

double log_sum_exp(const double* vals, int n) {
    double mx = vals[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, vals[i]);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::exp(vals[i] - mx);
    return mx + std::log(acc);
}

double log_gamma_pdf(double x, double shape, double scale) {
    return (shape - 1.0) * std::log(x) - x / scale - shape * std::log(scale) - std::lgamma(shape);
}

std::string grid_key(int episode, const Vec& r, double grid_step) {
    std::string key = std::to_string(episode);
    key += ':';
    for (double v : r) {
        key += std::to_string(static_cast<long>(std::llround(v / grid_step)));
        key += ',';
    }
    return key;
}

double trajectory_ll_from_q(const Matrix& q, const Trajectory& tau, double beta, int n_a2) {
    double ll = 0.0;
    std::vector<double> scaled(n_a2);
    for (const auto& step : tau.steps) {
        for (int b = 0; b < n_a2; ++b) scaled[b] = beta * q(step.state, b);
        ll += scaled[step.a2] - log_sum_exp(scaled.data(), n_a2);
    }
    return ll;
}

// Uniform draw from the compositions of `slots` into n parts
// (stars-and-bars): a uniform (n-1)-subset of slot+n-1 positions.
Vec uniform_grid_point(int n, double grid_step, Rng& rng) {
    const long slots = std::llround(1.0 / grid_step);
    const long total = slots + n - 1;
    std::vector<bool> bar(total, false);
    long placed = 0;
    while (placed < n - 1) {
        long pos = rng.uniform_int(static_cast<int>(total));
        if (!bar[pos]) {
            bar[pos] = true;
            ++placed;
        }
    }
    Vec r(n, 0.0);
    int part = 0;
    long count = 0;
    for (long i = 0; i < total; ++i) {
        if (bar[i]) {
            r[part++] = count * grid_step;
            count = 0;
        } else {
            ++count;
        }
    }
    r[part] = count * grid_step;
    return r;
}

void assert_on_grid(const Vec& r, double grid_step) {
    double sum = 0.0;
    for (double v : r) {
        sum += v;
        const double k = v / grid_step;
        if (v < -1e-12 || std::abs(k - std::llround(k)) > 1e-6)
            throw Error("mh_step: chain state left the delta-grid");
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("mh_step: chain state left the simplex");
}

}  // namespace

void ObservationLog::add(const TwoAgentMdp& skeleton, const CommitmentPolicy& pi1,
                         Trajectory tau) {
    tau.validate(skeleton);
    commitments_.push_back(pi1);
    kernels_.push_back(marginalize(skeleton, pi1));
    trajectories_.push_back(std::move(tau));
    discount_ = skeleton.discount;
    n_a2_ = skeleton.n_a2;
}

const Matrix& ObservationLog::follower_q(int episode, const Vec& r, double grid_step) const {
    const std::string key = grid_key(episode, r, grid_step);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 200000) cache_.clear();
    Matrix q = follower_optimal_q(kernels_[episode], r, discount_);
    return cache_.emplace(std::move(key), std::move(q)).first->second;
}

double ObservationLog::log_likelihood(const Vec& r, double beta, double grid_step) const {
    double ll = 0.0;
    for (int i = 0; i < size(); ++i)
        ll += trajectory_ll_from_q(follower_q(i, r, grid_step), trajectories_[i], beta, n_a2_);
    return ll;
}

double trajectory_log_likelihood(const TwoAgentMdp& mdp_skeleton, const CommitmentPolicy& pi1,
                                 const Trajectory& tau, const Vec& r, double beta) {
    if (beta < 0.0) throw ContractError("trajectory_log_likelihood: beta must be nonnegative");
    if (static_cast<int>(r.size()) != mdp_skeleton.n_states)
        throw ShapeError("trajectory_log_likelihood: reward length mismatch");
    tau.validate(mdp_skeleton);
    Matrix q = follower_optimal_q(marginalize(mdp_skeleton, pi1), r, mdp_skeleton.discount);
    return trajectory_ll_from_q(q, tau, beta, mdp_skeleton.n_a2);
}

PosteriorState initial_posterior_state(int n_states, const ObservationLog& log,
                                       const MhConfig& config, Rng& rng) {
    const double step = config.grid_step(n_states);
    PosteriorState st;
    st.r = uniform_grid_point(n_states, step, rng);
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    st.beta = -std::log(u) / config.beta_prior_rate;
    st.log_score = log.log_likelihood(st.r, st.beta, step) +
                   std::log(config.beta_prior_rate) - config.beta_prior_rate * st.beta;
    return st;
}

PosteriorState mh_step(const PosteriorState& state, const ObservationLog& log,
                       const MhConfig& config, Rng& rng, bool* accepted) {
    if (accepted) *accepted = false;
    const int n = static_cast<int>(state.r.size());
    const double step = config.grid_step(n);

    // Simplex walk: ordered pair uniform over all n(n-1) choices; when the
    // source coordinate holds less than one step of mass the proposal is
    // "stay", so g1(r'|r) = g1(r|r') for every neighbour pair.
    Vec r_prop = state.r;
    {
        const int i = rng.uniform_int(n);
        int j = rng.uniform_int(n - 1);
        if (j >= i) ++j;
        if (state.r[i] >= step - 1e-12) {
            r_prop[i] -= step;
            r_prop[j] += step;
            if (r_prop[i] < 0.0) r_prop[i] = 0.0;  // exact-grid cleanup
        }
    }

    double beta_prop = state.beta;
    double log_g2 = 0.0;
    if (config.propose_beta) {
        const double k0 = config.beta_proposal_shape;
        const double scale = std::max(state.beta, 1e-8) / k0;
        beta_prop = rng.gamma(k0, scale);
        log_g2 = log_gamma_pdf(beta_prop, k0, scale);
    }

    // p = likelihood * prior(r) * prior(beta) / (g1 * g2); the uniform
    // reward prior and the symmetric g1 are constant and omitted.
    const double log_p = log.log_likelihood(r_prop, beta_prop, step) +
                         std::log(config.beta_prior_rate) -
                         config.beta_prior_rate * beta_prop - log_g2;

    const double ratio = log_p - state.log_score;
    if (ratio >= 0.0 || rng.uniform() < std::exp(ratio)) {
        PosteriorState next;
        next.r = std::move(r_prop);
        next.beta = beta_prop;
        next.log_score = log_p;
        assert_on_grid(next.r, step);
        if (accepted) *accepted = true;
        return next;
    }
    return state;
}

std::vector<EpisodeRecord> run_algorithm2(const TwoAgentMdp& mdp_true,
                                          const StartDistribution& start, int episodes,
                                          int samples_per_episode, const MhConfig& config,
                                          double true_beta, uint64_t seed, bool non_interactive,
                                          double reference_vstar) {
    if (episodes < 1) throw ContractError("run_algorithm2: at least one episode");
    if (samples_per_episode < 0) throw ContractError("run_algorithm2: negative sample count");
    mdp_true.validate();
    start.validate(mdp_true.n_states);

    Rng follower_rng = Rng::stream(seed, 1);
    Rng proposal_rng = Rng::stream(seed, 2);
    Rng objective_rng = Rng::stream(seed, 3);

    const int n = mdp_true.n_states;
    const double step = config.grid_step(n);
    TwoAgentMdp skeleton = mdp_true;  // transitions are known to the learner
    std::fill(skeleton.reward.begin(), skeleton.reward.end(), 0.0);

    Vec r_true_unit = mdp_true.reward;
    {
        const double norm = l1_norm(r_true_unit);
        if (norm > 0.0)
            for (double& v : r_true_unit) v /= norm;
    }

    ObservationLog log;
    PosteriorState chain = initial_posterior_state(n, log, config, proposal_rng);
    CommitmentPolicy pi1 = random_commitment(mdp_true, objective_rng);
    const CommitmentPolicy pi1_initial = pi1;

    std::vector<EpisodeRecord> records;
    records.reserve(episodes);
    for (int t = 1; t <= episodes; ++t) {
        const CommitmentPolicy& committed = non_interactive ? pi1_initial : pi1;
        ResponsePolicy true_response = boltzmann_response(mdp_true, committed, true_beta);

        // trajectory of geometric length (continue w.p. discount), at
        // least two steps
        Trajectory tau;
        {
            int length = 1;
            while (follower_rng.uniform() < mdp_true.discount) ++length;
            length = std::max(length, 2);
            int s = follower_rng.categorical(start.probs);
            for (int h = 0; h < length; ++h) {
                const int a = follower_rng.categorical(committed.probs.row_span(s));
                const int b = follower_rng.categorical(true_response.probs.row_span(s));
                tau.steps.push_back({s, a, b});
                s = follower_rng.categorical(mdp_true.next_dist(s, a, b));
            }
        }
        log.add(skeleton, committed, std::move(tau));
        // the score carries over episodes as printed in the sampling loop;
        // it is refreshed lazily by the first accepted proposal

        Vec r_mean(n, 0.0);
        double beta_mean = 0.0;
        int accepted = 0;
        for (int k = 0; k < samples_per_episode; ++k) {
            bool took = false;
            chain = mh_step(chain, log, config, proposal_rng, &took);
            if (took) ++accepted;
            for (int i = 0; i < n; ++i) r_mean[i] += chain.r[i];
            beta_mean += chain.beta;
        }
        if (samples_per_episode > 0) {
            for (double& v : r_mean) v /= samples_per_episode;
            beta_mean /= samples_per_episode;
        } else {
            r_mean.assign(n, 1.0 / n);
            beta_mean = 1.0 / config.beta_prior_rate;
        }

        EpisodeRecord rec;
        rec.index = t;
        rec.pi1 = committed;
        rec.trajectory = log.trajectory(log.size() - 1);
        rec.reward_estimate = r_mean;
        rec.posterior_mean_beta = beta_mean;
        rec.realized_value = start.expectation(joint_value(mdp_true, committed, true_response));
        if (std::isfinite(reference_vstar)) rec.regret = reference_vstar - rec.realized_value;
        rec.acceptance_rate =
            samples_per_episode > 0 ? static_cast<double>(accepted) / samples_per_episode
                                    : std::numeric_limits<double>::quiet_NaN();
        {
            double err = 0.0;
            for (int i = 0; i < n; ++i) err += std::abs(r_mean[i] - r_true_unit[i]);
            rec.reward_l1_error = err;
        }
        rec.distance_to_aff = distance_to_affine_span(r_mean, mdp_true.reward);
        records.push_back(std::move(rec));

        if (!non_interactive && t < episodes) {
            TwoAgentMdp planning = mdp_true;
            planning.reward = r_mean;
            AviOptions opts;
            opts.belief_max_backup = config.belief_max_backup;
            pi1 = avi_boltzmann(planning, beta_mean, opts).pi1;
        }
    }
    return records;
}

}  // namespace iirl
