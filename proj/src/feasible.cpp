#include "iirl/feasible.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_set>

#include "iirl/errors.hpp"
#include "iirl/lp.hpp"

namespace iirl {

namespace {

constexpr double kGramSchmidtTol = 1e-10;

// Rounds rows onto a coarse grid to deduplicate them for LP assembly.
std::string row_key(const double* row, int n) {
    std::string key;
    key.reserve(static_cast<size_t>(n) * 20);
    char buf[32];
    for (int j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof(buf), "%.12e,", row[j]);
        key += buf;
    }
    return key;
}

}  // namespace

double ConstraintSet::min_slack(const Vec& r) const {
    double m = 0.0;
    for (int i = 0; i < rows.rows(); ++i) {
        double acc = 0.0;
        const double* row = rows.row(i);
        for (int j = 0; j < n_states; ++j) acc += row[j] * r[j];
        m = std::min(m, acc);
    }
    return m;
}

ConstraintSet constraints_for(const TwoAgentMdp& mdp, const CommitmentPolicy& pi1,
                              const ResponsePolicy& pi2, int episode) {
    pi1.validate(mdp.n_states, mdp.n_a1);
    pi2.validate(mdp.n_states, mdp.n_a2);
    if (!pi2.is_deterministic())
        throw ContractError("constraints_for: the characterization requires a deterministic pi2");

    const int n = mdp.n_states;
    MarginalKernel kernel = marginalize(mdp, pi1);
    Matrix p_joint = joint_transition(mdp, pi1, pi2);
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - mdp.discount * p_joint(i, j);
    Matrix inv = invert(std::move(m));

    ConstraintSet cs;
    cs.n_states = n;
    cs.rows = Matrix(n * mdp.n_a2, n, 0.0);
    for (int b = 0; b < mdp.n_a2; ++b) {
        // diff = P_{pi1,pi2} - P_{pi1,b}, then diff * inv
        for (int s = 0; s < n; ++s) {
            auto pb = kernel.next_dist(s, b);
            double* out = cs.rows.row(b * n + s);
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int t = 0; t < n; ++t) acc += (p_joint(s, t) - pb[t]) * inv(t, j);
                out[j] = acc;
            }
        }
        cs.blocks.push_back({episode, b, pi1, pi2});
    }
    return cs;
}

ConstraintSet accumulate(const ConstraintSet& existing, const ConstraintSet& fresh) {
    if (existing.row_count() == 0) return fresh;
    if (fresh.row_count() == 0) return existing;
    if (existing.n_states != fresh.n_states)
        throw ShapeError("accumulate: constraint sets over different state counts");
    ConstraintSet out;
    out.n_states = existing.n_states;
    out.rows = Matrix(existing.row_count() + fresh.row_count(), existing.n_states, 0.0);
    for (int i = 0; i < existing.row_count(); ++i)
        std::copy(existing.rows.row(i), existing.rows.row(i) + existing.n_states,
                  out.rows.row(i));
    for (int i = 0; i < fresh.row_count(); ++i)
        std::copy(fresh.rows.row(i), fresh.rows.row(i) + fresh.n_states,
                  out.rows.row(existing.row_count() + i));
    out.blocks = existing.blocks;
    out.blocks.insert(out.blocks.end(), fresh.blocks.begin(), fresh.blocks.end());
    return out;
}

Vec sample_feasible_vertex(const ConstraintSet& cs, Rng& rng, int max_resamples,
                           int* probe_count) {
    const int n = cs.n_states;
    if (n <= 0) throw ShapeError("sample_feasible_vertex: empty constraint set dimension");

    // Assemble the LP once: zero rows are vacuous and duplicates add
    // nothing, so both are dropped here (the ConstraintSet keeps them).
    std::vector<const double*> unique_rows;
    std::unordered_set<std::string> seen;
    for (int i = 0; i < cs.rows.rows(); ++i) {
        const double* row = cs.rows.row(i);
        double mx = 0.0;
        for (int j = 0; j < n; ++j) mx = std::max(mx, std::abs(row[j]));
        if (mx <= 1e-14) continue;
        if (seen.insert(row_key(row, n)).second) unique_rows.push_back(row);
    }

    LpProblem lp;
    lp.n = n;
    lp.a = Matrix(static_cast<int>(unique_rows.size()), n, 0.0);
    lp.b.assign(unique_rows.size(), 0.0);
    for (size_t i = 0; i < unique_rows.size(); ++i)
        std::copy(unique_rows[i], unique_rows[i] + n, lp.a.row(static_cast<int>(i)));
    lp.e = Matrix(1, n, 1.0);
    lp.d = {1.0};

    const double constant = 1.0 / n;
    for (int attempt = 0; attempt < max_resamples; ++attempt) {
        lp.c.assign(n, 0.0);
        for (int j = 0; j < n; ++j) lp.c[j] = rng.uniform(-1.0, 1.0);
        LpSolution sol = lp_solve(lp);
        if (sol.status != LpStatus::Optimal)
            throw SolverError("sample_feasible_vertex: feasible-set LP not optimal");
        double dist = 0.0;
        for (int j = 0; j < n; ++j) dist = std::max(dist, std::abs(sol.x[j] - constant));
        if (probe_count) *probe_count = attempt + 1;
        if (dist > 1e-9) return sol.x;
    }
    throw DegenerateRegionError(
        "sample_feasible_vertex: only the constant reward came back; the feasible region may "
        "contain constants only");
}

IdealEnvironment build_ideal_environment(const Vec& r_star, double discount,
                                         bool constant_mode) {
    const int n = static_cast<int>(r_star.size());
    if (n < 2) throw ContractError("build_ideal_environment: need at least two states");
    if (!(discount >= 0.0 && discount < 1.0))
        throw ContractError("build_ideal_environment: discount must lie in [0, 1)");

    double mean = 0.0;
    for (double v : r_star) mean += v;
    mean /= n;
    Vec w(n);
    double wnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = r_star[i] - mean;
        wnorm2 += w[i] * w[i];
    }
    const bool constant_reward = std::sqrt(wnorm2) <= 1e-12;
    if (constant_reward && !constant_mode)
        throw ContractError(
            "build_ideal_environment: constant target reward requires constant_mode");

    // Orthonormal directions the constructed half-spaces must annihilate:
    // always 1, plus the centered target when it is non-degenerate.
    std::vector<Vec> protected_dirs;
    {
        Vec ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
        protected_dirs.push_back(std::move(ones));
        if (!constant_mode) {
            Vec wn = w;
            const double inv = 1.0 / std::sqrt(wnorm2);
            for (double& v : wn) v *= inv;
            protected_dirs.push_back(std::move(wn));
        }
    }

    // Gram-Schmidt over the standard basis, skipping near-dependent
    // vectors (tolerance 1e-10): yields N - 1 - |protected| + 1 rows...
    // precisely n_base = N - protected_dirs.size() orthogonal vectors.
    std::vector<Vec> basis;
    const int wanted = n - static_cast<int>(protected_dirs.size());
    for (int cand = 0; cand < n && static_cast<int>(basis.size()) < wanted; ++cand) {
        Vec v(n, 0.0);
        v[cand] = 1.0;
        for (const Vec& d : protected_dirs) {
            const double proj = dot(v, d);
            for (int i = 0; i < n; ++i) v[i] -= proj * d[i];
        }
        for (const Vec& u : basis) {
            const double proj = dot(v, u) / dot(u, u);
            for (int i = 0; i < n; ++i) v[i] -= proj * u[i];
        }
        if (l2_norm(v) > kGramSchmidtTol) basis.push_back(std::move(v));
    }
    if (static_cast<int>(basis.size()) != wanted)
        throw SolverError("build_ideal_environment: basis construction fell short");

    // phi_{N-1} = -(phi_1 + ... + phi_{N-2}); phi_N = eta * w with eta > 0
    // (w itself in constant mode is replaced by nothing: the line variant
    // uses exactly N half-spaces from the basis plus the negated sum).
    std::vector<Vec> phis = basis;
    {
        Vec neg(n, 0.0);
        for (const Vec& u : basis)
            for (int i = 0; i < n; ++i) neg[i] -= u[i];
        phis.push_back(std::move(neg));
    }
    if (!constant_mode) phis.push_back(w);  // sign already satisfies phi_N . r* = |w|^2 > 0

    // Rescale every phi into [1/N - 1, 1/N]: scaling by (1/N)/max|entry|
    // lands entries in [-1/N, 1/N], inside the band for N >= 2.
    IdealEnvironment env;
    env.discount = discount;
    env.target_reward = r_star;
    env.phi = Matrix(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        double mx = 0.0;
        for (double v : phis[i]) mx = std::max(mx, std::abs(v));
        if (mx <= 0.0) throw SolverError("build_ideal_environment: zero half-space normal");
        const double scale = (1.0 / n) / mx;
        for (int j = 0; j < n; ++j) env.phi(i, j) = phis[i][j] * scale;
    }

    env.kernel_b1 = Matrix(n, n, 1.0 / n);
    env.kernel_b2 = Matrix(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) env.kernel_b2(i, j) = env.kernel_b1(i, j) - env.phi(i, j);

    // validate: zero row sums, entry band, stochastic kernel_b2
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = env.phi(i, j);
            if (v > 1.0 / n + 1e-12 || v < 1.0 / n - 1.0 - 1e-12)
                throw SolverError("build_ideal_environment: phi entry out of band");
            sum += v;
        }
        if (std::abs(sum) > 1e-12)
            throw SolverError("build_ideal_environment: phi row sum not zero");
        double ksum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (env.kernel_b2(i, j) < -1e-12)
                throw SolverError("build_ideal_environment: kernel_b2 not stochastic");
            ksum += env.kernel_b2(i, j);
        }
        if (std::abs(ksum - 1.0) > 1e-12)
            throw SolverError("build_ideal_environment: kernel_b2 row sum not one");
    }
    return env;
}

TwoAgentMdp ideal_environment_mdp(const IdealEnvironment& env, const Vec& reward) {
    const int n = env.phi.rows();
    if (static_cast<int>(reward.size()) != n)
        throw ShapeError("ideal_environment_mdp: reward length mismatch");
    TwoAgentMdp mdp;
    mdp.n_states = n;
    mdp.n_a1 = 1;
    mdp.n_a2 = 2;
    mdp.discount = env.discount;
    mdp.reward = reward;
    mdp.transition.assign(static_cast<size_t>(n) * 1 * 2 * n, 0.0);
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            mdp.transition[mdp.idx(s, 0, 0) + t] = std::max(0.0, env.kernel_b1(s, t));
            mdp.transition[mdp.idx(s, 0, 1) + t] = std::max(0.0, env.kernel_b2(s, t));
        }
    }
    mdp.validate();
    return mdp;
}

bool verify_affine_of_true(int n_states, double discount, const Vec& candidate_r,
                           const ResponseOracle& oracle, Rng& rng, int n_probes,
                           double probe_tol) {
    if (static_cast<int>(candidate_r.size()) != n_states)
        throw ShapeError("verify_affine_of_true: candidate length mismatch");
    IdealEnvironment env = build_ideal_environment(candidate_r, discount);
    TwoAgentMdp wrapper = ideal_environment_mdp(env, Vec(n_states, 0.0));
    CommitmentPolicy trivial = CommitmentPolicy::deterministic(n_states, 1, std::vector<int>(n_states, 0));

    ResponsePolicy pi2 = oracle(wrapper, trivial);
    try {
        pi2.validate(n_states, 2);
    } catch (const Error&) {
        throw ContractError("verify_affine_of_true: oracle returned an invalid policy");
    }
    if (!pi2.is_deterministic())
        throw ContractError("verify_affine_of_true: oracle must return a deterministic response");

    ConstraintSet cs = constraints_for(wrapper, trivial, pi2);
    if (cs.min_slack(candidate_r) < -probe_tol) return false;

    // Probe directions orthogonal to span(candidate, 1); a feasible probe
    // means the set is fatter than Aff(candidate).
    Vec ones_dir(n_states, 1.0 / std::sqrt(static_cast<double>(n_states)));
    Vec w = candidate_r;
    {
        double mean = 0.0;
        for (double v : candidate_r) mean += v;
        mean /= n_states;
        for (double& v : w) v -= mean;
        const double norm = l2_norm(w);
        if (norm > 1e-12)
            for (double& v : w) v /= norm;
    }
    for (int k = 0; k < n_probes; ++k) {
        Vec v(n_states);
        for (double& x : v) x = rng.normal();
        const double p1 = dot(v, ones_dir);
        const double p2 = dot(v, w);
        for (int i = 0; i < n_states; ++i) v[i] -= p1 * ones_dir[i] + p2 * w[i];
        const double norm = l2_norm(v);
        if (norm <= 1e-9) {
            --k;
            continue;
        }
        const double t = (k % 2 == 0 ? 1.0 : -1.0) * (k % 4 < 2 ? 0.1 : 0.4);
        Vec probe = candidate_r;
        for (int i = 0; i < n_states; ++i) probe[i] += t * v[i] / norm;
        if (cs.min_slack(probe) >= -probe_tol) return false;  // probe feasible: not collapsed
    }
    return true;
}

double distance_to_affine_span(const Vec& r, const Vec& r_star) {
    const int n = static_cast<int>(r.size());
    if (r_star.size() != r.size()) throw ShapeError("distance_to_affine_span: length mismatch");
    Vec ones_dir(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Vec w = r_star;
    double mean = 0.0;
    for (double v : r_star) mean += v;
    mean /= n;
    for (double& v : w) v -= mean;
    const double norm = l2_norm(w);
    Vec res = r;
    const double p1 = dot(res, ones_dir);
    for (int i = 0; i < n; ++i) res[i] -= p1 * ones_dir[i];
    if (norm > 1e-12) {
        for (double& v : w) v /= norm;
        const double p2 = dot(res, w);
        for (int i = 0; i < n; ++i) res[i] -= p2 * w[i];
    }
    return l2_norm(res);
}

void export_text(const ConstraintSet& cs, std::ostream& out) {
    const int per_block = cs.n_states;
    for (size_t blk = 0; blk < cs.blocks.size(); ++blk) {
        const RowBlock& info = cs.blocks[blk];
        out << "# episode=" << info.episode << " alternative_b=" << info.action_b << "\n";
        for (int s = 0; s < per_block; ++s) {
            const double* row = cs.rows.row(static_cast<int>(blk) * per_block + s);
            for (int j = 0; j < cs.n_states; ++j) {
                if (j) out << ' ';
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
                out << buf;
            }
            out << "\n";
        }
    }
}

}  // namespace iirl
