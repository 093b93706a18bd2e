#include "iirl/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "iirl/errors.hpp"

namespace iirl::kernels {

namespace {

inline void marginalize_state(const TwoAgentMdp& mdp, const Matrix& pi1, int s, double* out_sb) {
    const int n = mdp.n_states;
    for (int b = 0; b < mdp.n_a2; ++b) {
        double* row = out_sb + static_cast<size_t>(b) * n;
        std::fill(row, row + n, 0.0);
        for (int a = 0; a < mdp.n_a1; ++a) {
            const double w = pi1(s, a);
            if (w == 0.0) continue;
            const double* p = mdp.transition.data() + mdp.idx(s, a, b);
            for (int t = 0; t < n; ++t) row[t] += w * p[t];
        }
    }
}

inline void joint_row(const TwoAgentMdp& mdp, const Matrix& pi1, const Matrix& pi2, int s,
                      double* row) {
    const int n = mdp.n_states;
    std::fill(row, row + n, 0.0);
    for (int a = 0; a < mdp.n_a1; ++a) {
        const double wa = pi1(s, a);
        if (wa == 0.0) continue;
        for (int b = 0; b < mdp.n_a2; ++b) {
            const double w = wa * pi2(s, b);
            if (w == 0.0) continue;
            const double* p = mdp.transition.data() + mdp.idx(s, a, b);
            for (int t = 0; t < n; ++t) row[t] += w * p[t];
        }
    }
}

inline double follower_sweep(const MarginalKernel& kernel, const Vec& reward, double discount,
                             const Vec& vmax, Matrix& q_next, bool parallel) {
    const int n = kernel.n_states;
    const int nb = kernel.n_a2;
    double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) if (parallel)
    for (int s = 0; s < n; ++s) {
        for (int b = 0; b < nb; ++b) {
            const double* k = kernel.kernel.data() + kernel.idx(s, b);
            double acc = 0.0;
            for (int t = 0; t < n; ++t) acc += k[t] * vmax[t];
            const double fresh = reward[s] + discount * acc;
            delta = std::max(delta, std::abs(fresh - q_next(s, b)));
            q_next(s, b) = fresh;
        }
    }
    return delta;
}

FollowerQResult follower_q_vi_impl(const MarginalKernel& kernel, const Vec& reward,
                                   double discount, double tol, long max_iterations,
                                   bool parallel) {
    const int n = kernel.n_states;
    const int nb = kernel.n_a2;
    Matrix q(n, nb, 0.0);
    Vec vmax(n, 0.0);
    long it = 0;
    for (; it < max_iterations; ++it) {
        const double delta = follower_sweep(kernel, reward, discount, vmax, q, parallel);
        for (int s = 0; s < n; ++s) {
            double m = q(s, 0);
            for (int b = 1; b < nb; ++b) m = std::max(m, q(s, b));
            vmax[s] = m;
        }
        if (delta <= tol) return {std::move(q), static_cast<int>(it + 1)};
    }
    throw ConvergenceError("follower_q_vi: no convergence within iteration budget", vmax, {});
}

std::pair<Vec, std::vector<std::pair<int, int>>> joint_vi_impl(const TwoAgentMdp& mdp, double tol,
                                                               long max_iterations,
                                                               bool parallel) {
    const int n = mdp.n_states;
    Vec v(n, 0.0), v_next(n, 0.0);
    for (long it = 0; it < max_iterations; ++it) {
        double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) if (parallel)
        for (int s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_a1; ++a) {
                for (int b = 0; b < mdp.n_a2; ++b) {
                    const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                    double acc = 0.0;
                    for (int t = 0; t < n; ++t) acc += p[t] * v[t];
                    best = std::max(best, acc);
                }
            }
            const double fresh = mdp.reward[s] + mdp.discount * best;
            delta = std::max(delta, std::abs(fresh - v[s]));
            v_next[s] = fresh;
        }
        v.swap(v_next);
        if (delta <= tol) {
            std::vector<std::pair<int, int>> policy(n);
            for (int s = 0; s < n; ++s) {
                double best = -std::numeric_limits<double>::infinity();
                std::pair<int, int> arg{0, 0};
                for (int a = 0; a < mdp.n_a1; ++a) {
                    for (int b = 0; b < mdp.n_a2; ++b) {
                        const double* p = mdp.transition.data() + mdp.idx(s, a, b);
                        double acc = 0.0;
                        for (int t = 0; t < n; ++t) acc += p[t] * v[t];
                        if (acc > best) {  // strict: keeps the lowest (a,b) on ties
                            best = acc;
                            arg = {a, b};
                        }
                    }
                }
                policy[s] = arg;
            }
            return {std::move(v), std::move(policy)};
        }
    }
    throw ConvergenceError("joint_value_iteration: no convergence within iteration budget", v, {});
}

double influence_impl(const TwoAgentMdp& mdp, Agent agent, bool parallel) {
    const int n = mdp.n_states;
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best) if (parallel)
    for (int s = 0; s < n; ++s) {
        if (agent == Agent::Leader) {
            for (int b = 0; b < mdp.n_a2; ++b) {
                for (int a1 = 0; a1 < mdp.n_a1; ++a1) {
                    for (int a2 = a1 + 1; a2 < mdp.n_a1; ++a2) {
                        const double* p = mdp.transition.data() + mdp.idx(s, a1, b);
                        const double* q = mdp.transition.data() + mdp.idx(s, a2, b);
                        double d = 0.0;
                        for (int t = 0; t < n; ++t) d += std::abs(p[t] - q[t]);
                        best = std::max(best, d);
                    }
                }
            }
        } else {
            for (int a = 0; a < mdp.n_a1; ++a) {
                for (int b1 = 0; b1 < mdp.n_a2; ++b1) {
                    for (int b2 = b1 + 1; b2 < mdp.n_a2; ++b2) {
                        const double* p = mdp.transition.data() + mdp.idx(s, a, b1);
                        const double* q = mdp.transition.data() + mdp.idx(s, a, b2);
                        double d = 0.0;
                        for (int t = 0; t < n; ++t) d += std::abs(p[t] - q[t]);
                        best = std::max(best, d);
                    }
                }
            }
        }
    }
    return best;
}

}  // namespace

void marginalize_into(const TwoAgentMdp& mdp, const Matrix& pi1, Vec& out) {
    const int n = mdp.n_states;
    out.assign(static_cast<size_t>(n) * mdp.n_a2 * n, 0.0);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n; ++s)
        marginalize_state(mdp, pi1, s, out.data() + static_cast<size_t>(s) * mdp.n_a2 * n);
}

void joint_transition_into(const TwoAgentMdp& mdp, const Matrix& pi1, const Matrix& pi2,
                           Matrix& out) {
    const int n = mdp.n_states;
    out = Matrix(n, n, 0.0);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n; ++s) joint_row(mdp, pi1, pi2, s, out.row(s));
}

FollowerQResult follower_q_vi(const MarginalKernel& kernel, const Vec& reward, double discount,
                              double tol, long max_iterations) {
    return follower_q_vi_impl(kernel, reward, discount, tol, max_iterations, true);
}

std::pair<Vec, std::vector<std::pair<int, int>>> joint_value_iteration(const TwoAgentMdp& mdp,
                                                                       double tol,
                                                                       long max_iterations) {
    return joint_vi_impl(mdp, tol, max_iterations, true);
}

double influence_max(const TwoAgentMdp& mdp, Agent agent) {
    return influence_impl(mdp, agent, true);
}

namespace serial {

void marginalize_into(const TwoAgentMdp& mdp, const Matrix& pi1, Vec& out) {
    const int n = mdp.n_states;
    out.assign(static_cast<size_t>(n) * mdp.n_a2 * n, 0.0);
    for (int s = 0; s < n; ++s)
        marginalize_state(mdp, pi1, s, out.data() + static_cast<size_t>(s) * mdp.n_a2 * n);
}

void joint_transition_into(const TwoAgentMdp& mdp, const Matrix& pi1, const Matrix& pi2,
                           Matrix& out) {
    const int n = mdp.n_states;
    out = Matrix(n, n, 0.0);
    for (int s = 0; s < n; ++s) joint_row(mdp, pi1, pi2, s, out.row(s));
}

FollowerQResult follower_q_vi(const MarginalKernel& kernel, const Vec& reward, double discount,
                              double tol, long max_iterations) {
    return follower_q_vi_impl(kernel, reward, discount, tol, max_iterations, false);
}

std::pair<Vec, std::vector<std::pair<int, int>>> joint_value_iteration(const TwoAgentMdp& mdp,
                                                                       double tol,
                                                                       long max_iterations) {
    return joint_vi_impl(mdp, tol, max_iterations, false);
}

double influence_max(const TwoAgentMdp& mdp, Agent agent) {
    return influence_impl(mdp, agent, false);
}

}  // namespace serial

}  // namespace iirl::kernels
