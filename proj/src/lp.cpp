#include "iirl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "iirl/errors.hpp"

namespace iirl {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

// Standard-form working problem: maximize obj.z s.t. W z = h, z >= 0.
// Column layout: [variables, free ones split] [surplus] [artificials] [rhs].
struct Tableau {
    int m = 0;
    int ncols = 0;           // without rhs
    int n_real = 0;          // columns that are not artificial
    std::vector<Vec> t;      // m rows of ncols + 1
    Vec obj;                 // reduced-cost row, ncols + 1
    std::vector<int> basis;  // basic column per row

    double& rhs(int i) { return t[i][ncols]; }
    double rhs(int i) const { return t[i][ncols]; }

    void pivot(int row, int col) {
        Vec& pr = t[row];
        const double inv = 1.0 / pr[col];
        for (int j = 0; j <= ncols; ++j) pr[j] *= inv;
        pr[col] = 1.0;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = t[i][col];
            if (f == 0.0) continue;
            Vec& ri = t[i];
            for (int j = 0; j <= ncols; ++j) ri[j] -= f * pr[j];
            ri[col] = 0.0;
        }
        const double f = obj[col];
        if (f != 0.0) {
            for (int j = 0; j <= ncols; ++j) obj[j] -= f * pr[j];
            obj[col] = 0.0;
        }
        basis[row] = col;
    }

    // Bland's rule: entering = lowest-index improving column, leaving =
    // min ratio with ties broken by lowest basic variable index.
    // Returns false when the objective is unbounded above.
    bool run(int col_limit, bool verbose) {
        for (long iter = 0;; ++iter) {
            int enter = -1;
            for (int j = 0; j < col_limit; ++j) {
                if (obj[j] < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                const double a = t[i][enter];
                if (a <= kPivotTol) continue;
                const double ratio = rhs(i) / a;
                if (leave < 0 || ratio < best_ratio - 1e-15 ||
                    (ratio <= best_ratio + 1e-15 && basis[i] < basis[leave])) {
                    best_ratio = std::min(ratio, best_ratio);
                    leave = i;
                }
            }
            if (leave < 0) return false;
            if (verbose)
                std::fprintf(stderr, "lp: iter %ld enter %d leave row %d (basis %d)\n", iter,
                             enter, leave, basis[leave]);
            pivot(leave, enter);
        }
    }

    // Prices the objective out so reduced costs vanish on basic columns.
    void set_objective(const Vec& maximize_coeffs) {
        obj.assign(ncols + 1, 0.0);
        for (int j = 0; j < ncols && j < static_cast<int>(maximize_coeffs.size()); ++j)
            obj[j] = -maximize_coeffs[j];
        for (int i = 0; i < m; ++i) {
            const int bj = basis[i];
            const double cb = bj < static_cast<int>(maximize_coeffs.size()) ? maximize_coeffs[bj] : 0.0;
            if (cb == 0.0) continue;
            for (int j = 0; j <= ncols; ++j) obj[j] += cb * t[i][j];
        }
    }
};

struct StandardForm {
    Tableau tab;
    std::vector<int> var_col;     // first standard column of original variable j
    std::vector<bool> var_split;  // variable occupies two columns (free)
    std::vector<double> row_sign; // +-1 applied during rhs normalization
    std::vector<Vec> unpivoted;   // copy of the constraint rows before pivoting
    int n_ineq = 0;
    int n_eq = 0;
    Vec obj_coeffs;  // phase-2 objective over standard columns
};

StandardForm build(const LpProblem& p) {
    p.validate();
    const int n_ineq = p.a.rows();
    const int n_eq = p.e.rows();
    const int m = n_ineq + n_eq;

    StandardForm sf;
    sf.n_ineq = n_ineq;
    sf.n_eq = n_eq;
    sf.var_col.resize(p.n);
    sf.var_split.resize(p.n);

    int nz = 0;
    for (int j = 0; j < p.n; ++j) {
        const bool nn = p.nonneg.empty() ? true : static_cast<bool>(p.nonneg[j]);
        sf.var_col[j] = nz;
        sf.var_split[j] = !nn;
        nz += nn ? 1 : 2;
    }
    const int surplus0 = nz;
    nz += n_ineq;

    // Pass 1: rows over [vars | surplus | rhs], sign-normalized.
    std::vector<Vec> rows(m, Vec(nz + 1, 0.0));
    sf.row_sign.assign(m, 1.0);
    for (int i = 0; i < m; ++i) {
        Vec& r = rows[i];
        const bool ineq = i < n_ineq;
        const Matrix& coeff = ineq ? p.a : p.e;
        const int src = ineq ? i : i - n_ineq;
        for (int j = 0; j < p.n; ++j) {
            const double v = coeff(src, j);
            r[sf.var_col[j]] = v;
            if (sf.var_split[j]) r[sf.var_col[j] + 1] = -v;
        }
        if (ineq) r[surplus0 + i] = -1.0;
        r[nz] = ineq ? p.b[i] : p.d[src];
        if (r[nz] < 0.0) {
            for (double& v : r) v = -v;
            sf.row_sign[i] = -1.0;
        }
    }

    // Pass 2: choose the initial basis; a surplus column that came out
    // with coefficient +1 serves directly, otherwise an artificial.
    std::vector<int> basis(m, -1);
    std::vector<int> art_row;
    for (int i = 0; i < m; ++i) {
        if (i < n_ineq && rows[i][surplus0 + i] > 0.5)
            basis[i] = surplus0 + i;
        else
            art_row.push_back(i);
    }
    const int n_art = static_cast<int>(art_row.size());

    Tableau& tab = sf.tab;
    tab.m = m;
    tab.n_real = nz;
    tab.ncols = nz + n_art;
    tab.basis = basis;
    tab.t.assign(m, Vec(tab.ncols + 1, 0.0));
    for (int i = 0; i < m; ++i) {
        std::copy(rows[i].begin(), rows[i].begin() + nz, tab.t[i].begin());
        tab.rhs(i) = rows[i][nz];
    }
    Vec phase1(tab.ncols, 0.0);
    for (int k = 0; k < n_art; ++k) {
        const int i = art_row[k];
        tab.t[i][nz + k] = 1.0;
        tab.basis[i] = nz + k;
        phase1[nz + k] = -1.0;  // maximize minus the artificial sum
    }

    sf.unpivoted = tab.t;
    sf.obj_coeffs.assign(tab.ncols, 0.0);
    for (int j = 0; j < p.n; ++j) {
        sf.obj_coeffs[sf.var_col[j]] = p.c[j];
        if (sf.var_split[j]) sf.obj_coeffs[sf.var_col[j] + 1] = -p.c[j];
    }

    tab.set_objective(phase1);
    return sf;
}

bool run_phase1(StandardForm& sf, bool verbose) {
    Tableau& tab = sf.tab;
    if (tab.ncols == tab.n_real) return true;  // basis complete without artificials
    if (!tab.run(tab.ncols, verbose))
        throw SolverError("lp_solve: phase-1 simplex reported unbounded objective");
    double art_sum = 0.0;
    for (int i = 0; i < tab.m; ++i)
        if (tab.basis[i] >= tab.n_real) art_sum += tab.rhs(i);
    return art_sum <= kFeasTol;
}

void drive_out_artificials(StandardForm& sf) {
    Tableau& tab = sf.tab;
    for (int i = 0; i < tab.m; ++i) {
        if (tab.basis[i] < tab.n_real) continue;
        int col = -1;
        for (int j = 0; j < tab.n_real; ++j) {
            if (std::abs(tab.t[i][j]) > 1e-9) {
                col = j;
                break;
            }
        }
        if (col >= 0) tab.pivot(i, col);
        // all-zero row: redundant constraint, artificial stays basic at 0
    }
}

}  // namespace

void LpProblem::validate() const {
    if (n <= 0) throw ShapeError("LpProblem: no variables");
    if (static_cast<int>(c.size()) != n) throw ShapeError("LpProblem: objective length mismatch");
    if (a.rows() > 0 && a.cols() != n) throw ShapeError("LpProblem: inequality width mismatch");
    if (static_cast<int>(b.size()) != a.rows()) throw ShapeError("LpProblem: rhs length mismatch");
    if (e.rows() > 0 && e.cols() != n) throw ShapeError("LpProblem: equality width mismatch");
    if (static_cast<int>(d.size()) != e.rows()) throw ShapeError("LpProblem: rhs length mismatch");
    if (!nonneg.empty() && static_cast<int>(nonneg.size()) != n)
        throw ShapeError("LpProblem: bounds flag length mismatch");
    for (double v : c)
        if (!std::isfinite(v)) throw ContractError("LpProblem: non-finite objective");
    for (double v : a.data())
        if (!std::isfinite(v)) throw ContractError("LpProblem: non-finite coefficient");
    for (double v : e.data())
        if (!std::isfinite(v)) throw ContractError("LpProblem: non-finite coefficient");
    for (double v : b)
        if (!std::isfinite(v)) throw ContractError("LpProblem: non-finite rhs");
    for (double v : d)
        if (!std::isfinite(v)) throw ContractError("LpProblem: non-finite rhs");
}

LpSolution lp_solve(const LpProblem& problem, bool verbose) {
    StandardForm sf = build(problem);
    LpSolution sol;
    if (!run_phase1(sf, verbose)) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }
    drive_out_artificials(sf);

    Tableau& tab = sf.tab;
    tab.set_objective(sf.obj_coeffs);
    if (!tab.run(tab.n_real, verbose)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    Vec z(tab.ncols, 0.0);
    for (int i = 0; i < tab.m; ++i) z[tab.basis[i]] = tab.rhs(i);

    sol.status = LpStatus::Optimal;
    sol.is_vertex = true;
    sol.x.assign(problem.n, 0.0);
    for (int j = 0; j < problem.n; ++j) {
        sol.x[j] = z[sf.var_col[j]];
        if (sf.var_split[j]) sol.x[j] -= z[sf.var_col[j] + 1];
    }
    sol.objective_value = dot(sol.x, problem.c);

    // Dual recovery: solve B^T y = c_B on the unpivoted column data, then
    // undo the rhs sign normalization so multipliers match the input rows.
    const int m = tab.m;
    if (m > 0) {
        Matrix bt(m, m, 0.0);
        Vec cb(m, 0.0);
        for (int i = 0; i < m; ++i) {
            const int col = tab.basis[i];
            cb[i] = col < static_cast<int>(sf.obj_coeffs.size()) ? sf.obj_coeffs[col] : 0.0;
            for (int r = 0; r < m; ++r) bt(i, r) = sf.unpivoted[r][col];
        }
        try {
            Vec y = lu_solve(bt, cb, 1e-11);
            sol.dual_ineq.assign(sf.n_ineq, 0.0);
            sol.dual_eq.assign(sf.n_eq, 0.0);
            for (int r = 0; r < sf.n_ineq; ++r) sol.dual_ineq[r] = sf.row_sign[r] * y[r];
            for (int r = 0; r < sf.n_eq; ++r)
                sol.dual_eq[r] = sf.row_sign[sf.n_ineq + r] * y[sf.n_ineq + r];
        } catch (const SolverError&) {
            // degenerate final basis; duals stay empty
        }
    }
    return sol;
}

bool lp_feasible(const LpProblem& problem) {
    StandardForm sf = build(problem);
    return run_phase1(sf, false);
}

}  // namespace iirl
