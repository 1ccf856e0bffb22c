#include "envpoison/linprog.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "envpoison/errors.hpp"

namespace envpoison {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhase1Tol = 1e-9;    // infeasible iff phase-1 optimum above this
constexpr double kReducedTol = 1e-9;   // dual feasibility tolerance
constexpr double kPivotEps = 1e-10;    // entries below this never pivot
constexpr long kMaxPivots = 100000;
constexpr int kDegenerateStreak = 64;  // switch to Bland after this many stalled pivots

constexpr double kDykstraTol = 1e-8;
constexpr long kDykstraCap = 200000;

// Tableau simplex over  min c.y  s.t.  T y = rhs, y >= 0  with an initial
// basis of slacks and artificials.  Columns at index >= first_locked never
// enter the basis (used to retire artificials in phase 2).
struct Tableau {
    Eigen::MatrixXd t;          // m x n_cols
    Eigen::VectorXd rhs;        // m, kept non-negative
    std::vector<int> basis;     // column basic in each row
    long pivots = 0;

    int rows() const { return int(t.rows()); }
    int cols() const { return int(t.cols()); }

    void pivot(int r, int j) {
        const double piv = t(r, j);
        t.row(r) /= piv;
        rhs[r] /= piv;
        t(r, j) = 1.0;  // cancels roundoff on the pivot element
        for (int i = 0; i < rows(); ++i) {
            if (i == r) continue;
            const double f = t(i, j);
            if (f == 0.0) continue;
            t.row(i) -= f * t.row(r);
            rhs[i] -= f * rhs[r];
            t(i, j) = 0.0;
        }
        if (rhs[r] < 0.0 && rhs[r] > -kPhase1Tol) rhs[r] = 0.0;
        basis[size_t(r)] = j;
        ++pivots;
    }

    // Runs the simplex for objective `cost` (length n_cols).  Returns
    // Optimal, Unbounded or NoConvergence.
    SolveStatus run(const Eigen::VectorXd& cost, int first_locked) {
        int stalled = 0;
        double prev_obj = objective(cost);
        while (pivots < kMaxPivots) {
            Eigen::VectorXd cb(rows());
            for (int i = 0; i < rows(); ++i) cb[i] = cost[basis[size_t(i)]];
            const Eigen::VectorXd reduced = cost - t.transpose() * cb;

            int enter = -1;
            if (stalled < kDegenerateStreak) {
                double best = -kReducedTol;
                for (int j = 0; j < first_locked; ++j)
                    if (reduced[j] < best) {
                        best = reduced[j];
                        enter = j;
                    }
            } else {
                for (int j = 0; j < first_locked; ++j)
                    if (reduced[j] < -kReducedTol) {
                        enter = j;
                        break;
                    }
            }
            if (enter < 0) return SolveStatus::Optimal;

            int leave = -1;
            double best_ratio = kInf;
            for (int i = 0; i < rows(); ++i) {
                if (t(i, enter) <= kPivotEps) continue;
                const double ratio = rhs[i] / t(i, enter);
                if (ratio < best_ratio - kPivotEps ||
                    (ratio < best_ratio + kPivotEps &&
                     (leave < 0 || basis[size_t(i)] < basis[size_t(leave)]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return SolveStatus::Unbounded;

            pivot(leave, enter);
            const double obj = objective(cost);
            stalled = (obj < prev_obj - 1e-12) ? 0 : stalled + 1;
            prev_obj = obj;
        }
        return SolveStatus::NoConvergence;
    }

    double objective(const Eigen::VectorXd& cost) const {
        double v = 0.0;
        for (int i = 0; i < rows(); ++i) v += cost[basis[size_t(i)]] * rhs[i];
        return v;
    }

    Eigen::VectorXd solution(int n) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(cols());
        for (int i = 0; i < rows(); ++i) y[basis[size_t(i)]] = rhs[i];
        return y.head(n);
    }
};

// Mapping from a bounded variable to its standard-form encoding.
struct VarMap {
    int col = -1;         // primary standard column
    int neg_col = -1;     // second column of a free split
    double shift = 0.0;   // x = shift + y  (or shift - y when mirrored)
    bool mirrored = false;
};

}  // namespace

Polyhedron Polyhedron::free_region(int n) {
    Polyhedron r;
    r.a_eq.resize(0, n);
    r.b_eq.resize(0);
    r.a_in.resize(0, n);
    r.b_in.resize(0);
    r.lower = Eigen::VectorXd::Constant(n, -kInf);
    r.upper = Eigen::VectorXd::Constant(n, kInf);
    return r;
}

double Polyhedron::violation(const Eigen::VectorXd& x) const {
    double v = 0.0;
    if (a_eq.rows() > 0) v = (a_eq * x - b_eq).cwiseAbs().maxCoeff();
    if (a_in.rows() > 0) v = std::max(v, (a_in * x - b_in).maxCoeff());
    for (int j = 0; j < x.size(); ++j) {
        v = std::max(v, lower[j] - x[j]);
        v = std::max(v, x[j] - upper[j]);
    }
    return std::max(v, 0.0);
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::NoConvergence: return "no-convergence";
    }
    return "unknown";
}

double lp_norm(const Eigen::VectorXd& v, double p) {
    if (p == 1.0) return v.lpNorm<1>();
    if (p == 2.0) return v.lpNorm<2>();
    if (std::isinf(p)) return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
    throw DomainError("norm order must be 1, 2 or inf");
}

SolveReport solve_lp(const LinearProgram& lp) {
    const int n = lp.region.dim();
    if (lp.c.size() != n) throw DomainError("objective length != variable count");

    // Standard-form encoding: shift finite lower bounds to zero, mirror
    // upper-bounded-only variables, split free variables.
    std::vector<VarMap> vmap(static_cast<std::size_t>(n));
    int n_std = 0;
    std::vector<int> ub_rows;  // variables needing an explicit upper-bound row
    for (int j = 0; j < n; ++j) {
        const double lo = lp.region.lower[j], hi = lp.region.upper[j];
        if (lo > hi) throw DomainError("variable bounds cross");
        VarMap& m = vmap[size_t(j)];
        if (std::isfinite(lo)) {
            m.col = n_std++;
            m.shift = lo;
            if (std::isfinite(hi)) ub_rows.push_back(j);
        } else if (std::isfinite(hi)) {
            m.col = n_std++;
            m.shift = hi;
            m.mirrored = true;
        } else {
            m.col = n_std++;
            m.neg_col = n_std++;
        }
    }

    const int m_eq = int(lp.region.a_eq.rows());
    const int m_in = int(lp.region.a_in.rows());
    const int m_ub = int(ub_rows.size());
    const int m_rows = m_eq + m_in + m_ub;

    // Rows in standard variables: [A_eq; A_in; upper-bound rows] y (=, <=) b'.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_rows, n_std);
    Eigen::VectorXd b(m_rows);
    auto emit_row = [&](int row, const Eigen::RowVectorXd& coef, double rhs_val) {
        double shift_correction = 0.0;
        for (int j = 0; j < n; ++j) {
            const VarMap& m = vmap[size_t(j)];
            const double c = coef[j];
            if (c == 0.0) continue;
            shift_correction += c * m.shift;
            A(row, m.col) = m.mirrored ? -c : c;
            if (m.neg_col >= 0) A(row, m.neg_col) = -c;
        }
        b[row] = rhs_val - shift_correction;
    };
    for (int i = 0; i < m_eq; ++i) emit_row(i, lp.region.a_eq.row(i), lp.region.b_eq[i]);
    for (int i = 0; i < m_in; ++i) emit_row(m_eq + i, lp.region.a_in.row(i), lp.region.b_in[i]);
    for (int k = 0; k < m_ub; ++k) {
        const int j = ub_rows[size_t(k)];
        Eigen::RowVectorXd coef = Eigen::RowVectorXd::Zero(n);
        coef[j] = 1.0;
        emit_row(m_eq + m_in + k, coef, lp.region.upper[j]);
    }

    // Objective on standard variables.
    Eigen::VectorXd c_std = Eigen::VectorXd::Zero(n_std);
    double obj_shift = 0.0;
    for (int j = 0; j < n; ++j) {
        const VarMap& m = vmap[size_t(j)];
        obj_shift += lp.c[j] * m.shift;
        c_std[m.col] = m.mirrored ? -lp.c[j] : lp.c[j];
        if (m.neg_col >= 0) c_std[m.neg_col] = -lp.c[j];
    }

    // Slack for every <= row, then one artificial per row that needs it.
    const int n_slack = m_in + m_ub;
    std::vector<bool> row_negated(size_t(m_rows), false);
    for (int i = 0; i < m_rows; ++i)
        if (b[i] < 0.0) {
            A.row(i) = -A.row(i);
            b[i] = -b[i];
            row_negated[size_t(i)] = true;
        }

    std::vector<int> art_rows;
    for (int i = 0; i < m_rows; ++i) {
        const bool has_unit_slack = i >= m_eq && !row_negated[size_t(i)];
        if (!has_unit_slack) art_rows.push_back(i);
    }
    const int n_art = int(art_rows.size());
    const int n_cols = n_std + n_slack + n_art;

    Tableau tab;
    tab.t = Eigen::MatrixXd::Zero(m_rows, n_cols);
    tab.t.leftCols(n_std) = A;
    tab.rhs = b;
    tab.basis.assign(size_t(m_rows), -1);
    for (int i = m_eq; i < m_rows; ++i) {
        const int sc = n_std + (i - m_eq);
        tab.t(i, sc) = row_negated[size_t(i)] ? -1.0 : 1.0;
        if (!row_negated[size_t(i)]) tab.basis[size_t(i)] = sc;
    }
    for (int k = 0; k < n_art; ++k) {
        const int i = art_rows[size_t(k)];
        tab.t(i, n_std + n_slack + k) = 1.0;
        tab.basis[size_t(i)] = n_std + n_slack + k;
    }

    SolveReport rep;
    auto finish = [&](SolveStatus st) {
        rep.status = st;
        rep.iterations = tab.pivots;
        return rep;
    };

    // Phase 1: minimize the artificial total.
    if (n_art > 0) {
        Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n_cols);
        c1.tail(n_art).setOnes();
        const SolveStatus st = tab.run(c1, n_cols);
        if (st != SolveStatus::Optimal) return finish(SolveStatus::NoConvergence);
        if (tab.objective(c1) > kPhase1Tol) return finish(SolveStatus::Infeasible);
        // Retire artificials still basic at zero level.
        for (int i = 0; i < m_rows; ++i) {
            if (tab.basis[size_t(i)] < n_std + n_slack) continue;
            for (int j = 0; j < n_std + n_slack; ++j)
                if (std::abs(tab.t(i, j)) > kPivotEps) {
                    tab.pivot(i, j);
                    break;
                }
        }
    }

    // Phase 2 on the true objective; artificial columns stay locked out.
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n_cols);
    c2.head(n_std) = c_std;
    const SolveStatus st = tab.run(c2, n_std + n_slack);
    if (st != SolveStatus::Optimal) return finish(st);

    const Eigen::VectorXd y = tab.solution(n_std);
    rep.x.resize(n);
    for (int j = 0; j < n; ++j) {
        const VarMap& m = vmap[size_t(j)];
        double v = m.mirrored ? m.shift - y[m.col] : m.shift + y[m.col];
        if (m.neg_col >= 0) v -= y[m.neg_col];
        rep.x[j] = v;
    }
    rep.objective = lp.c.dot(rep.x);
    rep.max_violation = lp.region.violation(rep.x);
    if (rep.max_violation > 1e-7) return finish(SolveStatus::NoConvergence);
    return finish(SolveStatus::Optimal);
}

namespace {

// Builds the LP epigraph encoding of  min ||x - base||_p  and maps the
// solution back to x-space.
SolveReport solve_norm_lp(const Eigen::VectorXd& base, double p, const Polyhedron& region) {
    const int n = region.dim();
    const bool is_inf = std::isinf(p);
    const int n_aux = is_inf ? 1 : n;

    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(n + n_aux);
    lp.c.tail(n_aux).setOnes();
    Polyhedron& r = lp.region;
    r.lower = Eigen::VectorXd::Constant(n + n_aux, -kInf);
    r.upper = Eigen::VectorXd::Constant(n + n_aux, kInf);
    r.lower.head(n) = region.lower;
    r.upper.head(n) = region.upper;
    r.lower.tail(n_aux).setZero();

    r.a_eq.resize(region.a_eq.rows(), n + n_aux);
    r.a_eq.setZero();
    r.a_eq.leftCols(n) = region.a_eq;
    r.b_eq = region.b_eq;

    const int m_in = int(region.a_in.rows());
    r.a_in = Eigen::MatrixXd::Zero(m_in + 2 * n, n + n_aux);
    r.b_in.resize(m_in + 2 * n);
    r.a_in.topLeftCorner(m_in, n) = region.a_in;
    r.b_in.head(m_in) = region.b_in;
    for (int j = 0; j < n; ++j) {
        const int t_col = n + (is_inf ? 0 : j);
        r.a_in(m_in + 2 * j, j) = 1.0;        //  x_j - t <= base_j
        r.a_in(m_in + 2 * j, t_col) = -1.0;
        r.b_in[m_in + 2 * j] = base[j];
        r.a_in(m_in + 2 * j + 1, j) = -1.0;   // -x_j - t <= -base_j
        r.a_in(m_in + 2 * j + 1, t_col) = -1.0;
        r.b_in[m_in + 2 * j + 1] = -base[j];
    }

    SolveReport rep = solve_lp(lp);
    if (rep.status == SolveStatus::Optimal) {
        rep.x = rep.x.head(n).eval();
        rep.objective = lp_norm(rep.x - base, p);
        rep.max_violation = region.violation(rep.x);
    }
    return rep;
}

}  // namespace

// Cyclic Dykstra projection of `base` onto the region (Euclidean metric).
// The region must be known feasible; an empty region ends in NoConvergence.
SolveReport project_dykstra(const Eigen::VectorXd& base, const Polyhedron& region) {
    const int n = region.dim();
    const int m_eq = int(region.a_eq.rows());
    const int m_in = int(region.a_in.rows());
    const int n_sets = m_eq + m_in + 1;  // + the bound box

    std::vector<Eigen::VectorXd> corr(size_t(n_sets), Eigen::VectorXd::Zero(n));
    Eigen::VectorXd x = base;
    Eigen::VectorXd x_prev_cycle = x;

    SolveReport rep;
    long cycle = 0;
    for (; cycle < kDykstraCap; ++cycle) {
        for (int k = 0; k < n_sets; ++k) {
            const Eigen::VectorXd y = x + corr[size_t(k)];
            Eigen::VectorXd proj;
            if (k < m_eq) {
                const Eigen::VectorXd a = region.a_eq.row(k).transpose();
                proj = y - ((a.dot(y) - region.b_eq[k]) / a.squaredNorm()) * a;
            } else if (k < m_eq + m_in) {
                const Eigen::VectorXd a = region.a_in.row(k - m_eq).transpose();
                const double gap = a.dot(y) - region.b_in[k - m_eq];
                proj = gap > 0.0 ? (y - (gap / a.squaredNorm()) * a).eval() : y;
            } else {
                proj = y.cwiseMax(region.lower).cwiseMin(region.upper);
            }
            corr[size_t(k)] = y - proj;
            x = proj;
        }
        const double moved = (x - x_prev_cycle).lpNorm<Eigen::Infinity>();
        x_prev_cycle = x;
        if (moved < kDykstraTol && region.violation(x) < kDykstraTol) break;
    }

    rep.iterations = cycle;
    rep.x = x;
    rep.objective = (x - base).norm();
    rep.max_violation = region.violation(x);

    // Residual: feasibility plus active-set consistency of the implicit
    // multipliers (every set carrying a correction must be tight at x).
    double kkt = rep.max_violation;
    for (int k = 0; k < n_sets; ++k) {
        if (corr[size_t(k)].norm() < 1e-10) continue;
        if (k < m_eq) {
            const Eigen::VectorXd a = region.a_eq.row(k).transpose();
            kkt = std::max(kkt, std::abs(a.dot(x) - region.b_eq[k]) / a.norm());
        } else if (k < m_eq + m_in) {
            const Eigen::VectorXd a = region.a_in.row(k - m_eq).transpose();
            kkt = std::max(kkt, std::abs(a.dot(x) - region.b_in[k - m_eq]) / a.norm());
        }
    }
    rep.kkt_residual = kkt;
    rep.status = cycle >= kDykstraCap ? SolveStatus::NoConvergence : SolveStatus::Optimal;
    return rep;
}

SolveReport min_lp_norm_to_point(const Eigen::VectorXd& base, double p,
                                 const Polyhedron& region) {
    if (base.size() != region.dim()) throw DomainError("base point dimension mismatch");
    if (p == 1.0 || std::isinf(p)) return solve_norm_lp(base, p, region);
    if (p != 2.0) throw DomainError("norm order must be 1, 2 or inf");

    // Feasibility first: Dykstra cannot certify an empty region.
    LinearProgram feas;
    feas.c = Eigen::VectorXd::Zero(region.dim());
    feas.region = region;
    SolveReport fr = solve_lp(feas);
    if (fr.status != SolveStatus::Optimal) return fr;
    return project_dykstra(base, region);
}

}  // namespace envpoison
