#include "envpoison/dynamics_attack.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "envpoison/errors.hpp"
#include "envpoison/linprog.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/rng.hpp"

namespace envpoison {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasSlack = 1e-9;

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
    Eigen::VectorXd v(m.size());
    int k = 0;
    for (int s = 0; s < m.rows(); ++s)
        for (int a = 0; a < m.cols(); ++a) v[k++] = m(s, a);
    return v;
}

// Solves the per-row programs of the restricted attack against `base`
// (whose kernel the delta floor and the row constraints reference) and
// returns the full poisoned kernel.
std::vector<Eigen::MatrixXd> solve_nontarget_rows(const Mdp& base, const ScoreTables& t) {
    const int n = base.n_states(), m = base.n_actions();
    const DetPolicy& target = t.target;
    std::vector<Eigen::MatrixXd> trans = base.trans();
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (a == target(s)) continue;
            const Eigen::VectorXd row = base.trans_row(s, a);

            Polyhedron region;
            region.lower = t.delta * row;
            region.upper = Eigen::VectorXd::Constant(n, 1.0);
            region.a_eq = Eigen::MatrixXd::Ones(1, n);
            region.b_eq = Eigen::VectorXd::Ones(1);
            region.a_in = t.u.row(s);
            region.b_in = Eigen::VectorXd::Constant(
                1, base.reward(s, target(s)) + t.b_next[s] - base.reward(s, a) - t.eps);

            const SolveReport rep = min_lp_norm_to_point(row, 1.0, region);
            if (rep.status != SolveStatus::Optimal)
                throw SolverFailure(std::string("dynamics row solve ended ") +
                                    to_string(rep.status));
            // The vertex satisfies the simplex equality to solver precision;
            // renormalizing keeps the Mdp constructor's exact tolerance.
            Eigen::VectorXd x = rep.x.cwiseMax(0.0);
            x /= x.sum();
            trans[size_t(a)].row(s) = x.transpose();
        }
    return trans;
}

Eigen::MatrixXd per_row_l1(const Mdp& original, const Mdp& poisoned) {
    const int n = original.n_states(), m = original.n_actions();
    Eigen::MatrixXd c(n, m);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a)
            c(s, a) = (poisoned.trans_row(s, a) - original.trans_row(s, a)).lpNorm<1>();
    return c;
}

// Attacks bind their margins exactly; allow roundoff of the solvers' order.
constexpr double kVerifySlack = 1e-7;

void verify_robust_dyn(const Mdp& mdp_hat, const DetPolicy& target, double eps,
                       const char* which) {
    if (!is_eps_robust_optimal(mdp_hat, target, eps, kVerifySlack))
        throw SolverFailure(std::string(which) +
                            ": poisoned kernel fails the robust-optimality check");
}

DynAttackResult finish_result(const Mdp& original, Mdp mdp_hat, const ScoreTables& t,
                              double p, AttackMode mode) {
    DynAttackResult res{std::move(mdp_hat), true, 0.0, Eigen::MatrixXd(), 0.0, 0.0, p, mode};
    res.per_row_cost = per_row_l1(original, res.mdp_hat);
    res.cost = lp_norm(flatten(res.per_row_cost), p);
    std::tie(res.lower_bound, res.upper_bound) = dynamics_bounds(t, p);
    return res;
}

}  // namespace

FeasibilityReport feasibility_from(const ScoreTables& t) {
    FeasibilityReport rep;
    rep.margins = t.c_feas;
    rep.feasible = true;
    for (int s = 0; s < t.c_feas.rows(); ++s)
        for (int a = 0; a < t.c_feas.cols(); ++a) {
            if (a == t.target(s)) continue;
            if (t.c_feas(s, a) < t.eps - kFeasSlack) rep.feasible = false;
        }
    return rep;
}

FeasibilityReport feasibility_table(const Mdp& mdp, const DetPolicy& target, double eps,
                                    double delta) {
    return feasibility_from(dyn_score_tables(mdp, target, eps, delta));
}

std::pair<double, double> dynamics_bounds(const ScoreTables& t, double p) {
    const double chi0_inf = t.chi0.size() ? flatten(t.chi0).lpNorm<Eigen::Infinity>() : 0.0;
    const double v_inf = t.target_stats.bias_v.lpNorm<Eigen::Infinity>();
    double lower;
    if (v_inf > 0.0)
        lower = 0.5 * t.delta * t.alpha * chi0_inf / v_inf;
    else
        lower = chi0_inf > 0.0 ? kInf : 0.0;
    const double upper =
        sufficient_condition(t) ? 2.0 * lp_norm(flatten(t.lambda), p) : kInf;
    return {lower, upper};
}

std::pair<double, double> dynamics_bounds(const Mdp& mdp, const DetPolicy& target,
                                          double eps, double delta, double p) {
    return dynamics_bounds(dyn_score_tables(mdp, target, eps, delta), p);
}

DynAttackResult attack_dynamics_nontarget(const Mdp& mdp, const DetPolicy& target,
                                          double eps, double delta, double p) {
    const ScoreTables t = dyn_score_tables(mdp, target, eps, delta);
    const FeasibilityReport feas = feasibility_from(t);
    if (!feas.feasible) {
        DynAttackResult res{mdp, false, std::numeric_limits<double>::quiet_NaN(),
                            Eigen::MatrixXd::Zero(mdp.n_states(), mdp.n_actions()),
                            0.0, 0.0, p, AttackMode::NonTargetOnly};
        std::tie(res.lower_bound, res.upper_bound) = dynamics_bounds(t, p);
        return res;
    }
    Mdp mdp_hat = mdp.with_trans(solve_nontarget_rows(mdp, t));
    DynAttackResult res = finish_result(mdp, std::move(mdp_hat), t, p,
                                        AttackMode::NonTargetOnly);
    verify_robust_dyn(res.mdp_hat, target, eps, "non-target dynamics attack");
    return res;
}

DynAttackResult attack_dynamics_constructive(const Mdp& mdp, const DetPolicy& target,
                                             double eps, double delta, double p) {
    const ScoreTables t = dyn_score_tables(mdp, target, eps, delta);
    if (!sufficient_condition(t))
        throw PreconditionFailed(
            "mixture attack needs beta slack >= eps * (1 + diameter) wherever chi > 0");

    const int n = mdp.n_states(), m = mdp.n_actions();
    int sink = 0;
    for (int s = 1; s < n; ++s)
        if (t.target_stats.bias_v[s] < t.target_stats.bias_v[sink]) sink = s;

    std::vector<Eigen::MatrixXd> trans = mdp.trans();
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (a == target(s)) continue;  // mixture branch reproduces the row
            const double lam = t.lambda(s, a);
            if (lam == 0.0) continue;
            const Eigen::VectorXd row = mdp.trans_row(s, a);
            Eigen::VectorXd shifted = delta * row;
            shifted[sink] += 1.0 - delta;
            trans[size_t(a)].row(s) = ((1.0 - lam) * row + lam * shifted).transpose();
        }
    Mdp mdp_hat = mdp.with_trans(std::move(trans));

    // Certificate: every poisoned row satisfies its value-pressure cap.
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (a == target(s)) continue;
            const double lhs = mdp_hat.trans_row(s, a).dot(t.u.row(s).transpose());
            const double rhs =
                mdp.reward(s, target(s)) + t.b_next[s] - mdp.reward(s, a) - t.eps;
            if (lhs > rhs + 1e-7)
                throw SolverFailure("mixture attack violates its row constraint");
        }

    DynAttackResult res = finish_result(mdp, std::move(mdp_hat), t, p,
                                        AttackMode::Constructive);
    verify_robust_dyn(res.mdp_hat, target, eps, "mixture dynamics attack");
    return res;
}

DynAttackResult attack_dynamics_general(const Mdp& mdp, const DetPolicy& target,
                                        double eps, double delta, double p,
                                        int pool_size, std::uint64_t seed) {
    if (pool_size < 1) throw DomainError("pool size must be at least 1");
    const ScoreTables base_tables = dyn_score_tables(mdp, target, eps, delta);
    const double rho_base = base_tables.target_stats.gain;
    const Eigen::VectorXd& v = base_tables.target_stats.bias_v;
    const int n = mdp.n_states();

    // Successors for the raised mass are drawn softmax-by-value so that
    // candidates push the target policy toward high-value states.
    Eigen::VectorXd soft(n);
    if (base_tables.v_span > 1e-12) {
        const double temp = 0.5 * base_tables.v_span;
        const double vmax = v.maxCoeff();
        for (int s = 0; s < n; ++s) soft[s] = std::exp((v[s] - vmax) / temp);
    } else {
        soft.setOnes();
    }

    CounterRng rng(seed);
    std::vector<std::vector<Eigen::MatrixXd>> pool;
    pool.push_back(mdp.trans());
    constexpr int kAttemptsPerSlot = 64;
    for (int k = 1; k < pool_size; ++k) {
        for (int attempt = 0; attempt < kAttemptsPerSlot; ++attempt) {
            const int s = rng.next_below(n);
            const double f = rng.uniform(0.0, 1.0 - delta);
            const int dest = rng.categorical(soft);
            std::vector<Eigen::MatrixXd> cand = mdp.trans();
            Eigen::VectorXd row = (1.0 - f) * mdp.trans_row(s, target(s));
            row[dest] += f;
            cand[size_t(target(s))].row(s) = row.transpose();
            try {
                const Mdp cand_mdp = mdp.with_trans(cand);
                if (!check_ergodic(cand_mdp, target)) continue;
                if (gain(cand_mdp, target) <= rho_base + 1e-12) continue;
            } catch (const SingularChain&) {
                continue;
            }
            pool.push_back(std::move(cand));
            break;
        }
    }

    std::optional<DynAttackResult> best;
    for (const auto& cand : pool) {
        Mdp base = mdp.with_trans(cand);
        std::optional<ScoreTables> t;
        try {
            t.emplace(dyn_score_tables(base, target, eps, delta));
        } catch (const SingularChain&) {
            continue;  // a deviation chain degenerated on this candidate
        }
        if (!feasibility_from(*t).feasible) continue;
        Mdp mdp_hat = base.with_trans(solve_nontarget_rows(base, *t));
        DynAttackResult res = finish_result(mdp, std::move(mdp_hat), base_tables, p,
                                            AttackMode::GeneralPool);
        if (!best || res.cost < best->cost) best = std::move(res);
    }
    if (!best)
        throw InfeasibleProblem("no pool candidate admits a feasible restricted attack");
    verify_robust_dyn(best->mdp_hat, target, eps, "pool dynamics attack");
    return *best;
}

}  // namespace envpoison
