#include "envpoison/score_tables.hpp"

#include <cmath>
#include <limits>

#include "envpoison/errors.hpp"

namespace envpoison {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd chi_table(const Mdp& mdp, const DetPolicy& target, double eps) {
    if (eps < 0.0) throw DomainError("eps must be non-negative");
    check_policy(mdp, target);
    const int n = mdp.n_states(), m = mdp.n_actions();
    const double rho_target = gain(mdp, target);
    Eigen::MatrixXd chi = Eigen::MatrixXd::Zero(n, m);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (a == target(s)) continue;
            const DetPolicy dev = neighbor(target, s, a);
            const Eigen::VectorXd mu = stationary_distribution(mdp, dev);
            const double rho_dev = mu.dot(mdp.policy_reward(dev));
            chi(s, a) = std::max(0.0, (rho_dev - rho_target + eps) / mu[s]);
        }
    return chi;
}

double mu_max_over_deviations(const Mdp& mdp, const DetPolicy& target) {
    double mu_max = 0.0;
    for (int s = 0; s < mdp.n_states(); ++s)
        for (int a = 0; a < mdp.n_actions(); ++a) {
            const Eigen::VectorXd mu = stationary_distribution(mdp, neighbor(target, s, a));
            mu_max = std::max(mu_max, mu[s]);
        }
    return mu_max;
}

ScoreTables dyn_score_tables(const Mdp& mdp, const DetPolicy& target, double eps,
                             double delta) {
    if (eps < 0.0) throw DomainError("eps must be non-negative");
    if (delta < 0.0 || delta > 1.0) throw DomainError("delta must lie in [0, 1]");
    check_policy(mdp, target);
    const int n = mdp.n_states(), m = mdp.n_actions();

    ScoreTables t;
    t.target = target;
    t.eps = eps;
    t.delta = delta;
    t.target_stats = evaluate_policy(mdp, target);
    t.chi = chi_table(mdp, target, eps);
    t.chi0 = chi_table(mdp, target, 0.0);
    t.hitting = hitting_times(mdp, target);
    t.diameter = diameter_of(t.hitting);
    t.alpha = hajnal_alpha(mdp);
    t.mu_max = mu_max_over_deviations(mdp, target);

    const Eigen::VectorXd& v = t.target_stats.bias_v;
    t.v_min = v.minCoeff();
    t.v_span = v.maxCoeff() - t.v_min;
    t.b_next.resize(n);
    for (int s = 0; s < n; ++s) t.b_next[s] = mdp.trans_row(s, target(s)).dot(v);

    t.u.resize(n, n);
    for (int s = 0; s < n; ++s)
        for (int sp = 0; sp < n; ++sp)
            t.u(s, sp) = v[sp] + (sp == s ? 0.0 : eps * t.hitting(sp, s));

    t.beta.resize(n, m);
    t.lambda = Eigen::MatrixXd::Zero(n, m);
    t.lambda_raw = Eigen::MatrixXd::Zero(n, m);
    t.c_feas.resize(n, m);
    const double need = eps * (1.0 + t.diameter);
    for (int s = 0; s < n; ++s) {
        const double head = mdp.reward(s, target(s)) + t.b_next[s];
        for (int a = 0; a < m; ++a) {
            t.beta(s, a) = mdp.reward(s, target(s)) - mdp.reward(s, a) + t.b_next[s] -
                           t.v_min - delta * t.v_span;
            if (a == target(s)) {
                t.c_feas(s, a) = kInf;
                continue;
            }
            const Eigen::VectorXd row = mdp.trans_row(s, a);
            t.c_feas(s, a) = head - mdp.reward(s, a) -
                             (1.0 - delta) * t.u.row(s).minCoeff() -
                             delta * row.dot(t.u.row(s).transpose());
            if (t.chi(s, a) > 0.0) {
                const double denom = t.chi0(s, a) + t.beta(s, a);
                const double num = t.chi0(s, a) + need;
                t.lambda_raw(s, a) = denom > 0.0 ? num / denom : kInf;
                t.lambda(s, a) = std::clamp(t.lambda_raw(s, a), 0.0, 1.0);
            }
        }
    }
    return t;
}

bool sufficient_condition(const ScoreTables& t) {
    // chi vanishes on target actions, so they never trip the test.
    const double need = t.eps * (1.0 + t.diameter);
    for (int s = 0; s < t.beta.rows(); ++s)
        for (int a = 0; a < t.beta.cols(); ++a)
            if (t.chi(s, a) > 0.0 && t.beta(s, a) < need) return false;
    return true;
}

double k_bound(double regret, double eps, double mu_max, double v_inf) {
    if (eps <= 0.0) throw DomainError("eps must be positive for the steps bound");
    if (mu_max <= 0.0 || mu_max > 1.0) throw DomainError("mu_max must lie in (0, 1]");
    return (mu_max / eps) * (regret + 2.0 * v_inf);
}

}  // namespace envpoison
