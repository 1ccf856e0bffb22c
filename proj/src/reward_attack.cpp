#include "envpoison/reward_attack.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "envpoison/errors.hpp"
#include "envpoison/policy_eval.hpp"

namespace envpoison {

const char* to_string(AttackMode m) {
    switch (m) {
        case AttackMode::General: return "general";
        case AttackMode::NonTargetOnly: return "non-target";
        case AttackMode::Constructive: return "constructive";
        case AttackMode::GeneralPool: return "general-pool";
    }
    return "unknown";
}

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
    Eigen::VectorXd v(m.size());
    int k = 0;
    for (int s = 0; s < m.rows(); ++s)
        for (int a = 0; a < m.cols(); ++a) v[k++] = m(s, a);
    return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    int k = 0;
    for (int s = 0; s < rows; ++s)
        for (int a = 0; a < cols; ++a) m(s, a) = v[k++];
    return m;
}

// Guardrail slack: solutions bind their margin constraints exactly, and the
// solvers stop at ~1e-8, so deficits up to that order are expected.
constexpr double kVerifySlack = 1e-7;

void verify_robust(const Mdp& mdp_hat, const DetPolicy& target, double eps,
                   const char* which) {
    if (!is_eps_robust_optimal(mdp_hat, target, eps, kVerifySlack))
        throw SolverFailure(std::string(which) +
                            ": poisoned rewards fail the robust-optimality check");
}

}  // namespace

std::pair<double, double> reward_bounds(const Mdp& mdp, const DetPolicy& target,
                                        double eps, double p) {
    const Eigen::VectorXd chi = flatten(chi_table(mdp, target, eps));
    const double alpha = hajnal_alpha(mdp);
    return {0.5 * alpha * (chi.size() ? chi.lpNorm<Eigen::Infinity>() : 0.0),
            lp_norm(chi, p)};
}

RewardAttackResult attack_reward_general(const Mdp& mdp, const DetPolicy& target,
                                         double eps, double p) {
    if (eps < 0.0) throw DomainError("eps must be non-negative");
    check_policy(mdp, target);
    const int n = mdp.n_states(), m = mdp.n_actions();

    // Stationary weights of the target policy and of every single-state
    // deviation, all on the unmodified kernel: the kernel does not move, so
    // these weights stay exact for any reward table.
    const Eigen::VectorXd mu_t = stationary_distribution(mdp, target);
    std::vector<Eigen::VectorXd> mu_dev(size_t(n) * size_t(m));
    int n_rows = 0;
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (a == target(s)) continue;
            mu_dev[size_t(s * m + a)] = stationary_distribution(mdp, neighbor(target, s, a));
            ++n_rows;
        }

    // One row per deviation (s, a):  gain(target) - gain(deviation) >= eps,
    // linear in the reward variables.
    Polyhedron region = Polyhedron::free_region(n * m);
    region.a_in = Eigen::MatrixXd::Zero(n_rows, n * m);
    region.b_in.resize(n_rows);
    int row = 0;
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (a == target(s)) continue;
            const Eigen::VectorXd& mu_d = mu_dev[size_t(s * m + a)];
            for (int sp = 0; sp < n; ++sp) {
                region.a_in(row, sp * m + target(sp)) -= mu_t[sp];
                const int dev_action = (sp == s) ? a : target(sp);
                region.a_in(row, sp * m + dev_action) += mu_d[sp];
            }
            region.b_in[row] = -eps;
            ++row;
        }

    const Eigen::VectorXd base = flatten(mdp.rewards());
    const SolveReport rep = min_lp_norm_to_point(base, p, region);
    if (rep.status != SolveStatus::Optimal)
        throw SolverFailure(std::string("reward attack solve ended ") +
                            to_string(rep.status));

    RewardAttackResult res{mdp.with_rewards(unflatten(rep.x, n, m)),
                           lp_norm(rep.x - base, p),
                           0.0,
                           0.0,
                           p,
                           AttackMode::General,
                           rep.iterations};
    std::tie(res.lower_bound, res.upper_bound) = reward_bounds(mdp, target, eps, p);
    verify_robust(res.mdp_hat, target, eps, "reward attack");
    return res;
}

RewardAttackResult attack_reward_nontarget(const Mdp& mdp, const DetPolicy& target,
                                           double eps, double p) {
    if (eps < 0.0) throw DomainError("eps must be non-negative");
    check_policy(mdp, target);
    const Eigen::MatrixXd chi = chi_table(mdp, target, eps);
    RewardAttackResult res{mdp.with_rewards(mdp.rewards() - chi),
                           lp_norm(flatten(chi), p),
                           0.0,
                           0.0,
                           p,
                           AttackMode::NonTargetOnly,
                           0};
    std::tie(res.lower_bound, res.upper_bound) = reward_bounds(mdp, target, eps, p);
    verify_robust(res.mdp_hat, target, eps, "non-target reward attack");
    return res;
}

}  // namespace envpoison
