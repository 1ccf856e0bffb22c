#include <doctest.h>

#include <cmath>
#include <limits>

#include "envpoison/envs.hpp"
#include "envpoison/errors.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/score_tables.hpp"
#include "support/oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace envpoison;

namespace {

// Both actions share one kernel, so deviation chains reuse the target's
// stationary mass and the score has a closed form:
//   chi(s,a) = max(0, R(s,a) - R(s,pi(s)) + eps / mu(s)).
Mdp shared_kernel_mdp(double a, double b, const MatrixXd& rewards) {
    MatrixXd p(2, 2);
    p << 1 - a, a, b, 1 - b;
    return Mdp(rewards, {p, p});
}

}  // namespace

TEST_CASE("score closed form under a shared kernel") {
    const double a = 0.4, b = 0.2, eps = 0.3;
    MatrixXd rewards(2, 2);
    rewards << 1.0, 1.4, 0.5, -0.2;
    Mdp mdp = shared_kernel_mdp(a, b, rewards);
    DetPolicy target{{0, 0}};
    MatrixXd chi = chi_table(mdp, target, eps);

    const double mu0 = b / (a + b), mu1 = a / (a + b);
    CHECK(chi(0, 0) == 0.0);
    CHECK(chi(1, 0) == 0.0);
    CHECK(chi(0, 1) == doctest::Approx(0.4 + eps / mu0).epsilon(1e-10));
    CHECK(chi(1, 1) == doctest::Approx(std::max(0.0, -0.7 + eps / mu1)).epsilon(1e-10));
}

TEST_CASE("score vanishes whenever the target is dominant by a wide margin") {
    MatrixXd rewards(2, 2);
    rewards << 5.0, -5.0, 5.0, -5.0;
    Mdp mdp = shared_kernel_mdp(0.3, 0.3, rewards);
    MatrixXd chi = chi_table(mdp, DetPolicy{{0, 0}}, 0.5);
    CHECK(chi.maxCoeff() == 0.0);
}

TEST_CASE("score grows monotonically with the robustness margin") {
    oracle::TestRng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        Mdp mdp = oracle::random_ergodic_mdp(rng, 3, 2);
        DetPolicy target = oracle::random_policy(rng, 3, 2);
        MatrixXd lo = chi_table(mdp, target, 0.05);
        MatrixXd hi = chi_table(mdp, target, 0.4);
        CHECK(((hi - lo).array() >= -1e-12).all());
        CHECK((chi_table(mdp, target, 0.0).array() >= 0.0).all());
    }
}

TEST_CASE("subtracting the score pins every positive-score deviation at the margin") {
    oracle::TestRng rng(4242);
    for (int rep = 0; rep < 15; ++rep) {
        Mdp mdp = oracle::random_ergodic_mdp(rng, 3, 2);
        DetPolicy target = oracle::random_policy(rng, 3, 2);
        const double eps = 0.2;
        MatrixXd chi = chi_table(mdp, target, eps);
        Mdp hat = mdp.with_rewards(mdp.rewards() - chi);
        double rho = evaluate_policy(hat, target).gain;
        for (int s = 0; s < 3; ++s) {
            for (int a = 0; a < 2; ++a) {
                if (a == target(s)) continue;
                double rho_nbr = evaluate_policy(hat, neighbor(target, s, a)).gain;
                if (chi(s, a) > 0) {
                    CHECK(rho - rho_nbr == doctest::Approx(eps).epsilon(1e-9));
                } else {
                    CHECK(rho >= rho_nbr + eps - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("dynamics tables are internally consistent") {
    EnvSpec env = build_chain_env(-2.5);
    const double eps = 0.1, delta = 1e-4;
    ScoreTables t = dyn_score_tables(env.mdp, env.target, eps, delta);
    const int n = env.mdp.n_states();
    const PolicyStats& st = t.target_stats;

    CHECK(t.alpha == doctest::Approx(hajnal_alpha(env.mdp)));
    MatrixXd hits = hitting_times(env.mdp, env.target);
    CHECK((t.hitting - hits).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.diameter == doctest::Approx(diameter_of(hits)));
    CHECK(t.v_min == doctest::Approx(st.bias_v.minCoeff()));
    CHECK(t.v_span ==
          doctest::Approx(st.bias_v.maxCoeff() - st.bias_v.minCoeff()));

    for (int s = 0; s < n; ++s) {
        // Successor value along the target row.
        double b = env.mdp.trans_row(s, env.target(s)).dot(st.bias_v);
        CHECK(t.b_next[s] == doctest::Approx(b).epsilon(1e-12));
        for (int sp = 0; sp < n; ++sp) {
            double expect = st.bias_v[sp] + (sp == s ? 0.0 : eps * hits(sp, s));
            CHECK(t.u(s, sp) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < env.mdp.n_actions(); ++a) {
            if (a == env.target(s)) {
                CHECK(t.chi(s, a) == 0.0);
                CHECK(t.lambda(s, a) == 0.0);
                CHECK(std::isinf(t.c_feas(s, a)));
                continue;
            }
            double beta = env.mdp.reward(s, env.target(s)) - env.mdp.reward(s, a) +
                          t.b_next[s] - t.v_min - delta * t.v_span;
            CHECK(t.beta(s, a) == doctest::Approx(beta).epsilon(1e-10));
            CHECK(t.lambda(s, a) >= 0.0);
            CHECK(t.lambda(s, a) <= 1.0);
            if (t.chi(s, a) == 0.0) CHECK(t.lambda(s, a) == 0.0);

            double row_dot = env.mdp.trans_row(s, a).dot(t.u.row(s).transpose());
            double margin = env.mdp.reward(s, env.target(s)) + t.b_next[s] -
                            env.mdp.reward(s, a) -
                            (1 - delta) * t.u.row(s).minCoeff() - delta * row_dot;
            CHECK(t.c_feas(s, a) == doctest::Approx(margin).epsilon(1e-10));
        }
    }
}

TEST_CASE("sufficient condition flips from true to false as the margin grows") {
    EnvSpec env = build_chain_env(-2.5);
    ScoreTables small = dyn_score_tables(env.mdp, env.target, 0.01, 1e-4);
    ScoreTables large = dyn_score_tables(env.mdp, env.target, 5.0, 1e-4);
    CHECK(sufficient_condition(small));
    CHECK_FALSE(sufficient_condition(large));
}

TEST_CASE("sample-size bound arithmetic and guards") {
    CHECK(k_bound(10.0, 0.5, 0.25, 3.0) == doctest::Approx(0.5 * 16.0));
    CHECK(k_bound(0.0, 1.0, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(k_bound(1.0, 0.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(k_bound(1.0, 0.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(k_bound(1.0, 0.5, 1.5, 1.0), DomainError);
}

TEST_CASE("largest deviation mass is a probability and matches direct evaluation") {
    EnvSpec env = build_chain_env(-2.5);
    double mu_max = mu_max_over_deviations(env.mdp, env.target);
    CHECK(mu_max > 0.0);
    CHECK(mu_max <= 1.0);

    double direct = 0.0;
    for (int s = 0; s < env.mdp.n_states(); ++s)
        for (int a = 0; a < env.mdp.n_actions(); ++a) {
            VectorXd mu = stationary_distribution(
                env.mdp.policy_kernel(neighbor(env.target, s, a)));
            direct = std::max(direct, mu[s]);
        }
    CHECK(mu_max == doctest::Approx(direct).epsilon(1e-12));
}
