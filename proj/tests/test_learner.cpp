#include <doctest.h>

#include <cmath>

#include "envpoison/envs.hpp"
#include "envpoison/learner.hpp"
#include "envpoison/online_sim.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/rng.hpp"
#include "support/oracles.hpp"

using namespace envpoison;

TEST_CASE("fresh learner breaks ties toward the lowest action index") {
    UcrlLearner learner(3, 2);
    for (int s = 0; s < 3; ++s) CHECK(learner.act(s) == 0);
    CHECK(learner.total_steps() == 0);
}

TEST_CASE("episodes follow the visit-doubling schedule") {
    UcrlLearner learner(2, 2);
    long before = learner.episodes();
    learner.observe(0, 0, 0.5, 1);
    CHECK(learner.episodes() > before);

    // Pound a single pair; episode count grows about logarithmically.
    for (int t = 0; t < 4096; ++t) learner.observe(0, 0, 0.5, 0);
    CHECK(learner.episodes() < 40);
    CHECK(learner.total_steps() == 4097);
}

TEST_CASE("optimistic gain estimate stays above the true optimum") {
    EnvSpec env = build_chain_env(-2.5);
    UcrlLearner learner(env.mdp.n_states(), env.mdp.n_actions());
    run_online(env.mdp, env.mdp, PoisonMode::None, env.target, learner, 5000, 99);

    double rho_star = evaluate_policy(env.mdp, optimal_policy(env.mdp)).gain;
    double slack = 1.0 / std::sqrt(double(learner.total_steps()));
    CHECK(learner.optimistic_gain_lo() >= rho_star - slack - 1e-6);
}

namespace {

// Acts uniformly at random while streaming the experience into a planner.
class UniformFeed : public Learner {
  public:
    UniformFeed(UcrlLearner& brain, int n_actions, std::uint64_t seed)
        : brain_(brain), actor_(n_actions, seed) {}
    int act(int state) override { return actor_.act(state); }
    void observe(int s, int a, double r, int s_next) override {
        brain_.observe(s, a, r, s_next);
    }

  private:
    UcrlLearner& brain_;
    UniformRandomLearner actor_;
};

}  // namespace

TEST_CASE("narrowed confidence intervals settle on the optimal policy") {
    // Once every pair has plenty of data, shrunken bonuses leave the greedy
    // policy equal to the true optimum on a small chain.
    EnvSpec env = build_chain_env(2.5);
    UcrlConfig cfg;
    cfg.bonus_scale = 0.05;
    UcrlLearner learner(env.mdp.n_states(), env.mdp.n_actions(), cfg);
    UniformFeed feed(learner, env.mdp.n_actions(), 17);
    run_online(env.mdp, env.mdp, PoisonMode::None, env.target, feed, 60000, 3);

    DetPolicy star = optimal_policy(env.mdp);
    CHECK(learner.policy() == star);
}

TEST_CASE("uniform learner ignores feedback and spreads its choices") {
    UniformRandomLearner learner(3, 12345);
    std::vector<long> counts(3, 0);
    for (int t = 0; t < 90000; ++t) ++counts[std::size_t(learner.act(t % 5))];
    for (long c : counts) CHECK(std::abs(c - 30000L) < 600);  // ~4 sigma

    UniformRandomLearner twin_a(3, 777);
    UniformRandomLearner twin_b(3, 777);
    for (int t = 0; t < 200; ++t) {
        int a = twin_a.act(0);
        CHECK(a == twin_b.act(0));
        twin_a.observe(0, a, 0.0, 0);  // must not disturb the stream
    }
}
