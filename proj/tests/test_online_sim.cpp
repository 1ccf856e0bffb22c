#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "envpoison/envs.hpp"
#include "envpoison/errors.hpp"
#include "envpoison/online_sim.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/reward_attack.hpp"
#include "support/oracles.hpp"

using namespace envpoison;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Plays a fixed policy regardless of feedback.
class ScriptedLearner : public Learner {
  public:
    explicit ScriptedLearner(DetPolicy pi) : pi_(std::move(pi)) {}
    int act(int state) override { return pi_(state); }
    void observe(int, int, double, int) override {}

  private:
    DetPolicy pi_;
};

}  // namespace

TEST_CASE("reward poisoning shows poisoned rewards on true transitions") {
    EnvSpec env = build_chain_env(-2.5);
    const double eps = 0.1;
    RewardAttackResult attack = attack_reward_nontarget(env.mdp, env.target, eps, kInf);

    UniformRandomLearner learner(env.mdp.n_actions(), 5);
    OnlineTrace trace = run_online(env.mdp, attack.mdp_hat, PoisonMode::Reward,
                                   env.target, learner, 3000, 21);
    REQUIRE(trace.length() == 3000);
    CHECK(trace.mode == PoisonMode::Reward);

    for (const OnlineStep& step : trace.steps) {
        CHECK(step.reward ==
              doctest::Approx(attack.mdp_hat.reward(step.state, step.action)));
        double expected_manip = std::abs(attack.mdp_hat.reward(step.state, step.action) -
                                         env.mdp.reward(step.state, step.action));
        CHECK(step.manipulation == doctest::Approx(expected_manip));
        CHECK(step.miss == (step.action != env.target(step.state)));
        if (step.action == env.target(step.state)) CHECK(step.manipulation == 0.0);
    }
}

TEST_CASE("unpoisoned runs record zero manipulation everywhere") {
    EnvSpec env = build_chain_env(-2.5);
    UniformRandomLearner learner(env.mdp.n_actions(), 6);
    OnlineTrace trace = run_online(env.mdp, env.mdp, PoisonMode::None, env.target,
                                   learner, 500, 4);
    for (const OnlineStep& step : trace.steps) CHECK(step.manipulation == 0.0);
    CHECK(avg_cost(trace, 1.0, trace.length()) == 0.0);
    CHECK(avg_cost(trace, 0.0, trace.length()) == 0.0);
}

TEST_CASE("identical seeds reproduce the trace step for step") {
    EnvSpec env = build_chain_env(-2.5);
    UniformRandomLearner a(env.mdp.n_actions(), 9);
    UniformRandomLearner b(env.mdp.n_actions(), 9);
    OnlineTrace ta =
        run_online(env.mdp, env.mdp, PoisonMode::None, env.target, a, 400, 77);
    OnlineTrace tb =
        run_online(env.mdp, env.mdp, PoisonMode::None, env.target, b, 400, 77);
    for (long t = 0; t < 400; ++t) {
        CHECK(ta.steps[std::size_t(t)].state == tb.steps[std::size_t(t)].state);
        CHECK(ta.steps[std::size_t(t)].action == tb.steps[std::size_t(t)].action);
        CHECK(ta.steps[std::size_t(t)].next_state == tb.steps[std::size_t(t)].next_state);
    }
}

TEST_CASE("averaging formulas on a hand-built trace") {
    OnlineTrace trace;
    trace.mode = PoisonMode::Reward;
    auto add = [&](bool miss, double manip) {
        trace.steps.push_back({0, 0, 0.0, 0, miss, manip});
    };
    add(true, 3.0);
    add(false, 0.0);
    add(true, 4.0);
    add(false, 0.0);

    CHECK(avg_miss(trace, 4) == doctest::Approx(0.5));
    CHECK(avg_miss(trace, 2) == doctest::Approx(0.5));
    CHECK(avg_cost(trace, 1.0, 4) == doctest::Approx(7.0 / 4.0));
    CHECK(avg_cost(trace, 2.0, 4) == doctest::Approx(5.0 / 4.0));
    CHECK(avg_cost(trace, kInf, 4) == doctest::Approx(1.0));
    CHECK(avg_cost(trace, 0.0, 4) == doctest::Approx(0.5));
    CHECK_THROWS_AS(avg_cost(trace, 0.5, 4), DomainError);
    CHECK_THROWS_AS(avg_miss(trace, 0), DomainError);
    CHECK_THROWS_AS(avg_miss(trace, 5), DomainError);
}

TEST_CASE("regret of the optimal policy stays sublinear") {
    EnvSpec env = build_chain_env(-2.5);
    ScriptedLearner learner(optimal_policy(env.mdp));
    OnlineTrace trace = run_online(env.mdp, env.mdp, PoisonMode::None, env.target,
                                   learner, 100000, 11);
    double regret = empirical_regret(trace, env.mdp, trace.length());
    CHECK(std::abs(regret) / double(trace.length()) < 0.05);
}

TEST_CASE("bound helper composes the pieces it is given") {
    EnvSpec env = build_chain_env(-2.5);
    const double eps = 0.1;
    OnlineBounds b = theoretical_bounds(500.0, env.mdp, env.mdp, env.target, eps, 1e-4,
                                        PoisonMode::Reward, 1.0, 10000);
    PolicyStats st = evaluate_policy(env.mdp, env.target);
    double v_inf = st.bias_v.cwiseAbs().maxCoeff();
    double mu_max = mu_max_over_deviations(env.mdp, env.target);
    double k = (mu_max / eps) * (500.0 + 2.0 * v_inf);
    CHECK(b.k == doctest::Approx(k).epsilon(1e-12));
    CHECK(b.miss_bound == doctest::Approx(k / 10000.0).epsilon(1e-12));

    double chi_max = chi_table(env.mdp, env.target, eps).maxCoeff();
    CHECK(b.cost_bound == doctest::Approx(chi_max * k / 10000.0).epsilon(1e-10));

    OnlineBounds b0 = theoretical_bounds(500.0, env.mdp, env.mdp, env.target, eps, 1e-4,
                                         PoisonMode::Reward, 0.0, 10000);
    CHECK(b0.cost_bound == doctest::Approx(k / 10000.0).epsilon(1e-12));
    OnlineBounds binf = theoretical_bounds(500.0, env.mdp, env.mdp, env.target, eps,
                                           1e-4, PoisonMode::Reward, kInf, 10000);
    CHECK(binf.cost_bound == doctest::Approx(chi_max / 10000.0).epsilon(1e-12));
}

TEST_CASE("trace export keeps the cadence and stays deterministic") {
    EnvSpec env = build_chain_env(-2.5);
    UniformRandomLearner learner(env.mdp.n_actions(), 2);
    OnlineTrace trace = run_online(env.mdp, env.mdp, PoisonMode::None, env.target,
                                   learner, 2500, 3);
    std::ostringstream first;
    write_trace_csv(trace, first, 1000);
    std::string text = first.str();
    CHECK(text.rfind("t,state,action,reward,mismatch,manipulation,", 0) == 0);

    // Rows at t = 1000, 2000, and the final step, plus the header.
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 4);

    std::ostringstream second;
    write_trace_csv(trace, second, 1000);
    CHECK(second.str() == text);
}

TEST_CASE("mismatched shapes and bad starts are rejected up front") {
    EnvSpec env = build_chain_env(-2.5);
    UniformRandomLearner learner(env.mdp.n_actions(), 1);
    EnvSpec other = build_chain_env(-2.5, 5);
    CHECK_THROWS_AS(run_online(env.mdp, other.mdp, PoisonMode::Reward, env.target,
                               learner, 10, 1),
                    DomainError);
    CHECK_THROWS_AS(run_online(env.mdp, env.mdp, PoisonMode::None, env.target, learner,
                               10, 1, 9),
                    DomainError);
    CHECK_THROWS_AS(run_online(env.mdp, env.mdp, PoisonMode::None, env.target, learner,
                               0, 1),
                    DomainError);
}
