#include <doctest.h>

#include "envpoison/envs.hpp"
#include "envpoison/errors.hpp"
#include "envpoison/policy_eval.hpp"
#include "support/oracles.hpp"

using Eigen::VectorXd;
using namespace envpoison;

TEST_CASE("chain layout: rewards, noise floor, and movement structure") {
    EnvSpec env = build_chain_env(-2.5);
    CHECK(env.name == "chain4");
    CHECK(env.mdp.n_states() == 4);
    CHECK(env.mdp.n_actions() == 2);
    CHECK(env.target.actions == std::vector<int>{1, 1, 1, 1});

    // Rewards depend on the state only.
    for (int s = 0; s < 4; ++s)
        CHECK(env.mdp.reward(s, 0) == env.mdp.reward(s, 1));
    CHECK(env.mdp.reward(0, 0) == -2.5);
    CHECK(env.mdp.reward(1, 0) == 0.5);
    CHECK(env.mdp.reward(2, 0) == 0.5);
    CHECK(env.mdp.reward(3, 0) == -0.5);

    // Right action from the middle: 0.9 forward plus uniform noise.
    VectorXd row = env.mdp.trans_row(1, 1);
    CHECK(row[2] == doctest::Approx(0.9 + 0.1 / 4));
    CHECK(row[0] == doctest::Approx(0.1 / 4));
    // The walk parks at the far right end.
    CHECK(env.mdp.trans_row(2, 1)[2] == doctest::Approx(0.9 + 0.1 / 4));
    // The penalty state sits behind the start: left from the start falls into
    // it, it self-loops under further lefts, and right climbs back out.
    CHECK(env.mdp.trans_row(0, 0)[3] == doctest::Approx(0.9 + 0.1 / 4));
    CHECK(env.mdp.trans_row(3, 0)[3] == doctest::Approx(0.9 + 0.1 / 4));
    CHECK(env.mdp.trans_row(3, 1)[0] == doctest::Approx(0.9 + 0.1 / 4));

    for (const DetPolicy& pi : oracle::all_policies(4, 2))
        CHECK(check_ergodic(env.mdp, pi));
}

TEST_CASE("chain length is configurable") {
    EnvSpec env = build_chain_env(0.0, 7);
    CHECK(env.name == "chain7");
    CHECK(env.mdp.n_states() == 7);
    CHECK(env.mdp.reward(6, 0) == -0.5);
    CHECK(env.mdp.reward(3, 1) == 0.5);
    CHECK(int(env.target.actions.size()) == 7);
    // Same shape at any length: the penalty state leads back to the start.
    CHECK(env.mdp.trans_row(6, 1)[0] == doctest::Approx(0.9 + 0.1 / 7));
    CHECK(env.mdp.trans_row(5, 1)[5] == doctest::Approx(0.9 + 0.1 / 7));

    EnvSpec big = build_chain_env(-2.5, 100);
    CHECK(big.mdp.n_states() == 100);
    CHECK(check_ergodic(big.mdp, big.target));

    CHECK_THROWS_AS(build_chain_env(0.0, 1), DomainError);
}

TEST_CASE("ring layout: rewards and the default tour") {
    EnvSpec env = build_grid_env(-2.5);
    CHECK(env.name == "grid9");
    CHECK(env.mdp.n_states() == 9);
    CHECK(env.mdp.reward(0, 0) == -2.5);
    for (int s = 1; s <= 3; ++s) CHECK(env.mdp.reward(s, 0) == -2.5);
    for (int s = 4; s <= 5; ++s) CHECK(env.mdp.reward(s, 0) == 1.0);
    for (int s = 6; s <= 8; ++s) CHECK(env.mdp.reward(s, 0) == 0.0);

    // Forward action advances around the ring, with wraparound.
    CHECK(env.mdp.trans_row(8, 1)[0] == doctest::Approx(0.9 + 0.1 / 9));
    CHECK(env.mdp.trans_row(0, 0)[8] == doctest::Approx(0.9 + 0.1 / 9));
    CHECK(env.target.actions == std::vector<int>(9, 1));

    for (const DetPolicy& pi :
         {env.target, DetPolicy{{0, 0, 0, 0, 0, 0, 0, 0, 0}}})
        CHECK(check_ergodic(env.mdp, pi));
}

TEST_CASE("ring adjacency can be rewired") {
    std::vector<int> forward = {2, 3, 4, 5, 6, 7, 8, 0, 1};   // skip one ahead
    std::vector<int> backward = {7, 8, 0, 1, 2, 3, 4, 5, 6};  // two back
    EnvSpec env = build_grid_env(0.0, forward, backward);
    CHECK(env.mdp.trans_row(0, 1)[2] == doctest::Approx(0.9 + 0.1 / 9));
    CHECK(env.mdp.trans_row(0, 0)[7] == doctest::Approx(0.9 + 0.1 / 9));

    CHECK_THROWS_AS(build_grid_env(0.0, {1, 2}, {}), DomainError);
    std::vector<int> bad = {9, 0, 1, 2, 3, 4, 5, 6, 7};
    CHECK_THROWS_AS(build_grid_env(0.0, bad, {}), DomainError);
}
