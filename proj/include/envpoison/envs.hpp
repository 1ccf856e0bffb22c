#pragma once

#include <string>
#include <vector>

#include "envpoison/mdp.hpp"

namespace envpoison {

// A benchmark environment: the MDP plus the policy an attacker wants to
// force on it.
struct EnvSpec {
    Mdp mdp;
    DetPolicy target;
    std::string name;
};

// Noise weight shared by the benchmark environments: each transition row is
// 0.9 * deterministic move + 0.1 * uniform over all states.
inline constexpr double kEnvNoise = 0.1;

// Linear chain of n states with actions {0: step left, 1: step right},
// self-looping at the ends.  Rewards are action independent: `r_first` on
// state 0, -0.5 on the last state, 0.5 in between.  The last state sits at
// the left end, behind state 0; walking right from state 0 traverses
// states 1..n-2 in order.  The canonical target policy walks right
// everywhere, away from the penalty cell.  n = 4 reproduces the standard
// 4-state instance.
EnvSpec build_chain_env(double r_first, int n = 4);

// Nine-state navigation task with actions {0: back, 1: forward} along a
// directed tour of the states.  Rewards are action independent:
// r_first on state 0, -2.5 on states 1..3, 1.0 on states 4..5, 0 on 6..8.
// The canonical target follows the tour forward.  The tour is configurable:
// `forward[s]` / `backward[s]` name the deterministic successors (defaults:
// +1 / -1 modulo 9).
EnvSpec build_grid_env(double r_first, const std::vector<int>& forward = {},
                       const std::vector<int>& backward = {});

}  // namespace envpoison
