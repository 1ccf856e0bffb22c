#pragma once

#include <utility>

#include "envpoison/linprog.hpp"
#include "envpoison/mdp.hpp"
#include "envpoison/score_tables.hpp"

namespace envpoison {

enum class AttackMode { General, NonTargetOnly, Constructive, GeneralPool };

const char* to_string(AttackMode m);

// Result of a reward-side attack.  The returned MDP keeps the original
// kernel; only the reward table moves.  cost = || R_hat - R ||_p over all
// (s, a) entries.
struct RewardAttackResult {
    Mdp mdp_hat;
    double cost = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double p = 0.0;
    AttackMode mode = AttackMode::General;
    long solver_iterations = 0;
};

// Cheapest reward table (in ||.||_p) making `target` eps-robust optimal,
// with every reward entry free to move.  Always feasible; a non-optimal
// solver status or a failed post-hoc optimality check raises SolverFailure.
RewardAttackResult attack_reward_general(const Mdp& mdp, const DetPolicy& target,
                                         double eps, double p);

// Closed-form attack that leaves rewards on target actions untouched:
// R_hat = R - chi.  Optimal among attacks restricted that way, for every p.
RewardAttackResult attack_reward_nontarget(const Mdp& mdp, const DetPolicy& target,
                                           double eps, double p);

// (lower, upper) cost bounds for the unrestricted reward attack:
// alpha/2 * ||chi||_inf <= cost <= ||chi||_p.
std::pair<double, double> reward_bounds(const Mdp& mdp, const DetPolicy& target,
                                        double eps, double p);

}  // namespace envpoison
