#pragma once

#include <cstdint>
#include <utility>

#include "envpoison/mdp.hpp"
#include "envpoison/reward_attack.hpp"
#include "envpoison/score_tables.hpp"

namespace envpoison {

// Analytic feasibility margins for the non-target dynamics attack.  The
// restricted attack is solvable iff every non-target margin is at least eps
// (up to 1e-9 slack); target-action entries are +inf and never bind.
struct FeasibilityReport {
    Eigen::MatrixXd margins;
    bool feasible = false;
};

FeasibilityReport feasibility_table(const Mdp& mdp, const DetPolicy& target,
                                    double eps, double delta);
FeasibilityReport feasibility_from(const ScoreTables& tables);

// Result of a dynamics-side attack.  Rewards stay untouched; p_hat keeps
// at least delta * P of every original transition probability.
// per_row_cost(s, a) is the l1 distance between the (s, a) rows of p_hat
// and the original kernel; cost aggregates those distances in ||.||_p.
// When feasible is false the kernel is returned unchanged and cost is NaN.
struct DynAttackResult {
    Mdp mdp_hat;
    bool feasible = false;
    double cost = 0.0;
    Eigen::MatrixXd per_row_cost;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double p = 0.0;
    AttackMode mode = AttackMode::NonTargetOnly;
};

// Cheapest kernel leaving target-action rows untouched.  Rows decouple into
// |S|-variable linear programs, so one solve serves every outer p.
DynAttackResult attack_dynamics_nontarget(const Mdp& mdp, const DetPolicy& target,
                                          double eps, double delta, double p);

// Closed-form mixture attack toward the lowest-value state.  Requires the
// per-(s, a) slack certificate (sufficient_condition); per-row cost is at
// most 2 * lambda(s, a).
DynAttackResult attack_dynamics_constructive(const Mdp& mdp, const DetPolicy& target,
                                             double eps, double delta,
                                             double p = std::numeric_limits<double>::infinity());

// Pool heuristic for the unrestricted attack: perturbs target rows to raise
// the target policy's gain, re-solves the restricted attack on each
// candidate, and keeps the cheapest kernel measured against the original.
// Candidate 0 is always the unmodified kernel.  Throws InfeasibleProblem
// when no candidate admits a feasible restricted attack.
DynAttackResult attack_dynamics_general(const Mdp& mdp, const DetPolicy& target,
                                        double eps, double delta, double p,
                                        int pool_size, std::uint64_t seed);

// (lower, upper) bounds for dynamics attack cost:
// delta * alpha / 2 * ||chi0||_inf / ||v||_inf  <=  cost  <=  2 ||lambda||_p.
// The upper bound is +inf when the slack certificate fails; the lower bound
// is +inf when v == 0 yet a correction is required (0 when neither needs
// anything).
std::pair<double, double> dynamics_bounds(const ScoreTables& tables, double p);
std::pair<double, double> dynamics_bounds(const Mdp& mdp, const DetPolicy& target,
                                          double eps, double delta, double p);

}  // namespace envpoison
