#pragma once

#include <Eigen/Dense>

#include "envpoison/mdp.hpp"
#include "envpoison/policy_eval.hpp"

namespace envpoison {

// Per-(state, action) correction scores for steering gains toward a target
// policy.  chi(s, a) is the minimal reward drop making the (s, a) deviation
// lose by at least eps; rows of the target action are identically zero.
// Computed against the unmodified MDP.
Eigen::MatrixXd chi_table(const Mdp& mdp, const DetPolicy& target, double eps);

// Everything the dynamics-side attacks and certificates consume, computed
// once against the unmodified MDP.
struct ScoreTables {
    DetPolicy target;             // policy the scores are measured against
    PolicyStats target_stats;     // evaluation of the target policy
    Eigen::MatrixXd chi;          // chi at the requested eps
    Eigen::MatrixXd chi0;         // chi at eps = 0
    Eigen::MatrixXd beta;         // per-(s, a) slack available to dynamics changes
    Eigen::MatrixXd lambda;       // mixture coefficients, clipped to [0, 1]
    Eigen::MatrixXd lambda_raw;   // unclipped ratios; > 1 where the slack is short
    Eigen::MatrixXd c_feas;       // feasibility margins; +inf on target actions
    Eigen::MatrixXd u;            // u(s, s') = bias_v(s') + eps * hits(s', s) for s' != s
    Eigen::MatrixXd hitting;      // expected hitting times under the target policy
    double alpha = 0.0;           // worst-case row overlap of the kernel
    double diameter = 0.0;        // max expected hitting time under the target
    Eigen::VectorXd b_next;       // b_next(s) = P(s, target(s), .) dot bias_v
    double v_min = 0.0;           // min of bias_v
    double v_span = 0.0;          // max - min of bias_v
    double mu_max = 0.0;          // max over (s, a) of the (s, a)-deviation's mass at s
    double eps = 0.0;
    double delta = 0.0;
};

ScoreTables dyn_score_tables(const Mdp& mdp, const DetPolicy& target, double eps,
                             double delta);

// True when every non-target (s, a) either needs no correction (chi at eps
// is zero) or has beta slack of at least eps * (1 + diameter).  Certifies
// the mixture construction and the 2*lambda per-row cost ceiling.
bool sufficient_condition(const ScoreTables& tables);

// Steps-to-teach bound: (mu_max / eps) * (regret + 2 * v_inf).
double k_bound(double regret, double eps, double mu_max, double v_inf);

// max over (s, a) of the stationary mass the (s, a)-deviation policy puts on
// s.  The a = target(s) entries contribute the target policy's own mass.
double mu_max_over_deviations(const Mdp& mdp, const DetPolicy& target);

}  // namespace envpoison
