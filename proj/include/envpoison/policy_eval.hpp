#pragma once

#include <Eigen/Dense>

#include "envpoison/mdp.hpp"

namespace envpoison {

// Default slack for gain comparisons and argmax tie breaking.
inline constexpr double kTieTol = 1e-9;

// Average-reward evaluation of one policy.  bias_v is normalized so that
// stationary . bias_v = 0; q is the n_states x n_actions relative
// action-value table with q(s, pi(s)) = bias_v(s).
struct PolicyStats {
    double gain = 0.0;
    Eigen::VectorXd stationary;
    Eigen::VectorXd bias_v;
    Eigen::MatrixXd q;
};

// True when the chain induced by `pi` is irreducible and aperiodic.
bool check_ergodic(const Mdp& mdp, const DetPolicy& pi);

// Unique invariant distribution of the chain induced by `pi`.
// Throws SingularChain when the balance system is rank deficient beyond its
// single redundant equation (reducible chain).
Eigen::VectorXd stationary_distribution(const Mdp& mdp, const DetPolicy& pi);
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& kernel);

// Long-run average reward of `pi`.
double gain(const Mdp& mdp, const DetPolicy& pi);

PolicyStats evaluate_policy(const Mdp& mdp, const DetPolicy& pi);

// expected_hits(s, t) = expected steps to first reach t from s under `pi`;
// zero on the diagonal.
Eigen::MatrixXd hitting_times(const Mdp& mdp, const DetPolicy& pi);

// Largest expected hitting time between distinct states under `pi`.
double diameter_of(const Eigen::MatrixXd& expected_hits);

// Worst-case overlap between any two state-action transition rows:
// min over ((s,a),(s',a')) of sum_x min(P(s,a,x), P(s',a',x)).
double hajnal_alpha(const Mdp& mdp);

// True when pi's gain beats every single-state deviation by at least eps
// (up to `tol` slack).  With eps = 0 this is plain gain optimality against
// neighbor policies.
bool is_eps_robust_optimal(const Mdp& mdp, const DetPolicy& pi, double eps,
                           double tol = kTieTol);

// Gain-optimal deterministic policy by policy iteration on (gain, bias).
// Requires ergodicity under every policy the iteration visits.
DetPolicy optimal_policy(const Mdp& mdp);

}  // namespace envpoison
