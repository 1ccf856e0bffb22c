#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "envpoison/linprog.hpp"
#include "envpoison/mdp.hpp"

// Reference implementations kept deliberately independent of the library's
// solution paths: power iteration instead of LU solves, Monte Carlo and
// truncated sums instead of linear systems, exhaustive enumeration instead
// of simplex pivoting.  Test expectations are frozen against these.
namespace oracle {

// Simple xorshift* stream, separate from the library generator.
class TestRng {
  public:
    explicit TestRng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next_u64() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545f4914f6cdd1dULL;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (double(next_u64() >> 11) * 0x1.0p-53);
    }
    int below(int n) { return int(next_u64() % std::uint64_t(n)); }

  private:
    std::uint64_t s_;
};

// Strictly positive random kernel rows, so every policy chain is ergodic.
envpoison::Mdp random_ergodic_mdp(TestRng& rng, int n_states, int n_actions);
envpoison::DetPolicy random_policy(TestRng& rng, int n_states, int n_actions);

// Stationary distribution by power iteration on the policy kernel.
Eigen::VectorXd power_stationary(const Eigen::MatrixXd& kernel, int iters = 100000,
                                 double tol = 1e-14);

double power_gain(const envpoison::Mdp& mdp, const envpoison::DetPolicy& pi);

// Average reward along one simulated trajectory.
double rollout_gain(const envpoison::Mdp& mdp, const envpoison::DetPolicy& pi,
                    long steps, std::uint64_t seed);

// Bias by truncated accumulation of (expected reward at step t) - gain,
// propagating exact state distributions from each start state.
Eigen::VectorXd truncated_bias(const envpoison::Mdp& mdp, const envpoison::DetPolicy& pi,
                               int horizon);

// Mean and standard error of the first-passage time from `from` to `to`.
std::pair<double, double> mc_hitting(const envpoison::Mdp& mdp,
                                     const envpoison::DetPolicy& pi, int from, int to,
                                     int trials, std::uint64_t seed);

std::vector<envpoison::DetPolicy> all_policies(int n_states, int n_actions);

// Gain of every deterministic policy, indexed like all_policies.
std::vector<double> all_gains(const envpoison::Mdp& mdp);

double best_gain(const envpoison::Mdp& mdp);

// Definitionally eps-robust optimal: pi's gain beats every other
// deterministic policy by at least eps - slack.
bool eps_robust_by_enumeration(const envpoison::Mdp& mdp, const envpoison::DetPolicy& pi,
                               double eps, double slack);

// Smallest pairwise overlap of transition rows, by direct enumeration.
double pairwise_alpha(const envpoison::Mdp& mdp);

// Exhaustive vertex enumeration for small LPs with finite box bounds:
// returns the best vertex objective, or nothing when no subset of active
// constraints yields a feasible point (empty region).
std::optional<double> lp_by_vertex_enumeration(const envpoison::LinearProgram& lp);

}  // namespace oracle
