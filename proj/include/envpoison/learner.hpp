#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "envpoison/mdp.hpp"
#include "envpoison/rng.hpp"

namespace envpoison {

// Common face of the online agents.  Instances are single-owner mutable
// state; act() is deterministic given the observation history for the
// optimistic learner and stream-deterministic for the random baseline.
class Learner {
  public:
    virtual ~Learner() = default;
    virtual int act(int state) = 0;
    virtual void observe(int state, int action, double reward, int next_state) = 0;
};

struct UcrlConfig {
    double conf_delta = 0.05;   // confidence level in the radii
    double reward_range = 1.0;  // scale of the reward confidence radius
    double bonus_scale = 1.0;   // multiplies both radii; 1 = theoretical widths
    double span_tol_scale = 1.0;  // planner stops at scale / sqrt(t)
    long max_plan_iters = 1000000;
};

// Optimistic model-based learner.  Keeps visit / transition / reward
// counts; replans by extended value iteration each time some (state,
// action) pair doubles its visit count since the last replan.
class UcrlLearner : public Learner {
  public:
    UcrlLearner(int n_states, int n_actions, UcrlConfig cfg = {});

    int act(int state) override { return policy_(state); }
    void observe(int state, int action, double reward, int next_state) override;

    const DetPolicy& policy() const { return policy_; }
    long total_steps() const { return t_; }
    long episodes() const { return episodes_; }
    // Lower end of the planner's average-reward bracket at the last replan.
    double optimistic_gain_lo() const { return gain_lo_; }

  private:
    void replan();

    int n_, m_;
    UcrlConfig cfg_;
    long t_ = 0;
    long episodes_ = 0;
    double gain_lo_ = 0.0;
    Eigen::MatrixXd visits_;         // lifetime count per (s, a)
    Eigen::MatrixXd visits_start_;   // counts frozen at the last replan
    Eigen::MatrixXd in_episode_;     // counts since the last replan
    Eigen::MatrixXd reward_sum_;
    std::vector<Eigen::MatrixXd> next_counts_;  // per action, (s, s') counts
    DetPolicy policy_;
};

// Baseline that ignores all feedback and samples actions uniformly from a
// seeded stream.
class UniformRandomLearner : public Learner {
  public:
    UniformRandomLearner(int n_actions, std::uint64_t seed)
        : m_(n_actions), rng_(seed) {}

    int act(int) override { return rng_.next_below(m_); }
    void observe(int, int, double, int) override {}

  private:
    int m_;
    CounterRng rng_;
};

}  // namespace envpoison
