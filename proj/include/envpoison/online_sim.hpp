#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "envpoison/learner.hpp"
#include "envpoison/mdp.hpp"

namespace envpoison {

// What the attacker rewires while the agent runs: nothing, the reward
// channel (agent samples true dynamics, sees poisoned rewards), or the
// transition channel (agent samples poisoned dynamics, sees true rewards).
enum class PoisonMode { None, Reward, Dynamics };

const char* to_string(PoisonMode m);

struct OnlineStep {
    int state;
    int action;
    double reward;       // reward shown to the agent
    int next_state;
    bool miss;           // action differed from the target policy's
    double manipulation; // |reward change| or l1 row change at (state, action)
};

struct OnlineTrace {
    PoisonMode mode = PoisonMode::None;
    std::vector<OnlineStep> steps;

    long length() const { return long(steps.size()); }
};

// Runs `learner` for `horizon` steps from state `start`.  The environment
// the agent experiences is `poisoned` on the attacked channel and
// `original` on the other; per-step manipulation sizes come from the table
// of differences between the two.  Next states are drawn from the
// counter-based stream seeded here, so traces are reproducible.
OnlineTrace run_online(const Mdp& original, const Mdp& poisoned, PoisonMode mode,
                       const DetPolicy& target, Learner& learner, long horizon,
                       std::uint64_t seed, int start = 0);

// Fraction of the first `upto` steps whose action missed the target.
double avg_miss(const OnlineTrace& trace, long upto);

// Time-averaged manipulation size over the first `upto` steps:
// p >= 1 finite: (1/t) (sum m_i^p)^(1/p); p = inf: (1/t) max m_i;
// p = 0: fraction of steps with manipulation above 1e-12.
double avg_cost(const OnlineTrace& trace, double p, long upto);

// reference-optimal gain times t, minus the rewards actually shown.
double empirical_regret(const OnlineTrace& trace, const Mdp& reference, long upto);

struct OnlineBounds {
    double k = 0.0;          // steps-to-teach bound
    double miss_bound = 0.0; // ceiling for avg_miss
    double cost_bound = 0.0; // ceiling for avg_cost at the requested p
};

// Evaluates the attacked-learning ceilings at horizon `t`: K is the
// steps-to-teach bound on the MDP the agent samples, and the cost ceiling
// scales K^(1/p) by the worst-case per-step manipulation (max chi for
// reward attacks, 2 max lambda for dynamics attacks, both measured on the
// original MDP).
OnlineBounds theoretical_bounds(double regret, const Mdp& original, const Mdp& sampled,
                                const DetPolicy& target, double eps, double delta,
                                PoisonMode mode, double p, long t);

// Streams cumulative summaries (t, state, action, reward, mismatch,
// manipulation, cumulative_miss, cumulative_cost_l1) every `cadence` steps
// plus the final step.  cadence = 1 dumps every step.
void write_trace_csv(const OnlineTrace& trace, std::ostream& out, long cadence = 1000);

}  // namespace envpoison
