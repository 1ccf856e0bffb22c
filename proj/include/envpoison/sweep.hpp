#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "envpoison/config.hpp"
#include "envpoison/envs.hpp"

namespace envpoison {

// Grid sweep of offline attacks.  One CSV row per (r_first, eps, attack);
// failures are recorded in the status column and the sweep continues.
// Wall-clock timings go to the optional side channel, never into the CSV,
// so identical configs reproduce identical bytes.
struct OfflineSweepConfig {
    std::string env = "chain";            // chain | grid
    int chain_states = 4;
    std::vector<double> r_first_values = {-2.5};
    std::vector<double> eps_values = {0.1};
    double delta = 1e-4;
    double p = std::numeric_limits<double>::infinity();
    std::vector<std::string> attacks = {"reward-general", "reward-nontarget",
                                        "dyn-nontarget", "dyn-general"};
    int dyn_reps = 10;                    // seeded repetitions of the pool attack
    int pool_size = 32;
    std::uint64_t seed = 1;

    static OfflineSweepConfig from(const KvConfig& kv);
};

void run_offline_sweep(const OfflineSweepConfig& cfg, std::ostream& csv,
                       std::ostream* timing = nullptr);

// Learning runs against a fixed poisoned environment, several seeds, one
// CSV row per (series, checkpoint).  Seed rows carry per-run averages;
// mean rows add the ceiling columns evaluated from the seed-mean regret.
struct OnlineSweepConfig {
    std::string env = "chain";
    int chain_states = 4;
    double r_first = -2.5;
    double eps = 0.1;
    double delta = 1e-4;
    std::string attack = "reward-nontarget";  // also: reward-general,
                                              // dyn-nontarget, dyn-general, none
    std::string learner = "ucrl";             // ucrl | uniform
    long horizon = 200000;
    int n_seeds = 20;
    std::uint64_t seed0 = 1;
    long cadence = 1000;
    double cost_p = 1.0;
    int pool_size = 32;
    double attack_p = std::numeric_limits<double>::infinity();
    double conf_delta = 0.05;
    double reward_range = -1.0;  // < 0 selects max|R| + max|chi|
    double bonus_scale = 1.0;

    static OnlineSweepConfig from(const KvConfig& kv);
};

void run_online_sweep(const OnlineSweepConfig& cfg, std::ostream& csv);

// Times each offline attack on the 4-state chain and a 100-state chain and
// writes a plain-text table.
void report_runtimes(std::ostream& out, int pool_size = 32, std::uint64_t seed = 1);

// Shared helpers.
EnvSpec build_env(const std::string& name, double r_first, int chain_states);
std::uint64_t derived_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace envpoison
