#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace envpoison {

// Deterministic stationary policy: one action index per state.
struct DetPolicy {
    std::vector<int> actions;

    int operator()(int s) const { return actions[size_t(s)]; }
    bool operator==(const DetPolicy& o) const { return actions == o.actions; }
};

// Returns a copy of `pi` that plays `a` in state `s` and agrees with `pi`
// everywhere else.
DetPolicy neighbor(const DetPolicy& pi, int s, int a);

// Finite tabular MDP.  rewards(s, a) is the expected one-step reward;
// trans[a].row(s) is the next-state distribution of (s, a).
class Mdp {
  public:
    Mdp(Eigen::MatrixXd rewards, std::vector<Eigen::MatrixXd> trans);

    int n_states() const { return int(rewards_.rows()); }
    int n_actions() const { return int(rewards_.cols()); }

    double reward(int s, int a) const { return rewards_(s, a); }
    const Eigen::MatrixXd& rewards() const { return rewards_; }

    Eigen::VectorXd trans_row(int s, int a) const { return trans_[size_t(a)].row(s).transpose(); }
    const Eigen::MatrixXd& trans_for_action(int a) const { return trans_[size_t(a)]; }
    const std::vector<Eigen::MatrixXd>& trans() const { return trans_; }

    // Chain induced by a deterministic policy: row s is trans[pi(s)].row(s).
    Eigen::MatrixXd policy_kernel(const DetPolicy& pi) const;

    // Reward vector along a policy: entry s is rewards(s, pi(s)).
    Eigen::VectorXd policy_reward(const DetPolicy& pi) const;

    Mdp with_rewards(Eigen::MatrixXd new_rewards) const;
    Mdp with_trans(std::vector<Eigen::MatrixXd> new_trans) const;

  private:
    Eigen::MatrixXd rewards_;                // n_states x n_actions
    std::vector<Eigen::MatrixXd> trans_;     // n_actions matrices, n_states x n_states
};

// Row-stochasticity tolerance applied when an Mdp is constructed or parsed.
inline constexpr double kRowSumTol = 1e-9;

void check_policy(const Mdp& mdp, const DetPolicy& pi);

// Text serialization (JSON).  Doubles round-trip exactly: they are printed
// with up to 17 significant digits.
std::string mdp_to_string(const Mdp& mdp);
Mdp mdp_from_string(const std::string& text);
void write_mdp_file(const Mdp& mdp, const std::string& path);
Mdp read_mdp_file(const std::string& path);

}  // namespace envpoison
