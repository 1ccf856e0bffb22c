#include "envpoison/mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "envpoison/errors.hpp"

namespace envpoison {

DetPolicy neighbor(const DetPolicy& pi, int s, int a) {
    DetPolicy out = pi;
    out.actions[size_t(s)] = a;
    return out;
}

Mdp::Mdp(Eigen::MatrixXd rewards, std::vector<Eigen::MatrixXd> trans)
    : rewards_(std::move(rewards)), trans_(std::move(trans)) {
    const int n = int(rewards_.rows());
    const int m = int(rewards_.cols());
    if (n < 1 || m < 1) throw DomainError("mdp needs at least one state and one action");
    if (int(trans_.size()) != m) throw DomainError("transition block count != n_actions");
    for (int a = 0; a < m; ++a) {
        const auto& P = trans_[size_t(a)];
        if (P.rows() != n || P.cols() != n) throw DomainError("transition matrix shape mismatch");
        for (int s = 0; s < n; ++s) {
            double row_sum = 0.0;
            for (int t = 0; t < n; ++t) {
                double p = P(s, t);
                if (!std::isfinite(p) || p < -kRowSumTol || p > 1.0 + kRowSumTol)
                    throw DomainError("transition probability outside [0, 1]");
                row_sum += p;
            }
            if (std::abs(row_sum - 1.0) > kRowSumTol)
                throw DomainError("transition row does not sum to 1");
        }
    }
    if (!rewards_.allFinite()) throw DomainError("non-finite reward");
}

Eigen::MatrixXd Mdp::policy_kernel(const DetPolicy& pi) const {
    const int n = n_states();
    Eigen::MatrixXd K(n, n);
    for (int s = 0; s < n; ++s) K.row(s) = trans_[size_t(pi(s))].row(s);
    return K;
}

Eigen::VectorXd Mdp::policy_reward(const DetPolicy& pi) const {
    const int n = n_states();
    Eigen::VectorXd r(n);
    for (int s = 0; s < n; ++s) r[s] = rewards_(s, pi(s));
    return r;
}

Mdp Mdp::with_rewards(Eigen::MatrixXd new_rewards) const {
    if (new_rewards.rows() != rewards_.rows() || new_rewards.cols() != rewards_.cols())
        throw DomainError("reward matrix shape mismatch");
    return Mdp(std::move(new_rewards), trans_);
}

Mdp Mdp::with_trans(std::vector<Eigen::MatrixXd> new_trans) const {
    return Mdp(rewards_, std::move(new_trans));
}

void check_policy(const Mdp& mdp, const DetPolicy& pi) {
    if (int(pi.actions.size()) != mdp.n_states()) throw DomainError("policy length != n_states");
    for (int a : pi.actions)
        if (a < 0 || a >= mdp.n_actions()) throw DomainError("policy action out of range");
}

std::string mdp_to_string(const Mdp& mdp) {
    const int n = mdp.n_states(), m = mdp.n_actions();
    nlohmann::json j;
    j["n_states"] = n;
    j["n_actions"] = m;
    std::vector<double> rew;
    rew.reserve(size_t(n) * size_t(m));
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) rew.push_back(mdp.reward(s, a));
    std::vector<double> tr;
    tr.reserve(size_t(n) * size_t(m) * size_t(n));
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a)
            for (int t = 0; t < n; ++t) tr.push_back(mdp.trans_for_action(a)(s, t));
    j["rewards"] = rew;
    j["transitions"] = tr;
    return j.dump(2) + "\n";
}

Mdp mdp_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("mdp parse error: ") + e.what());
    }
    if (!j.contains("n_states") || !j.contains("n_actions") || !j.contains("rewards") ||
        !j.contains("transitions"))
        throw DomainError("mdp document missing a required field");
    const int n = j["n_states"].get<int>();
    const int m = j["n_actions"].get<int>();
    if (n < 1 || m < 1) throw DomainError("mdp document has empty state or action space");
    auto rew = j["rewards"].get<std::vector<double>>();
    auto tr = j["transitions"].get<std::vector<double>>();
    if (int(rew.size()) != n * m) throw DomainError("rewards length != n_states*n_actions");
    if (int(tr.size()) != n * m * n)
        throw DomainError("transitions length != n_states*n_actions*n_states");
    Eigen::MatrixXd R(n, m);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) R(s, a) = rew[size_t(s * m + a)];
    std::vector<Eigen::MatrixXd> P(size_t(m), Eigen::MatrixXd(n, n));
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a)
            for (int t = 0; t < n; ++t) P[size_t(a)](s, t) = tr[size_t((s * m + a) * n + t)];
    return Mdp(std::move(R), std::move(P));
}

void write_mdp_file(const Mdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open for writing: " + path);
    out << mdp_to_string(mdp);
}

Mdp read_mdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return mdp_from_string(ss.str());
}

}  // namespace envpoison
