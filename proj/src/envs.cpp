#include "envpoison/envs.hpp"

#include "envpoison/errors.hpp"

namespace envpoison {

namespace {

// Rows mix a deterministic successor with uniform exploration noise, so
// every entry is at least kEnvNoise / n and every policy chain is ergodic.
std::vector<Eigen::MatrixXd> noisy_deterministic(const std::vector<std::vector<int>>& succ,
                                                 int n) {
    std::vector<Eigen::MatrixXd> trans(succ.size(),
                                       Eigen::MatrixXd::Constant(n, n, kEnvNoise / n));
    for (size_t a = 0; a < succ.size(); ++a)
        for (int s = 0; s < n; ++s) trans[a](s, succ[a][size_t(s)]) += 1.0 - kEnvNoise;
    return trans;
}

}  // namespace

EnvSpec build_chain_env(double r_first, int n) {
    if (n < 2) throw DomainError("chain needs at least two states");
    // Cells left to right: the penalty state, the start, then the rewarding
    // corridor.  States are numbered in walk order from the start, so the
    // penalty state carries the last index even though it sits leftmost.
    std::vector<int> cell(static_cast<std::size_t>(n));
    cell[0] = n - 1;
    for (int s = 0; s < n - 1; ++s) cell[size_t(s) + 1] = s;
    std::vector<std::vector<int>> succ(2, std::vector<int>(size_t(n)));
    for (int pos = 0; pos < n; ++pos) {
        succ[0][size_t(cell[size_t(pos)])] = cell[size_t(std::max(pos - 1, 0))];
        succ[1][size_t(cell[size_t(pos)])] = cell[size_t(std::min(pos + 1, n - 1))];
    }
    Eigen::MatrixXd rewards(n, 2);
    for (int s = 0; s < n; ++s) {
        const double r = s == 0 ? r_first : (s == n - 1 ? -0.5 : 0.5);
        rewards.row(s).setConstant(r);
    }
    return EnvSpec{Mdp(std::move(rewards), noisy_deterministic(succ, n)),
                   DetPolicy{std::vector<int>(size_t(n), 1)},
                   "chain" + std::to_string(n)};
}

EnvSpec build_grid_env(double r_first, const std::vector<int>& forward,
                       const std::vector<int>& backward) {
    const int n = 9;
    std::vector<std::vector<int>> succ(2, std::vector<int>(size_t(n)));
    for (int s = 0; s < n; ++s) {
        succ[0][size_t(s)] = (s + n - 1) % n;
        succ[1][size_t(s)] = (s + 1) % n;
    }
    auto install = [&](const std::vector<int>& tour, int a) {
        if (tour.empty()) return;
        if (int(tour.size()) != n) throw DomainError("grid tour needs 9 successors");
        for (int s = 0; s < n; ++s) {
            if (tour[size_t(s)] < 0 || tour[size_t(s)] >= n)
                throw DomainError("grid tour successor out of range");
            succ[size_t(a)][size_t(s)] = tour[size_t(s)];
        }
    };
    install(backward, 0);
    install(forward, 1);

    Eigen::MatrixXd rewards(n, 2);
    for (int s = 0; s < n; ++s) {
        double r = 0.0;
        if (s == 0) r = r_first;
        else if (s <= 3) r = -2.5;
        else if (s <= 5) r = 1.0;
        rewards.row(s).setConstant(r);
    }
    return EnvSpec{Mdp(std::move(rewards), noisy_deterministic(succ, n)),
                   DetPolicy{std::vector<int>(size_t(n), 1)},
                   "grid9"};
}

}  // namespace envpoison
