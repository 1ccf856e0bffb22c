#include "envpoison/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "envpoison/errors.hpp"

namespace envpoison {

namespace {
// Self-loop weight of the aperiodicity transform used while planning; it
// keeps value iteration convergent without moving any policy's gain.
constexpr double kSelfLoop = 0.01;
}  // namespace

UcrlLearner::UcrlLearner(int n_states, int n_actions, UcrlConfig cfg)
    : n_(n_states), m_(n_actions), cfg_(cfg) {
    if (n_ < 1 || m_ < 1) throw DomainError("learner needs at least one state and action");
    visits_ = Eigen::MatrixXd::Zero(n_, m_);
    visits_start_ = visits_;
    in_episode_ = visits_;
    reward_sum_ = visits_;
    next_counts_.assign(size_t(m_), Eigen::MatrixXd::Zero(n_, n_));
    policy_.actions.assign(size_t(n_), 0);
    replan();
}

void UcrlLearner::observe(int s, int a, double r, int s_next) {
    visits_(s, a) += 1.0;
    in_episode_(s, a) += 1.0;
    reward_sum_(s, a) += r;
    next_counts_[size_t(a)](s, s_next) += 1.0;
    ++t_;
    if (in_episode_(s, a) >= std::max(1.0, visits_start_(s, a))) {
        visits_start_ = visits_;
        in_episode_.setZero();
        replan();
    }
}

void UcrlLearner::replan() {
    ++episodes_;
    const double t = double(std::max<long>(t_, 1));
    const double log_p = std::log(std::max(2.0 * m_ * t / cfg_.conf_delta, 2.0));
    const double log_r = std::log(std::max(2.0 * n_ * m_ * t / cfg_.conf_delta, 2.0));

    Eigen::MatrixXd r_hat(n_, m_), r_rad(n_, m_), p_rad(n_, m_);
    for (int s = 0; s < n_; ++s)
        for (int a = 0; a < m_; ++a) {
            const double nv = std::max(1.0, visits_(s, a));
            r_hat(s, a) = reward_sum_(s, a) / nv;
            r_rad(s, a) =
                cfg_.bonus_scale * cfg_.reward_range * std::sqrt(7.0 * log_r / (2.0 * nv));
            p_rad(s, a) = cfg_.bonus_scale * std::sqrt(14.0 * n_ * log_p / nv);
        }

    const double span_tol = cfg_.span_tol_scale / std::sqrt(t);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n_);
    std::vector<int> order(static_cast<std::size_t>(n_));
    Eigen::VectorXd u_next(n_), incr(n_);
    DetPolicy pol{std::vector<int>(size_t(n_), 0)};

    for (long iter = 0; iter < cfg_.max_plan_iters; ++iter) {
        // States sorted by current value, best first; ties to lower index.
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int x, int y) { return u[x] > u[y]; });

        for (int s = 0; s < n_; ++s) {
            double best = 0.0;
            int best_a = 0;
            for (int a = 0; a < m_; ++a) {
                const double nv = visits_(s, a);
                Eigen::VectorXd q;
                if (nv > 0.0)
                    q = next_counts_[size_t(a)].row(s).transpose() / nv;
                else
                    q = Eigen::VectorXd::Constant(n_, 1.0 / n_);
                // Optimistic next-state distribution: push up to half the
                // radius onto the best state, taking mass from the worst.
                const double budget = std::min(p_rad(s, a), 2.0) / 2.0;
                const int top = order[0];
                const double add = std::min(budget, 1.0 - q[top]);
                q[top] += add;
                double excess = add;
                for (int k = n_ - 1; k > 0 && excess > 0.0; --k) {
                    const int j = order[size_t(k)];
                    if (j == top) continue;
                    const double take = std::min(excess, q[j]);
                    q[j] -= take;
                    excess -= take;
                }
                const double val = r_hat(s, a) + r_rad(s, a) + kSelfLoop * u[s] +
                                   (1.0 - kSelfLoop) * q.dot(u);
                if (a == 0 || val > best) {
                    best = val;
                    best_a = a;
                }
            }
            u_next[s] = best;
            pol.actions[size_t(s)] = best_a;
        }

        incr = u_next - u;
        const double span = incr.maxCoeff() - incr.minCoeff();
        u = u_next.array() - u_next.minCoeff();
        if (span < span_tol) {
            gain_lo_ = incr.minCoeff();
            policy_ = pol;
            return;
        }
    }
    // Cap reached: keep the last iterate's greedy policy.
    gain_lo_ = incr.minCoeff();
    policy_ = pol;
}

}  // namespace envpoison
