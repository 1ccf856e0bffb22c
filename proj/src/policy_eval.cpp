#include "envpoison/policy_eval.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "envpoison/errors.hpp"

namespace envpoison {

namespace {

constexpr double kPivotTol = 1e-12;       // rank threshold for the LU solves
constexpr double kStationaryResid = 1e-9; // balance residual accepted for mu
constexpr double kEvalResid = 1e-8;       // residual accepted for bias / hitting systems

// Support graph of the policy chain: edge s -> t when the transition
// probability is (meaningfully) positive.
std::vector<std::vector<int>> support_graph(const Eigen::MatrixXd& K) {
    const int n = int(K.rows());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (K(s, t) > 0.0) adj[size_t(s)].push_back(t);
    return adj;
}

std::vector<int> bfs_depths(const std::vector<std::vector<int>>& adj, int root) {
    std::vector<int> depth(adj.size(), -1);
    std::vector<int> queue{root};
    depth[size_t(root)] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        for (int v : adj[size_t(u)])
            if (depth[size_t(v)] < 0) {
                depth[size_t(v)] = depth[size_t(u)] + 1;
                queue.push_back(v);
            }
    }
    return depth;
}

Eigen::VectorXd solve_full_rank(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                const char* what) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(kPivotTol);
    if (!lu.isInvertible()) throw SingularChain(what);
    return lu.solve(b);
}

}  // namespace

bool check_ergodic(const Mdp& mdp, const DetPolicy& pi) {
    check_policy(mdp, pi);
    const Eigen::MatrixXd K = mdp.policy_kernel(pi);
    const auto adj = support_graph(K);
    const int n = int(K.rows());
    if (n == 1) return true;

    // Irreducible iff every state is reachable from 0 and 0 is reachable
    // from every state (forward plus reverse reachability).
    const auto fwd = bfs_depths(adj, 0);
    for (int v : fwd)
        if (v < 0) return false;
    std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s)
        for (int t : adj[size_t(s)]) radj[size_t(t)].push_back(s);
    const auto bwd = bfs_depths(radj, 0);
    for (int v : bwd)
        if (v < 0) return false;

    // Period = gcd over edges u->v of depth(u) + 1 - depth(v); aperiodic iff 1.
    int g = 0;
    for (int u = 0; u < n; ++u)
        for (int v : adj[size_t(u)]) g = std::gcd(g, std::abs(fwd[size_t(u)] + 1 - fwd[size_t(v)]));
    return g == 1;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& K) {
    const int n = int(K.rows());

    // mu' (K - I) = 0 with one balance row swapped for the normalization.
    Eigen::MatrixXd A = (K.transpose() - Eigen::MatrixXd::Identity(n, n));
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    Eigen::VectorXd mu = solve_full_rank(A, b, "reducible chain: stationary system singular");

    const double resid = (K.transpose() * mu - mu).lpNorm<Eigen::Infinity>();
    if (resid > kStationaryResid || mu.minCoeff() < -kStationaryResid)
        throw SingularChain("stationary solve residual too large (chain not ergodic?)");
    return mu;
}

Eigen::VectorXd stationary_distribution(const Mdp& mdp, const DetPolicy& pi) {
    check_policy(mdp, pi);
    return stationary_distribution(mdp.policy_kernel(pi));
}

double gain(const Mdp& mdp, const DetPolicy& pi) {
    return stationary_distribution(mdp, pi).dot(mdp.policy_reward(pi));
}

PolicyStats evaluate_policy(const Mdp& mdp, const DetPolicy& pi) {
    const int n = mdp.n_states();
    PolicyStats st;
    st.stationary = stationary_distribution(mdp, pi);
    const Eigen::VectorXd r = mdp.policy_reward(pi);
    st.gain = st.stationary.dot(r);

    // (I - K) v = r - gain, rank n-1; the dropped equation is replaced by the
    // normalization mu . v = 0, which pins the additive constant.
    const Eigen::MatrixXd K = mdp.policy_kernel(pi);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - K;
    Eigen::VectorXd b = r.array() - st.gain;
    A.row(n - 1) = st.stationary.transpose();
    b[n - 1] = 0.0;
    st.bias_v = solve_full_rank(A, b, "bias system singular");

    const double resid =
        ((Eigen::MatrixXd::Identity(n, n) - K) * st.bias_v - (r.array() - st.gain).matrix())
            .lpNorm<Eigen::Infinity>();
    if (resid > kEvalResid) throw SingularChain("bias solve residual too large");

    st.q.resize(n, mdp.n_actions());
    for (int a = 0; a < mdp.n_actions(); ++a)
        st.q.col(a) = mdp.rewards().col(a).array() - st.gain +
                      (mdp.trans_for_action(a) * st.bias_v).array();
    return st;
}

Eigen::MatrixXd hitting_times(const Mdp& mdp, const DetPolicy& pi) {
    check_policy(mdp, pi);
    const int n = mdp.n_states();
    const Eigen::MatrixXd K = mdp.policy_kernel(pi);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int target = 0; target < n; ++target) {
        if (n == 1) break;
        // T(s) = 1 + sum_{x != target} K(s, x) T(x) over s != target.
        Eigen::MatrixXd A(n - 1, n - 1);
        std::vector<int> idx;
        idx.reserve(size_t(n - 1));
        for (int s = 0; s < n; ++s)
            if (s != target) idx.push_back(s);
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j)
                A(i, j) = (i == j ? 1.0 : 0.0) - K(idx[size_t(i)], idx[size_t(j)]);
        const Eigen::VectorXd t =
            solve_full_rank(A, Eigen::VectorXd::Ones(n - 1), "hitting-time system singular");
        for (int i = 0; i < n - 1; ++i) {
            if (!(t[i] >= -kEvalResid) || !std::isfinite(t[i]))
                throw SingularChain("negative or non-finite hitting time");
            T(idx[size_t(i)], target) = t[i];
        }
    }
    return T;
}

double diameter_of(const Eigen::MatrixXd& expected_hits) {
    double d = 0.0;
    for (int s = 0; s < expected_hits.rows(); ++s)
        for (int t = 0; t < expected_hits.cols(); ++t)
            if (s != t) d = std::max(d, expected_hits(s, t));
    return d;
}

double hajnal_alpha(const Mdp& mdp) {
    const int n = mdp.n_states(), m = mdp.n_actions();
    std::vector<Eigen::VectorXd> rows;
    rows.reserve(size_t(n) * size_t(m));
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) rows.push_back(mdp.trans_row(s, a));
    double alpha = 1.0;
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = i + 1; j < rows.size(); ++j)
            alpha = std::min(alpha, rows[i].cwiseMin(rows[j]).sum());
    return alpha;
}

bool is_eps_robust_optimal(const Mdp& mdp, const DetPolicy& pi, double eps, double tol) {
    if (eps < 0.0) throw DomainError("eps must be non-negative");
    const double rho = gain(mdp, pi);
    for (int s = 0; s < mdp.n_states(); ++s)
        for (int a = 0; a < mdp.n_actions(); ++a) {
            if (a == pi(s)) continue;
            if (rho < gain(mdp, neighbor(pi, s, a)) + eps - tol) return false;
        }
    return true;
}

DetPolicy optimal_policy(const Mdp& mdp) {
    const int n = mdp.n_states(), m = mdp.n_actions();
    DetPolicy pi{std::vector<int>(size_t(n), 0)};

    // Termination cap: policy iteration visits each policy at most once.
    std::uint64_t cap = 1;
    for (int s = 0; s < n; ++s) {
        if (cap > (std::uint64_t(1) << 60) / std::uint64_t(m)) {
            cap = std::uint64_t(1) << 60;
            break;
        }
        cap *= std::uint64_t(m);
    }

    for (std::uint64_t iter = 0; iter < cap; ++iter) {
        const PolicyStats st = evaluate_policy(mdp, pi);
        DetPolicy next = pi;
        for (int s = 0; s < n; ++s) {
            double best = st.q(s, pi(s));
            int best_a = pi(s);
            for (int a = 0; a < m; ++a)
                if (st.q(s, a) > best + kTieTol) {
                    best = st.q(s, a);
                    best_a = a;
                }
            next.actions[size_t(s)] = best_a;
        }
        if (next == pi) return pi;
        pi = next;
    }
    throw NoConvergence("policy iteration did not reach a fixed point");
}

}  // namespace envpoison
