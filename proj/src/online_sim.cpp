#include "envpoison/online_sim.hpp"

#include <cmath>
#include <ostream>

#include "envpoison/csv.hpp"
#include "envpoison/errors.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/rng.hpp"
#include "envpoison/score_tables.hpp"

namespace envpoison {

const char* to_string(PoisonMode m) {
    switch (m) {
        case PoisonMode::None: return "none";
        case PoisonMode::Reward: return "reward";
        case PoisonMode::Dynamics: return "dynamics";
    }
    return "unknown";
}

OnlineTrace run_online(const Mdp& original, const Mdp& poisoned, PoisonMode mode,
                       const DetPolicy& target, Learner& learner, long horizon,
                       std::uint64_t seed, int start) {
    check_policy(original, target);
    const int n = original.n_states(), m = original.n_actions();
    if (poisoned.n_states() != n || poisoned.n_actions() != m)
        throw DomainError("poisoned MDP shape differs from the original");
    if (start < 0 || start >= n) throw DomainError("start state out of range");
    if (horizon < 1) throw DomainError("horizon must be positive");

    // Per-(s, a) manipulation magnitude, fixed over the run.
    Eigen::MatrixXd manip = Eigen::MatrixXd::Zero(n, m);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            if (mode == PoisonMode::Reward)
                manip(s, a) = std::abs(poisoned.reward(s, a) - original.reward(s, a));
            else if (mode == PoisonMode::Dynamics)
                manip(s, a) = (poisoned.trans_row(s, a) - original.trans_row(s, a)).lpNorm<1>();
        }
    const Mdp& reward_src = (mode == PoisonMode::Reward) ? poisoned : original;
    const Mdp& trans_src = (mode == PoisonMode::Dynamics) ? poisoned : original;

    CounterRng rng(seed);
    OnlineTrace trace;
    trace.mode = mode;
    trace.steps.reserve(size_t(horizon));
    int s = start;
    for (long t = 0; t < horizon; ++t) {
        const int a = learner.act(s);
        const double r = reward_src.reward(s, a);
        const int s_next = rng.categorical(trans_src.trans_row(s, a));
        trace.steps.push_back({s, a, r, s_next, a != target(s), manip(s, a)});
        learner.observe(s, a, r, s_next);
        s = s_next;
    }
    return trace;
}

double avg_miss(const OnlineTrace& trace, long upto) {
    if (upto < 1 || upto > trace.length()) throw DomainError("prefix length out of range");
    long misses = 0;
    for (long i = 0; i < upto; ++i) misses += trace.steps[size_t(i)].miss ? 1 : 0;
    return double(misses) / double(upto);
}

double avg_cost(const OnlineTrace& trace, double p, long upto) {
    if (upto < 1 || upto > trace.length()) throw DomainError("prefix length out of range");
    if (p == 0.0) {
        long touched = 0;
        for (long i = 0; i < upto; ++i)
            touched += trace.steps[size_t(i)].manipulation > 1e-12 ? 1 : 0;
        return double(touched) / double(upto);
    }
    if (std::isinf(p)) {
        double mx = 0.0;
        for (long i = 0; i < upto; ++i)
            mx = std::max(mx, trace.steps[size_t(i)].manipulation);
        return mx / double(upto);
    }
    if (p < 1.0) throw DomainError("cost order must be 0, >= 1, or inf");
    double acc = 0.0;
    for (long i = 0; i < upto; ++i)
        acc += std::pow(trace.steps[size_t(i)].manipulation, p);
    return std::pow(acc, 1.0 / p) / double(upto);
}

double empirical_regret(const OnlineTrace& trace, const Mdp& reference, long upto) {
    if (upto < 1 || upto > trace.length()) throw DomainError("prefix length out of range");
    const double rho_star = gain(reference, optimal_policy(reference));
    double earned = 0.0;
    for (long i = 0; i < upto; ++i) earned += trace.steps[size_t(i)].reward;
    return rho_star * double(upto) - earned;
}

OnlineBounds theoretical_bounds(double regret, const Mdp& original, const Mdp& sampled,
                                const DetPolicy& target, double eps, double delta,
                                PoisonMode mode, double p, long t) {
    if (t < 1) throw DomainError("horizon must be positive");
    const double mu_max = mu_max_over_deviations(sampled, target);
    const double v_inf = evaluate_policy(sampled, target).bias_v.lpNorm<Eigen::Infinity>();
    OnlineBounds b;
    b.k = k_bound(regret, eps, mu_max, v_inf);
    b.miss_bound = b.k / double(t);

    double factor = 0.0;
    if (mode == PoisonMode::Reward) {
        const Eigen::MatrixXd chi = chi_table(original, target, eps);
        factor = chi.cwiseAbs().maxCoeff();
    } else if (mode == PoisonMode::Dynamics) {
        factor = 2.0 * dyn_score_tables(original, target, eps, delta).lambda.maxCoeff();
    }
    if (p == 0.0)
        b.cost_bound = b.k / double(t);
    else if (std::isinf(p))
        b.cost_bound = factor / double(t);
    else if (p >= 1.0)
        b.cost_bound = factor * std::pow(std::max(b.k, 0.0), 1.0 / p) / double(t);
    else
        throw DomainError("cost order must be 0, >= 1, or inf");
    return b;
}

void write_trace_csv(const OnlineTrace& trace, std::ostream& out, long cadence) {
    if (cadence < 1) throw DomainError("cadence must be positive");
    out << "t,state,action,reward,mismatch,manipulation,cumulative_miss,"
           "cumulative_cost_l1\n";
    long misses = 0;
    double cost_l1 = 0.0;
    for (long i = 0; i < trace.length(); ++i) {
        const OnlineStep& st = trace.steps[size_t(i)];
        misses += st.miss ? 1 : 0;
        cost_l1 += st.manipulation;
        if ((i + 1) % cadence == 0 || i + 1 == trace.length())
            out << (i + 1) << ',' << st.state << ',' << st.action << ','
                << csv_num(st.reward) << ',' << (st.miss ? 1 : 0) << ','
                << csv_num(st.manipulation) << ',' << misses << ','
                << csv_num(cost_l1) << '\n';
    }
}

}  // namespace envpoison
