#include "envpoison/sweep.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "envpoison/csv.hpp"
#include "envpoison/dynamics_attack.hpp"
#include "envpoison/errors.hpp"
#include "envpoison/learner.hpp"
#include "envpoison/online_sim.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/reward_attack.hpp"
#include "envpoison/rng.hpp"

namespace envpoison {

namespace {

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct AttackOutcome {
    bool feasible = false;
    double cost = std::numeric_limits<double>::quiet_NaN();
    double lower = 0.0, upper = 0.0;
    std::string status = "ok";
};

AttackOutcome run_one_attack(const std::string& name, const EnvSpec& env, double eps,
                             double delta, double p, int pool_size, std::uint64_t seed) {
    AttackOutcome out;
    try {
        if (name == "reward-general") {
            const auto res = attack_reward_general(env.mdp, env.target, eps, p);
            out = {true, res.cost, res.lower_bound, res.upper_bound, "ok"};
        } else if (name == "reward-nontarget") {
            const auto res = attack_reward_nontarget(env.mdp, env.target, eps, p);
            out = {true, res.cost, res.lower_bound, res.upper_bound, "ok"};
        } else if (name == "dyn-nontarget") {
            const auto res = attack_dynamics_nontarget(env.mdp, env.target, eps, delta, p);
            out = {res.feasible, res.cost, res.lower_bound, res.upper_bound,
                   res.feasible ? "ok" : "infeasible"};
        } else if (name == "dyn-constructive") {
            const auto res = attack_dynamics_constructive(env.mdp, env.target, eps, delta, p);
            out = {res.feasible, res.cost, res.lower_bound, res.upper_bound, "ok"};
        } else if (name == "dyn-general") {
            const auto res =
                attack_dynamics_general(env.mdp, env.target, eps, delta, p, pool_size, seed);
            out = {res.feasible, res.cost, res.lower_bound, res.upper_bound, "ok"};
        } else {
            throw DomainError("unknown attack: " + name);
        }
    } catch (const InfeasibleProblem&) {
        out.status = "infeasible";
    } catch (const PreconditionFailed&) {
        out.status = "precondition-failed";
    } catch (const SolverFailure& e) {
        out.status = std::string("solver-failure: ") + e.what();
    }
    return out;
}

}  // namespace

EnvSpec build_env(const std::string& name, double r_first, int chain_states) {
    if (name == "chain") return build_chain_env(r_first, chain_states);
    if (name == "grid") return build_grid_env(r_first);
    throw DomainError("unknown environment: " + name);
}

std::uint64_t derived_seed(std::uint64_t base, std::uint64_t stream) {
    return CounterRng(base).derive(stream).next_u64();
}

OfflineSweepConfig OfflineSweepConfig::from(const KvConfig& kv) {
    OfflineSweepConfig c;
    c.env = kv.get_str("env", c.env);
    c.chain_states = int(kv.get_int("chain_states", c.chain_states));
    c.r_first_values = kv.get_list("r_first_values", c.r_first_values);
    c.eps_values = kv.get_list("eps_values", c.eps_values);
    c.delta = kv.get_num("delta", c.delta);
    c.p = kv.get_num("p", c.p);
    if (kv.has("attacks")) c.attacks = split_csv(kv.get_str("attacks", ""));
    c.dyn_reps = int(kv.get_int("dyn_reps", c.dyn_reps));
    c.pool_size = int(kv.get_int("pool_size", c.pool_size));
    c.seed = std::uint64_t(kv.get_int("seed", long(c.seed)));
    return c;
}

void run_offline_sweep(const OfflineSweepConfig& cfg, std::ostream& csv,
                       std::ostream* timing) {
    csv << "env,attack,r_first,eps,p,cost,lower_bound,upper_bound,feasible,status,reps\n";
    for (double r_first : cfg.r_first_values) {
        const EnvSpec env = build_env(cfg.env, r_first, cfg.chain_states);
        for (double eps : cfg.eps_values)
            for (const std::string& attack : cfg.attacks) {
                const double t0 = now_seconds();
                const int reps = attack == "dyn-general" ? std::max(1, cfg.dyn_reps) : 1;
                double cost_sum = 0.0;
                int ok = 0;
                AttackOutcome last;
                for (int rep = 0; rep < reps; ++rep) {
                    last = run_one_attack(attack, env, eps, cfg.delta, cfg.p,
                                          cfg.pool_size, derived_seed(cfg.seed, rep));
                    if (last.status != "ok" || !last.feasible) break;
                    cost_sum += last.cost;
                    ++ok;
                }
                const bool feasible = ok == reps;
                const double cost = feasible ? cost_sum / reps
                                             : std::numeric_limits<double>::quiet_NaN();
                csv << env.name << ',' << attack << ',' << csv_num(r_first) << ','
                    << csv_num(eps) << ',' << csv_num(cfg.p) << ',' << csv_num(cost)
                    << ',' << csv_num(last.lower) << ',' << csv_num(last.upper) << ','
                    << (feasible ? 1 : 0) << ',' << last.status << ',' << reps << '\n';
                if (timing)
                    *timing << env.name << ' ' << attack << " r_first=" << csv_num(r_first)
                            << " eps=" << csv_num(eps) << " seconds="
                            << csv_num(now_seconds() - t0) << '\n';
            }
    }
}

OnlineSweepConfig OnlineSweepConfig::from(const KvConfig& kv) {
    OnlineSweepConfig c;
    c.env = kv.get_str("env", c.env);
    c.chain_states = int(kv.get_int("chain_states", c.chain_states));
    c.r_first = kv.get_num("r_first", c.r_first);
    c.eps = kv.get_num("eps", c.eps);
    c.delta = kv.get_num("delta", c.delta);
    c.attack = kv.get_str("attack", c.attack);
    c.learner = kv.get_str("learner", c.learner);
    c.horizon = kv.get_int("horizon", c.horizon);
    c.n_seeds = int(kv.get_int("n_seeds", c.n_seeds));
    c.seed0 = std::uint64_t(kv.get_int("seed0", long(c.seed0)));
    c.cadence = kv.get_int("cadence", c.cadence);
    c.cost_p = kv.get_num("cost_p", c.cost_p);
    c.pool_size = int(kv.get_int("pool_size", c.pool_size));
    c.attack_p = kv.get_num("attack_p", c.attack_p);
    c.conf_delta = kv.get_num("conf_delta", c.conf_delta);
    c.reward_range = kv.get_num("reward_range", c.reward_range);
    c.bonus_scale = kv.get_num("bonus_scale", c.bonus_scale);
    return c;
}

void run_online_sweep(const OnlineSweepConfig& cfg, std::ostream& csv) {
    const EnvSpec env = build_env(cfg.env, cfg.r_first, cfg.chain_states);
    if (cfg.horizon < 1 || cfg.cadence < 1 || cfg.n_seeds < 1)
        throw DomainError("online sweep needs positive horizon, cadence and seeds");

    PoisonMode mode = PoisonMode::None;
    std::unique_ptr<Mdp> poisoned;
    if (cfg.attack == "none") {
        poisoned = std::make_unique<Mdp>(env.mdp);
    } else if (cfg.attack == "reward-general") {
        mode = PoisonMode::Reward;
        poisoned = std::make_unique<Mdp>(
            attack_reward_general(env.mdp, env.target, cfg.eps, cfg.attack_p).mdp_hat);
    } else if (cfg.attack == "reward-nontarget") {
        mode = PoisonMode::Reward;
        poisoned = std::make_unique<Mdp>(
            attack_reward_nontarget(env.mdp, env.target, cfg.eps, cfg.attack_p).mdp_hat);
    } else if (cfg.attack == "dyn-nontarget") {
        mode = PoisonMode::Dynamics;
        const auto res =
            attack_dynamics_nontarget(env.mdp, env.target, cfg.eps, cfg.delta, cfg.attack_p);
        if (!res.feasible) throw InfeasibleProblem("restricted dynamics attack infeasible");
        poisoned = std::make_unique<Mdp>(res.mdp_hat);
    } else if (cfg.attack == "dyn-general") {
        mode = PoisonMode::Dynamics;
        poisoned = std::make_unique<Mdp>(
            attack_dynamics_general(env.mdp, env.target, cfg.eps, cfg.delta, cfg.attack_p,
                                    cfg.pool_size, derived_seed(cfg.seed0, 0xa77ac7))
                .mdp_hat);
    } else {
        throw DomainError("unknown attack: " + cfg.attack);
    }

    // The MDP the agent actually samples: poisoned rewards or poisoned
    // dynamics, never both.
    const Mdp sampled = mode == PoisonMode::Reward
                            ? env.mdp.with_rewards(poisoned->rewards())
                            : (mode == PoisonMode::Dynamics
                                   ? env.mdp.with_trans(poisoned->trans())
                                   : env.mdp);
    const double rho_star = gain(sampled, optimal_policy(sampled));

    double reward_range = cfg.reward_range;
    if (reward_range < 0.0) {
        const double chi_max =
            chi_table(env.mdp, env.target, cfg.eps).cwiseAbs().maxCoeff();
        reward_range = env.mdp.rewards().cwiseAbs().maxCoeff() + chi_max;
    }

    // Ceiling ingredients, all on the relevant MDPs, computed once.
    const double mu_max = mu_max_over_deviations(sampled, env.target);
    const double v_inf =
        evaluate_policy(sampled, env.target).bias_v.lpNorm<Eigen::Infinity>();
    double factor = 0.0;
    if (mode == PoisonMode::Reward)
        factor = chi_table(env.mdp, env.target, cfg.eps).cwiseAbs().maxCoeff();
    else if (mode == PoisonMode::Dynamics)
        factor =
            2.0 * dyn_score_tables(env.mdp, env.target, cfg.eps, cfg.delta).lambda.maxCoeff();

    const long n_points = (cfg.horizon + cfg.cadence - 1) / cfg.cadence;
    std::vector<double> mean_miss(size_t(n_points), 0.0), mean_cost(size_t(n_points), 0.0),
        mean_regret(size_t(n_points), 0.0);
    std::vector<long> ts(static_cast<std::size_t>(n_points));
    for (long i = 0; i < n_points; ++i)
        ts[size_t(i)] = std::min((i + 1) * cfg.cadence, cfg.horizon);

    csv << "series,t,avg_miss,avg_cost,emp_regret,miss_bound,cost_bound\n";
    for (int k = 0; k < cfg.n_seeds; ++k) {
        std::unique_ptr<Learner> learner;
        if (cfg.learner == "ucrl") {
            UcrlConfig ucfg;
            ucfg.conf_delta = cfg.conf_delta;
            ucfg.reward_range = reward_range;
            ucfg.bonus_scale = cfg.bonus_scale;
            learner = std::make_unique<UcrlLearner>(env.mdp.n_states(),
                                                    env.mdp.n_actions(), ucfg);
        } else if (cfg.learner == "uniform") {
            learner = std::make_unique<UniformRandomLearner>(
                env.mdp.n_actions(), derived_seed(cfg.seed0 + std::uint64_t(k), 17));
        } else {
            throw DomainError("unknown learner: " + cfg.learner);
        }
        const OnlineTrace trace =
            run_online(env.mdp, *poisoned, mode, env.target, *learner, cfg.horizon,
                       cfg.seed0 + std::uint64_t(k));

        // Stream the checkpoint summaries from running accumulators.
        long misses = 0, touched = 0;
        double cost_pow = 0.0, cost_max = 0.0, earned = 0.0;
        long next_point = 0;
        for (long i = 0; i < trace.length(); ++i) {
            const OnlineStep& st = trace.steps[size_t(i)];
            misses += st.miss ? 1 : 0;
            earned += st.reward;
            touched += st.manipulation > 1e-12 ? 1 : 0;
            cost_max = std::max(cost_max, st.manipulation);
            if (cfg.cost_p >= 1.0 && std::isfinite(cfg.cost_p))
                cost_pow += std::pow(st.manipulation, cfg.cost_p);
            if (next_point < n_points && i + 1 == ts[size_t(next_point)]) {
                const double t = double(i + 1);
                double cost;
                if (cfg.cost_p == 0.0) cost = double(touched) / t;
                else if (std::isinf(cfg.cost_p)) cost = cost_max / t;
                else cost = std::pow(cost_pow, 1.0 / cfg.cost_p) / t;
                const double miss = double(misses) / t;
                const double regret = rho_star * t - earned;
                csv << "seed" << k << ',' << (i + 1) << ',' << csv_num(miss) << ','
                    << csv_num(cost) << ',' << csv_num(regret) << ",,\n";
                mean_miss[size_t(next_point)] += miss;
                mean_cost[size_t(next_point)] += cost;
                mean_regret[size_t(next_point)] += regret;
                ++next_point;
            }
        }
    }

    for (long i = 0; i < n_points; ++i) {
        const double t = double(ts[size_t(i)]);
        const double miss = mean_miss[size_t(i)] / cfg.n_seeds;
        const double cost = mean_cost[size_t(i)] / cfg.n_seeds;
        const double regret = mean_regret[size_t(i)] / cfg.n_seeds;
        const double k_steps = (mu_max / cfg.eps) * (regret + 2.0 * v_inf);
        const double miss_bound = k_steps / t;
        double cost_bound;
        if (cfg.cost_p == 0.0) cost_bound = k_steps / t;
        else if (std::isinf(cfg.cost_p)) cost_bound = factor / t;
        else cost_bound = factor * std::pow(std::max(k_steps, 0.0), 1.0 / cfg.cost_p) / t;
        csv << "mean," << ts[size_t(i)] << ',' << csv_num(miss) << ',' << csv_num(cost)
            << ',' << csv_num(regret) << ',' << csv_num(miss_bound) << ','
            << csv_num(cost_bound) << '\n';
    }
}

void report_runtimes(std::ostream& out, int pool_size, std::uint64_t seed) {
    const double eps = 0.1, delta = 1e-4;
    const double p = std::numeric_limits<double>::infinity();
    out << "attack runtimes (seconds), eps=" << csv_num(eps) << ", delta=" << csv_num(delta)
        << ", p=inf, pool=" << pool_size << "\n";
    for (int n : {4, 100}) {
        const EnvSpec env = build_chain_env(-2.5, n);
        out << env.name << ":\n";
        for (const std::string attack :
             {"reward-nontarget", "reward-general", "dyn-nontarget", "dyn-general"}) {
            const double t0 = now_seconds();
            const AttackOutcome res = run_one_attack(attack, env, eps, delta, p,
                                                     pool_size, seed);
            out << "  " << attack << ": " << csv_num(now_seconds() - t0) << "s  (status "
                << res.status << ")\n";
        }
    }
}

}  // namespace envpoison
