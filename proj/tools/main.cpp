#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "envpoison/config.hpp"
#include "envpoison/csv.hpp"
#include "envpoison/dynamics_attack.hpp"
#include "envpoison/envs.hpp"
#include "envpoison/errors.hpp"
#include "envpoison/policy_eval.hpp"
#include "envpoison/reward_attack.hpp"
#include "envpoison/rng.hpp"
#include "envpoison/score_tables.hpp"
#include "envpoison/sweep.hpp"

namespace {

using namespace envpoison;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolverFailure = 3;

// Merges a config file (if any) with key=value overrides from the command
// line; flags always win.
KvConfig merge_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
    KvConfig cfg;
    if (!config_path.empty()) cfg = KvConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw DomainError("override needs key=value form: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

struct Problem {
    EnvSpec env;
    double eps, delta, p;
};

Problem load_problem(const KvConfig& cfg) {
    const double eps = cfg.get_num("eps", 0.1);
    const double delta = cfg.get_num("delta", 1e-4);
    const double p = cfg.get_num("p", std::numeric_limits<double>::infinity());

    const std::string mdp_file = cfg.get_str("mdp_file", "");
    if (!mdp_file.empty()) {
        Mdp mdp = read_mdp_file(mdp_file);
        const std::string target_text = cfg.get_str("target", "optimal");
        DetPolicy target;
        if (target_text == "optimal") {
            target = optimal_policy(mdp);
        } else {
            for (long v : KvConfig::from_string("t = " + target_text)
                              .get_int_list("t", {}))
                target.actions.push_back(int(v));
            check_policy(mdp, target);
        }
        return {EnvSpec{std::move(mdp), std::move(target), "file"}, eps, delta, p};
    }
    EnvSpec env = build_env(cfg.get_str("env", "chain"), cfg.get_num("r_first", -2.5),
                            int(cfg.get_int("chain_states", 4)));
    if (cfg.has("target")) {
        DetPolicy target;
        for (long v :
             KvConfig::from_string("t = " + cfg.get_str("target", "")).get_int_list("t", {}))
            target.actions.push_back(int(v));
        check_policy(env.mdp, target);
        env.target = std::move(target);
    }
    return {std::move(env), eps, delta, p};
}

nlohmann::json result_json(const std::string& attack, double eps, double delta,
                           double p, double cost, double lower, double upper,
                           bool feasible, const Mdp& mdp_hat) {
    nlohmann::json j;
    j["attack"] = attack;
    j["eps"] = eps;
    j["delta"] = delta;
    j["p"] = std::isinf(p) ? "inf" : csv_num(p);
    j["cost"] = cost;
    j["lower_bound"] = std::isinf(lower) ? -1.0 : lower;
    j["upper_bound_finite"] = !std::isinf(upper);
    j["upper_bound"] = std::isinf(upper) ? -1.0 : upper;
    j["feasible"] = feasible;
    j["mdp"] = nlohmann::json::parse(mdp_to_string(mdp_hat));
    return j;
}

int cmd_attack(const KvConfig& cfg) {
    const Problem prob = load_problem(cfg);
    const std::string attack = cfg.get_str("attack", "reward-nontarget");
    const std::string out_path = cfg.get_str("out", "");
    const int pool_size = int(cfg.get_int("pool_size", 32));
    const std::uint64_t seed = std::uint64_t(cfg.get_int("seed", 1));

    nlohmann::json j;
    if (attack == "reward-general" || attack == "reward-nontarget") {
        const RewardAttackResult res =
            attack == "reward-general"
                ? attack_reward_general(prob.env.mdp, prob.env.target, prob.eps, prob.p)
                : attack_reward_nontarget(prob.env.mdp, prob.env.target, prob.eps, prob.p);
        j = result_json(attack, prob.eps, prob.delta, prob.p, res.cost, res.lower_bound,
                        res.upper_bound, true, res.mdp_hat);
    } else if (attack == "dyn-nontarget" || attack == "dyn-constructive" ||
               attack == "dyn-general") {
        DynAttackResult res =
            attack == "dyn-nontarget"
                ? attack_dynamics_nontarget(prob.env.mdp, prob.env.target, prob.eps,
                                            prob.delta, prob.p)
                : (attack == "dyn-constructive"
                       ? attack_dynamics_constructive(prob.env.mdp, prob.env.target,
                                                      prob.eps, prob.delta, prob.p)
                       : attack_dynamics_general(prob.env.mdp, prob.env.target, prob.eps,
                                                 prob.delta, prob.p, pool_size, seed));
        j = result_json(attack, prob.eps, prob.delta, prob.p, res.cost, res.lower_bound,
                        res.upper_bound, res.feasible, res.mdp_hat);
        if (!res.feasible) {
            std::cout << "infeasible: analytic margin below eps\n";
            if (!out_path.empty()) std::ofstream(out_path) << j.dump(2) << "\n";
            return kExitInfeasible;
        }
    } else {
        throw DomainError("unknown attack: " + attack);
    }

    std::cout << attack << " cost=" << csv_num(j["cost"].get<double>())
              << " lower=" << csv_num(j["lower_bound"].get<double>())
              << (j["upper_bound_finite"].get<bool>()
                      ? " upper=" + csv_num(j["upper_bound"].get<double>())
                      : std::string(" upper=inf"))
              << "\n";
    if (!out_path.empty()) std::ofstream(out_path) << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_sweep_offline(const KvConfig& cfg) {
    const OfflineSweepConfig sc = OfflineSweepConfig::from(cfg);
    const std::string out_path = cfg.get_str("out", "");
    const std::string timing_path = cfg.get_str("timing_out", "");
    std::ofstream timing_file;
    std::ostream* timing = nullptr;
    if (!timing_path.empty()) {
        timing_file.open(timing_path);
        timing = &timing_file;
    }
    if (out_path.empty()) {
        run_offline_sweep(sc, std::cout, timing);
    } else {
        std::ofstream out(out_path);
        if (!out) throw DomainError("cannot open for writing: " + out_path);
        run_offline_sweep(sc, out, timing);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_sweep_online(const KvConfig& cfg) {
    const OnlineSweepConfig sc = OnlineSweepConfig::from(cfg);
    const std::string out_path = cfg.get_str("out", "");
    if (out_path.empty()) {
        run_online_sweep(sc, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw DomainError("cannot open for writing: " + out_path);
        run_online_sweep(sc, out);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_bench(const KvConfig& cfg) {
    report_runtimes(std::cout, int(cfg.get_int("pool_size", 32)),
                    std::uint64_t(cfg.get_int("seed", 1)));
    return kExitOk;
}

// Property checks against an MDP/target pair; one line per check.
int cmd_verify(const KvConfig& cfg) {
    const Problem prob = load_problem(cfg);
    const Mdp& mdp = prob.env.mdp;
    const DetPolicy& target = prob.env.target;
    const int n = mdp.n_states(), m = mdp.n_actions();
    int failures = 0;
    auto report = [&](const char* name, bool ok, double value) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << csv_num(value) << ")\n";
        if (!ok) ++failures;
    };

    bool ergodic = check_ergodic(mdp, target);
    for (int s = 0; s < n && ergodic; ++s)
        for (int a = 0; a < m && ergodic; ++a)
            ergodic = check_ergodic(mdp, neighbor(target, s, a));
    report("ergodic under target and every deviation", ergodic, ergodic ? 1 : 0);
    if (!ergodic) return kExitError;

    const PolicyStats st = evaluate_policy(mdp, target);
    const Eigen::MatrixXd K = mdp.policy_kernel(target);
    const double mu_resid =
        (K.transpose() * st.stationary - st.stationary).lpNorm<Eigen::Infinity>();
    report("stationary balance residual <= 1e-9", mu_resid <= 1e-9, mu_resid);

    const double norm_resid = std::abs(st.stationary.dot(st.bias_v));
    report("bias normalization |mu . v| <= 1e-8", norm_resid <= 1e-8, norm_resid);

    double q_resid = 0.0;
    for (int s = 0; s < n; ++s)
        q_resid = std::max(q_resid, std::abs(st.q(s, target(s)) - st.bias_v[s]));
    report("q(s, target) = v(s) within 1e-8", q_resid <= 1e-8, q_resid);

    // Gain difference vs the weighted advantage decomposition.
    double decomp_err = 0.0;
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            const DetPolicy dev = neighbor(target, s, a);
            const Eigen::VectorXd mu_dev = stationary_distribution(mdp, dev);
            const double lhs = st.gain - mu_dev.dot(mdp.policy_reward(dev));
            const double rhs = mu_dev[s] * (st.q(s, target(s)) - st.q(s, a));
            decomp_err = std::max(decomp_err, std::abs(lhs - rhs));
        }
    report("gain gap equals weighted advantage within 1e-8", decomp_err <= 1e-8,
           decomp_err);

    const Eigen::MatrixXd hits = hitting_times(mdp, target);
    double hit_resid = 0.0;
    for (int tgt = 0; tgt < n; ++tgt)
        for (int s = 0; s < n; ++s) {
            if (s == tgt) continue;
            double acc = 1.0;
            for (int x = 0; x < n; ++x)
                if (x != tgt) acc += K(s, x) * hits(x, tgt);
            hit_resid = std::max(hit_resid, std::abs(hits(s, tgt) - acc));
        }
    report("hitting-time recurrence residual <= 1e-8", hit_resid <= 1e-8, hit_resid);

    double mass_err = 0.0;
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            const Eigen::VectorXd row = mdp.trans_row(s, a);
            double denom = 1.0;
            for (int x = 0; x < n; ++x)
                if (x != s) denom += row[x] * hits(x, s);
            const Eigen::VectorXd mu_dev =
                stationary_distribution(mdp, neighbor(target, s, a));
            mass_err = std::max(mass_err, std::abs(mu_dev[s] - 1.0 / denom));
        }
    report("deviation mass matches hitting-time form within 1e-8", mass_err <= 1e-8,
           mass_err);

    const bool robust = is_eps_robust_optimal(mdp, target, prob.eps);
    std::cout << "INFO target is " << (robust ? "" : "not ")
              << "eps-robust optimal at eps=" << csv_num(prob.eps) << "\n";

    return failures == 0 ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"average-reward environment poisoning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string subcmd;
    for (const char* name : {"attack", "sweep-offline", "sweep-online", "bench", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--set", overrides, "override a config key (key=value)");
        sub->callback([&subcmd, name] { subcmd = name; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        const KvConfig cfg = merge_config(config_path, overrides);
        if (subcmd == "attack") return cmd_attack(cfg);
        if (subcmd == "sweep-offline") return cmd_sweep_offline(cfg);
        if (subcmd == "sweep-online") return cmd_sweep_online(cfg);
        if (subcmd == "bench") return cmd_bench(cfg);
        if (subcmd == "verify") return cmd_verify(cfg);
    } catch (const InfeasibleProblem& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
