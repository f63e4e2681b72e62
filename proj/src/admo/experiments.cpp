#include <algorithm>

#include "nafd/admo.hpp"
#include "nafd/csv.hpp"

namespace nafd {

std::string solver_name(Solver s) {
    switch (s) {
        case Solver::Random: return "random";
        case Solver::Avg: return "avg";
        case Solver::Exu: return "exu";
        case Solver::QLearn: return "qlearn";
        case Solver::Dqn: return "dqn";
    }
    return "unknown";
}

Solver parse_solver(const std::string& name) {
    for (Solver s : all_solvers())
        if (solver_name(s) == name) return s;
    throw std::invalid_argument("unknown solver '" + name + "' (expected random, avg, exu, qlearn or dqn)");
}

const std::vector<Solver>& all_solvers() {
    static const std::vector<Solver> v{Solver::Random, Solver::Avg, Solver::Exu, Solver::QLearn, Solver::Dqn};
    return v;
}

SolverOutcome run_solver(Solver s, const RewardWeights& w, const ObjectiveEvaluator& ev, const DqnConfig& cfg,
                         std::uint64_t seed) {
    SolverOutcome out;
    switch (s) {
        case Solver::Random: out.best = random_baseline(seed, 1, w, ev).front(); break;
        case Solver::Avg: out.best = avg_baseline(w, ev); break;
        case Solver::Exu:
            out.exhaustive = exhaustive_search(w, ev);
            out.best = out.exhaustive->best;
            break;
        case Solver::QLearn:
            out.trace = qlearning_train(cfg, w, ev, seed);
            out.best = out.trace->result;
            break;
        case Solver::Dqn:
            out.trace = dqn_train(cfg, w, ev, seed);
            out.best = out.trace->result;
            break;
    }
    return out;
}

CdfTable cdf_experiment(const SystemConfig& base, int num_scenarios, const RewardWeights& w,
                        const std::vector<Solver>& solvers, const DqnConfig& cfg, std::uint64_t seed) {
    if (num_scenarios < 1) throw std::invalid_argument("cdf experiment needs at least one scenario");
    w.validate();
    CdfTable t;
    t.solvers = solvers;
    t.rewards.assign(solvers.size(), {});
    for (int i = 0; i < num_scenarios; ++i) {
        SystemConfig sc_cfg = base;
        sc_cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        const Scenario sc = build_scenario(sc_cfg);
        const ChannelStatistics stats(sc);
        const ObjectiveEvaluator ev(stats);
        for (std::size_t k = 0; k < solvers.size(); ++k) {
            const SolverOutcome o = run_solver(solvers[k], w, ev, cfg, mix_seed(sc_cfg.seed, 100 + static_cast<int>(solvers[k])));
            if (o.trace && o.trace->diverged)
                throw DivergenceError(solver_name(solvers[k]) + " diverged: " + o.trace->error);
            t.rewards[k].push_back(o.best.reward);
        }
    }
    return t;
}

std::string cdf_csv(const CdfTable& t) {
    std::string out = csv::row({"solver", "objective", "cdf"});
    for (std::size_t k = 0; k < t.solvers.size(); ++k) {
        std::vector<double> v = t.rewards[k];
        std::sort(v.begin(), v.end());
        for (std::size_t i = 0; i < v.size(); ++i)
            out += csv::row({solver_name(t.solvers[k]), csv::num(v[i]),
                             csv::num(static_cast<double>(i + 1) / static_cast<double>(v.size()))});
    }
    return out;
}

}  // namespace nafd
