#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nafd/scenario.hpp"
#include "nafd/statistics.hpp"

namespace nafd {

struct Objectives {
    double f1 = 0.0;  // sum rate
    double f2 = 0.0;  // sum localization error rate
};

struct RewardWeights {
    double comm = 0.5;
    double sense = 0.5;
    void validate() const;
    double reward(const Objectives& o) const { return comm * o.f1 + sense * o.f2; }
};

// Closed-form objectives per assignment, memoized. Safe for concurrent use.
class ObjectiveEvaluator {
public:
    explicit ObjectiveEvaluator(const ChannelStatistics& stats) : stats_(stats) {}

    int num_aps() const { return stats_.M(); }
    const ChannelStatistics& stats() const { return stats_; }
    Objectives objectives(const DuplexAssignment& a) const;
    Objectives objectives(std::uint64_t mask) const;
    std::size_t cache_size() const;

private:
    const ChannelStatistics& stats_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::uint64_t, Objectives> cache_;
};

// Uncached composition of the rate and sensing modules.
Objectives compute_objectives(const DuplexAssignment& a, const ChannelStatistics& stats);

struct Evaluation {
    DuplexAssignment assignment;
    Objectives obj;
    double reward = 0.0;
};

Evaluation evaluate_assignment(const DuplexAssignment& a, const RewardWeights& w, const ObjectiveEvaluator& ev);

inline constexpr int kMaxExhaustiveAps = 24;
inline constexpr int kMaxTabularAps = 16;

struct ExhaustiveResult {
    Evaluation best;
    std::vector<Evaluation> table;  // indexed by assignment mask
};

// Throws SizeError above kMaxExhaustiveAps.
ExhaustiveResult exhaustive_search(const RewardWeights& w, const ObjectiveEvaluator& ev);
std::vector<Evaluation> random_baseline(std::uint64_t seed, int draws, const RewardWeights& w, const ObjectiveEvaluator& ev);
Evaluation avg_baseline(const RewardWeights& w, const ObjectiveEvaluator& ev);

// ---- Q-network ----

struct MlpParams {
    std::vector<int> sizes;                 // layer widths, input first
    std::vector<std::vector<double>> w;     // [layer] row-major (out x in)
    std::vector<std::vector<double>> b;     // [layer] (out)

    static MlpParams zeros(const std::vector<int>& sizes);
    // He-uniform weights, zero biases.
    static MlpParams random(const std::vector<int>& sizes, std::uint64_t seed);
    int layers() const { return static_cast<int>(w.size()); }
    bool finite() const;
};

std::vector<double> encode_state(std::uint64_t mask, int m);
std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> state);

struct Experience {
    std::uint64_t state = 0;
    int action = 0;
    double reward = 0.0;
    std::uint64_t next_state = 0;
    bool valid() const { return next_state == (state ^ (std::uint64_t{1} << action)); }
};

// Mean over the batch of (r + gamma max_a Q_target(s', a) - Q(s, a_t))^2.
double mlp_loss(const MlpParams& p, std::span<const Experience> batch, const MlpParams& target, double gamma);
// Gradient of mlp_loss with respect to p, same layout as p.
MlpParams mlp_gradient(const MlpParams& p, std::span<const Experience> batch, const MlpParams& target, double gamma,
                       double* loss = nullptr);
// One plain gradient-descent step; returns the pre-step loss. Throws
// DivergenceError on a non-finite loss or parameters.
double mlp_train_step(MlpParams& p, std::span<const Experience> batch, const MlpParams& target, double lr,
                      double gamma);

// ---- reinforcement learning solvers ----

enum class EvalStart { Balanced, Random };

struct DqnConfig {
    int episodes = 500;        // E_max
    int steps = 10;            // t_max
    double lr = 0.01;
    double gamma = 0.5;
    double eps_start = 1.0;
    double eps_end = 0.05;
    int target_update = 10;    // t_update, in environment steps
    // Number of target updates over which epsilon reaches eps_end; 0 spreads
    // the decay over the first 80% of training.
    int eps_decay_updates = 0;
    int replay_capacity = 2000;
    int batch = 32;
    std::vector<int> hidden{20, 20};
    // Rewards are standardized with the mean and spread of this many random
    // probe states before they reach the learner (0 disables it).
    int reward_probe_states = 16;
    // Greedy rollout used to report the trained policy's assignment.
    EvalStart eval_start = EvalStart::Balanced;
    int eval_steps = 10;
    bool record_transitions = false;

    void validate() const;
    double epsilon_after(int updates) const;
};

struct TrainingTrace {
    std::vector<double> episode_mean_reward;
    std::vector<double> episode_loss;  // mean loss of the episode's train steps (0 if none)
    std::vector<double> step_loss;
    std::vector<Experience> transitions;  // filled when record_transitions
    Evaluation best_seen;                 // best over every visited state
    Evaluation result;                    // best state on the greedy rollout
    double reward_offset = 0.0;  // learner sees (reward - offset) / scale
    double reward_scale = 1.0;
    bool diverged = false;
    std::string error;
};

// Throws SizeError above kMaxTabularAps.
TrainingTrace qlearning_train(const DqnConfig& cfg, const RewardWeights& w, const ObjectiveEvaluator& ev,
                              std::uint64_t seed);
TrainingTrace dqn_train(const DqnConfig& cfg, const RewardWeights& w, const ObjectiveEvaluator& ev,
                        std::uint64_t seed);

// ---- Pareto ----

// Indices (ascending) of rows not dominated in (f1, f2).
std::vector<std::size_t> pareto_front(std::span<const Evaluation> table);

// Euclidean distance from p to the polyline through the front points after
// scaling each objective by the table's range.
double front_distance(const Objectives& p, std::span<const Evaluation> table, std::span<const std::size_t> front);

// ---- experiments ----

enum class Solver { Random, Avg, Exu, QLearn, Dqn };
std::string solver_name(Solver s);
Solver parse_solver(const std::string& name);  // throws std::invalid_argument
const std::vector<Solver>& all_solvers();

struct SolverOutcome {
    Evaluation best;
    std::optional<TrainingTrace> trace;
    std::optional<ExhaustiveResult> exhaustive;
};

SolverOutcome run_solver(Solver s, const RewardWeights& w, const ObjectiveEvaluator& ev, const DqnConfig& cfg,
                         std::uint64_t seed);

struct CdfTable {
    std::vector<Solver> solvers;
    std::vector<std::vector<double>> rewards;  // [solver][scenario], scenario order
};

CdfTable cdf_experiment(const SystemConfig& base, int num_scenarios, const RewardWeights& w,
                        const std::vector<Solver>& solvers, const DqnConfig& cfg, std::uint64_t seed);
// Rows (solver, objective, cdf) with objectives sorted ascending per solver.
std::string cdf_csv(const CdfTable& t);

}  // namespace nafd
