#include <algorithm>
#include <cmath>
#include <random>

#include "nafd/admo.hpp"

namespace nafd {

void DqnConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid RL configuration: " + what); };
    if (episodes < 0) fail("episodes must be >= 0");
    if (steps < 1) fail("steps must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) fail("lr must be finite and >= 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must be in [0, 1)");
    if (!(eps_start >= 0.0 && eps_start <= 1.0) || !(eps_end >= 0.0 && eps_end <= 1.0)) fail("epsilon must be in [0, 1]");
    if (target_update < 1) fail("target_update must be >= 1");
    if (eps_decay_updates < 0) fail("eps_decay_updates must be >= 0");
    if (batch < 1) fail("batch must be >= 1");
    if (replay_capacity < batch) fail("replay_capacity must be >= batch");
    for (int h : hidden)
        if (h < 1) fail("hidden layer widths must be >= 1");
    if (reward_probe_states < 0) fail("reward_probe_states must be >= 0");
    if (eval_steps < 0) fail("eval_steps must be >= 0");
}

double DqnConfig::epsilon_after(int updates) const {
    int horizon = eps_decay_updates;
    if (horizon == 0) {
        const long total = static_cast<long>(episodes) * steps / target_update;
        horizon = static_cast<int>(std::max(1L, total * 4 / 5));
    }
    const double frac = std::min(1.0, static_cast<double>(updates) / horizon);
    return eps_start + (eps_end - eps_start) * frac;
}

namespace {

std::uint64_t random_state(std::mt19937_64& rng, int m) {
    std::uniform_int_distribution<std::uint64_t> d(0, (std::uint64_t{1} << m) - 1);
    return d(rng);
}

std::uint64_t start_state(const DqnConfig& cfg, int m, std::mt19937_64& rng) {
    return cfg.eval_start == EvalStart::Balanced ? DuplexAssignment::balanced(m).mask() : random_state(rng, m);
}

struct RewardNormalizer {
    double offset = 0.0;
    double scale = 1.0;
};

// Standardizes rewards with the mean and spread of random probe states. A
// positive affine map leaves the optimal policy unchanged because every
// transition bootstraps.
RewardNormalizer reward_normalizer(const DqnConfig& cfg, const RewardWeights& w, const ObjectiveEvaluator& ev,
                                   std::uint64_t seed) {
    RewardNormalizer out;
    if (cfg.reward_probe_states == 0) return out;
    std::mt19937_64 rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < cfg.reward_probe_states; ++i) {
        const double r = w.reward(ev.objectives(random_state(rng, ev.num_aps())));
        sum += r;
        sum_sq += r * r;
    }
    const double n = cfg.reward_probe_states;
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    if (std::isfinite(mean)) out.offset = mean;
    const double sd = std::sqrt(var);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean)) && std::isfinite(sd)) out.scale = sd;
    else if (std::abs(mean) > 0.0 && std::isfinite(mean)) out.scale = std::abs(mean);
    return out;
}

int argmax(const double* q, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

// Shared episode driver. The policy callback returns greedy Q-values for a
// state; learn() consumes each transition and returns a loss when it trained.
template <class QValues, class Learn, class OnTargetUpdate>
TrainingTrace run_episodes(const DqnConfig& cfg, const RewardWeights& w, const ObjectiveEvaluator& ev,
                           std::uint64_t seed, QValues&& qvalues, Learn&& learn, OnTargetUpdate&& on_update) {
    cfg.validate();
    w.validate();
    const int m = ev.num_aps();
    TrainingTrace trace;
    const RewardNormalizer norm = reward_normalizer(cfg, w, ev, mix_seed(seed, 11));
    trace.reward_offset = norm.offset;
    trace.reward_scale = norm.scale;
    std::mt19937_64 rng(mix_seed(seed, 12));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, m - 1);

    auto eval = [&](std::uint64_t s) { return evaluate_assignment(DuplexAssignment::from_mask(s, m), w, ev); };
    auto note_best = [&](const Evaluation& e) {
        if (trace.best_seen.assignment.size() == 0 || e.reward > trace.best_seen.reward) trace.best_seen = e;
    };

    long step = 0;
    int updates = 0;
    double eps = cfg.epsilon_after(0);
    try {
        for (int ep = 0; ep < cfg.episodes; ++ep) {
            std::uint64_t s = random_state(rng, m);
            note_best(eval(s));
            double reward_sum = 0.0, loss_sum = 0.0;
            int trained = 0;
            for (int t = 0; t < cfg.steps; ++t) {
                int a;
                if (unit(rng) < eps) {
                    a = pick(rng);
                } else {
                    const std::vector<double> q = qvalues(s);
                    a = argmax(q.data(), m);
                }
                const std::uint64_t next = s ^ (std::uint64_t{1} << a);
                const Evaluation e = eval(next);
                note_best(e);
                reward_sum += e.reward;
                const Experience x{s, a, (e.reward - norm.offset) / norm.scale, next};
                if (cfg.record_transitions) trace.transitions.push_back(x);
                if (const std::optional<double> loss = learn(x, rng)) {
                    trace.step_loss.push_back(*loss);
                    loss_sum += *loss;
                    ++trained;
                }
                ++step;
                if (step % cfg.target_update == 0) {
                    on_update();
                    eps = cfg.epsilon_after(++updates);
                }
                s = next;
            }
            trace.episode_mean_reward.push_back(reward_sum / cfg.steps);
            trace.episode_loss.push_back(trained ? loss_sum / trained : 0.0);
        }
    } catch (const DivergenceError& err) {
        trace.diverged = true;
        trace.error = err.what();
    }

    // Greedy rollout of the learned policy.
    std::uint64_t s = start_state(cfg, m, rng);
    trace.result = eval(s);
    note_best(trace.result);
    if (cfg.episodes > 0 && !trace.diverged) {
        for (int t = 0; t < cfg.eval_steps; ++t) {
            const std::vector<double> q = qvalues(s);
            s ^= std::uint64_t{1} << argmax(q.data(), m);
            const Evaluation e = eval(s);
            note_best(e);
            if (e.reward > trace.result.reward) trace.result = e;
        }
    }
    return trace;
}

}  // namespace

TrainingTrace qlearning_train(const DqnConfig& cfg, const RewardWeights& w, const ObjectiveEvaluator& ev,
                              std::uint64_t seed) {
    const int m = ev.num_aps();
    if (m > kMaxTabularAps) throw SizeError("tabular Q-learning limited to " + std::to_string(kMaxTabularAps) + " APs");
    std::vector<double> table((std::size_t{1} << m) * m, 0.0);
    auto row = [&](std::uint64_t s) { return table.data() + s * m; };
    auto qvalues = [&](std::uint64_t s) { return std::vector<double>(row(s), row(s) + m); };
    auto learn = [&](const Experience& x, std::mt19937_64&) -> std::optional<double> {
        const double* next = row(x.next_state);
        const double target = x.reward + cfg.gamma * *std::max_element(next, next + m);
        double& q = row(x.state)[x.action];
        const double td = target - q;
        q += cfg.lr * td;
        if (!std::isfinite(q)) throw DivergenceError("non-finite Q-table entry");
        return td * td;
    };
    return run_episodes(cfg, w, ev, seed, qvalues, learn, [] {});
}

TrainingTrace dqn_train(const DqnConfig& cfg, const RewardWeights& w, const ObjectiveEvaluator& ev,
                        std::uint64_t seed) {
    const int m = ev.num_aps();
    std::vector<int> sizes{m};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(m);
    MlpParams online = MlpParams::random(sizes, mix_seed(seed, 13));
    MlpParams target = online;

    std::vector<Experience> replay;
    replay.reserve(cfg.replay_capacity);
    std::size_t cursor = 0;
    std::vector<Experience> batch(cfg.batch);

    auto qvalues = [&](std::uint64_t s) { return mlp_forward(online, encode_state(s, m)); };
    auto learn = [&](const Experience& x, std::mt19937_64& rng) -> std::optional<double> {
        if (static_cast<int>(replay.size()) < cfg.replay_capacity) {
            replay.push_back(x);
        } else {
            replay[cursor] = x;
            cursor = (cursor + 1) % replay.size();
        }
        if (static_cast<int>(replay.size()) < cfg.batch) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
        for (auto& e : batch) e = replay[pick(rng)];
        return mlp_train_step(online, batch, target, cfg.lr, cfg.gamma);
    };
    return run_episodes(cfg, w, ev, seed, qvalues, learn, [&] { target = online; });
}

}  // namespace nafd
