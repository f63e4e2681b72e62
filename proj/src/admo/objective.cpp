#include <cmath>
#include <random>

#include "nafd/admo.hpp"
#include "nafd/rates.hpp"
#include "nafd/sensing.hpp"

namespace nafd {

void RewardWeights::validate() const {
    if (!(comm >= 0.0) || !(sense >= 0.0) || !std::isfinite(comm) || !std::isfinite(sense))
        throw std::invalid_argument("reward weights must be finite and >= 0");
    if (comm == 0.0 && sense == 0.0) throw std::invalid_argument("reward weights must not both be 0");
}

Objectives compute_objectives(const DuplexAssignment& a, const ChannelStatistics& stats) {
    const RateReport rr = rate_report(a, stats);
    const SensingReport sr = sensing_report(a, stats, rr.nc);
    Objectives o{rr.sum_rate, sr.f2};
    if (!std::isfinite(o.f1) || !std::isfinite(o.f2))
        throw NumericalError("non-finite objective for assignment " + a.bits());
    return o;
}

Objectives ObjectiveEvaluator::objectives(const DuplexAssignment& a) const {
    if (a.size() != stats_.M()) throw std::invalid_argument("assignment size does not match AP count");
    const std::uint64_t key = a.mask();
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const Objectives o = compute_objectives(a, stats_);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, o);
    return o;
}

Objectives ObjectiveEvaluator::objectives(std::uint64_t mask) const {
    return objectives(DuplexAssignment::from_mask(mask, stats_.M()));
}

std::size_t ObjectiveEvaluator::cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

Evaluation evaluate_assignment(const DuplexAssignment& a, const RewardWeights& w, const ObjectiveEvaluator& ev) {
    Evaluation e;
    e.assignment = a;
    e.obj = ev.objectives(a);
    e.reward = w.reward(e.obj);
    return e;
}

ExhaustiveResult exhaustive_search(const RewardWeights& w, const ObjectiveEvaluator& ev) {
    w.validate();
    const int m = ev.num_aps();
    if (m > kMaxExhaustiveAps)
        throw SizeError("exhaustive search limited to " + std::to_string(kMaxExhaustiveAps) + " APs");
    ExhaustiveResult res;
    const std::uint64_t count = std::uint64_t{1} << m;
    res.table.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        res.table.push_back(evaluate_assignment(DuplexAssignment::from_mask(mask, m), w, ev));
        if (mask == 0 || res.table.back().reward > res.best.reward) res.best = res.table.back();
    }
    return res;
}

std::vector<Evaluation> random_baseline(std::uint64_t seed, int draws, const RewardWeights& w,
                                        const ObjectiveEvaluator& ev) {
    w.validate();
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<Evaluation> out;
    for (int d = 0; d < draws; ++d) {
        std::vector<std::uint8_t> mode(ev.num_aps());
        for (auto& v : mode) v = coin(rng) ? 1 : 0;
        out.push_back(evaluate_assignment(DuplexAssignment(std::move(mode)), w, ev));
    }
    return out;
}

Evaluation avg_baseline(const RewardWeights& w, const ObjectiveEvaluator& ev) {
    w.validate();
    return evaluate_assignment(DuplexAssignment::balanced(ev.num_aps()), w, ev);
}

}  // namespace nafd
