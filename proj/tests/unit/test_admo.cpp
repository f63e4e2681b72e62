#include <doctest.h>

#include <cmath>
#include <random>

#include "nafd/admo.hpp"
#include "oracles.hpp"

using namespace nafd;

namespace {

SystemConfig small_config(std::uint64_t seed) {
    SystemConfig c;
    c.num_aps = 4;
    c.antennas = 8;
    c.num_dl_ues = 2;
    c.num_ul_ues = 2;
    c.seed = seed;
    return c;
}

Evaluation row(double f1, double f2) {
    Evaluation e;
    e.obj = {f1, f2};
    return e;
}

}  // namespace

TEST_SUITE("admo") {
    TEST_CASE("MLP forward matches the loop oracle") {
        const auto p = MlpParams::random({5, 7, 3, 5}, 4);
        for (std::uint64_t s : {0u, 5u, 31u}) {
            const auto got = mlp_forward(p, encode_state(s, 5));
            const auto ref = oracle::forward(p, s);
            for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-13));
        }
        CHECK(encode_state(0b101, 4) == std::vector<double>{1, 0, 1, 0});
        CHECK_THROWS(MlpParams::zeros({4}));
    }

    TEST_CASE("loss and backpropagated gradient match the oracle") {
        std::mt19937_64 rng(17);
        for (int draw = 0; draw < 10; ++draw) {
            const auto p = oracle::random_params({6, 10, 10, 6}, rng);
            const auto target = oracle::random_params({6, 10, 10, 6}, rng);
            const auto batch = oracle::random_batch(6, 8, rng);
            CHECK(mlp_loss(p, batch, target, 0.7) == doctest::Approx(oracle::td_loss(p, batch, target, 0.7)));
            CHECK(oracle::gradient_rel_error(p, batch, target, 0.7) <= 1e-5);
        }
    }

    TEST_CASE("a train step lowers the loss for a small rate") {
        std::mt19937_64 rng(2);
        auto p = MlpParams::random({4, 8, 4}, 1);
        const auto target = MlpParams::random({4, 8, 4}, 2);
        const auto batch = oracle::random_batch(4, 16, rng);
        const double before = mlp_train_step(p, batch, target, 1e-3, 0.5);
        CHECK(mlp_loss(p, batch, target, 0.5) < before);
        auto q = MlpParams::random({4, 8, 4}, 1);
        auto huge = batch;
        huge[0].reward = 1e300;
        CHECK_THROWS_AS(mlp_train_step(q, huge, target, 1.0, 0.5), DivergenceError);
    }

    TEST_CASE("Pareto front equals the brute-force filter, ties included") {
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<int> coarse(0, 6);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Evaluation> table;
            for (int i = 0; i < 40; ++i) table.push_back(row(coarse(rng), coarse(rng)));
            CHECK(pareto_front(table) == oracle::brute_force_front(table));
        }
        const std::vector<Evaluation> t{row(1, 3), row(2, 2), row(3, 1), row(1, 1), row(2, 2)};
        CHECK(pareto_front(t) == std::vector<std::size_t>{0, 1, 2, 4});
    }

    TEST_CASE("front distance uses range-normalized axes") {
        const std::vector<Evaluation> t{row(0, 10), row(10, 0), row(0, 0)};
        const auto front = pareto_front(t);
        CHECK(front_distance({0, 10}, t, front) == doctest::Approx(0.0));
        CHECK(front_distance({5, 5}, t, front) == doctest::Approx(0.0).scale(1.0));
        CHECK(front_distance({0, 0}, t, front) == doctest::Approx(std::sqrt(0.5)));
        CHECK_THROWS(front_distance({0, 0}, t, {}));
    }

    TEST_CASE("exhaustive search is the table maximum and baselines never beat it") {
        const ChannelStatistics st(build_scenario(small_config(3)));
        const ObjectiveEvaluator ev(st);
        const RewardWeights w;
        const auto ex = exhaustive_search(w, ev);
        REQUIRE(ex.table.size() == 16);
        double best = -1.0;
        for (std::size_t i = 0; i < ex.table.size(); ++i) {
            CHECK(ex.table[i].assignment.mask() == i);
            CHECK(ex.table[i].reward == doctest::Approx(0.5 * ex.table[i].obj.f1 + 0.5 * ex.table[i].obj.f2));
            best = std::max(best, ex.table[i].reward);
        }
        CHECK(ex.best.reward == best);
        CHECK(ev.cache_size() == 16);
        CHECK(avg_baseline(w, ev).reward <= best);
        for (const auto& e : random_baseline(1, 10, w, ev)) CHECK(e.reward <= best);
        const auto direct = compute_objectives(DuplexAssignment::from_bits("1001"), st);
        CHECK(ev.objectives(DuplexAssignment::from_bits("1001")).f1 == direct.f1);
    }

    TEST_CASE("RL solvers are seed-deterministic and bounded by EXU") {
        const ChannelStatistics st(build_scenario(small_config(5)));
        const ObjectiveEvaluator ev(st);
        const RewardWeights w;
        DqnConfig cfg;
        cfg.episodes = 60;
        const double best = exhaustive_search(w, ev).best.reward;
        for (Solver s : {Solver::QLearn, Solver::Dqn}) {
            const auto a = run_solver(s, w, ev, cfg, 11);
            const auto b = run_solver(s, w, ev, cfg, 11);
            REQUIRE(a.trace);
            CHECK(a.best.reward <= best);
            CHECK(a.trace->best_seen.reward <= best);
            CHECK(a.best.assignment == b.best.assignment);
            CHECK(a.trace->episode_mean_reward == b.trace->episode_mean_reward);
            CHECK(a.trace->episode_mean_reward.size() == 60);
            CHECK_FALSE(a.trace->diverged);
        }
    }

    TEST_CASE("epsilon schedule and config guards") {
        DqnConfig cfg;
        CHECK(cfg.epsilon_after(0) == cfg.eps_start);
        CHECK(cfg.epsilon_after(1000000) == doctest::Approx(cfg.eps_end));
        CHECK(cfg.epsilon_after(10) >= cfg.epsilon_after(20));
        cfg.gamma = 1.0;
        CHECK_THROWS(cfg.validate());
        cfg = DqnConfig{};
        cfg.replay_capacity = 4;
        CHECK_THROWS(cfg.validate());
        CHECK_THROWS(RewardWeights{0.0, 0.0}.validate());
        CHECK_THROWS(RewardWeights{-1.0, 1.0}.validate());
    }

    TEST_CASE("size limits") {
        SystemConfig c = small_config(1);
        c.num_aps = 17;
        c.antennas = 2;
        c.num_dl_ues = c.num_ul_ues = 1;
        c.num_targets = 1;
        const ChannelStatistics st(build_scenario(c));
        const ObjectiveEvaluator ev(st);
        CHECK_THROWS_AS(qlearning_train(DqnConfig{}, RewardWeights{}, ev, 1), SizeError);
        CHECK(parse_solver("exu") == Solver::Exu);
        CHECK_THROWS(parse_solver("greedy"));
    }

    TEST_CASE("cdf experiment has one reward per solver and scenario") {
        SystemConfig c = small_config(0);
        DqnConfig cfg;
        cfg.episodes = 20;
        const auto t = cdf_experiment(c, 3, RewardWeights{}, all_solvers(), cfg, 4);
        REQUIRE(t.rewards.size() == 5);
        for (const auto& r : t.rewards) CHECK(r.size() == 3);
        const std::string csv = cdf_csv(t);
        CHECK(csv.rfind("solver,objective,cdf\n", 0) == 0);
        CHECK(csv.find("dqn,") != std::string::npos);
    }
}
