#pragma once

// Reference implementations used only by the tests. They are written with
// plain loops, independent of the library's kernels and data layout tricks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nafd/admo.hpp"

namespace oracle {

inline std::vector<double> forward(const nafd::MlpParams& p, std::uint64_t mask) {
    std::vector<double> x(p.sizes[0]);
    for (int i = 0; i < p.sizes[0]; ++i) x[i] = (mask >> i) & 1U ? 1.0 : 0.0;
    for (int l = 0; l < p.layers(); ++l) {
        std::vector<double> y(p.sizes[l + 1]);
        for (int o = 0; o < p.sizes[l + 1]; ++o) {
            double z = p.b[l][o];
            for (int i = 0; i < p.sizes[l]; ++i) z += p.w[l][o * p.sizes[l] + i] * x[i];
            y[o] = l + 1 < p.layers() ? (z > 0.0 ? z : 0.0) : z;
        }
        x = std::move(y);
    }
    return x;
}

// Mean squared TD error with the target network held fixed.
inline double td_loss(const nafd::MlpParams& p, std::span<const nafd::Experience> batch,
                      const nafd::MlpParams& target, double gamma) {
    double acc = 0.0;
    for (const auto& e : batch) {
        const auto qt = forward(target, e.next_state);
        const double y = e.reward + gamma * *std::max_element(qt.begin(), qt.end());
        const double d = y - forward(p, e.state)[e.action];
        acc += d * d;
    }
    return acc / static_cast<double>(batch.size());
}

// Smallest |pre-activation| of any hidden unit over the batch states.
inline double min_hidden_preactivation(const nafd::MlpParams& p, std::span<const nafd::Experience> batch) {
    double out = 1e300;
    for (const auto& e : batch) {
        std::vector<double> x(p.sizes[0]);
        for (int i = 0; i < p.sizes[0]; ++i) x[i] = (e.state >> i) & 1U ? 1.0 : 0.0;
        for (int l = 0; l + 1 < p.layers(); ++l) {
            std::vector<double> y(p.sizes[l + 1]);
            for (int o = 0; o < p.sizes[l + 1]; ++o) {
                double z = p.b[l][o];
                for (int i = 0; i < p.sizes[l]; ++i) z += p.w[l][o * p.sizes[l] + i] * x[i];
                out = std::min(out, std::abs(z));
                y[o] = z > 0.0 ? z : 0.0;
            }
            x = std::move(y);
        }
    }
    return out;
}

// ||g_backprop - g_fd|| / max(||g_backprop||, ||g_fd||) with central
// differences of the oracle loss. The step shrinks below the nearest ReLU
// kink so both evaluations stay on the same linear piece.
inline double gradient_rel_error(nafd::MlpParams p, std::span<const nafd::Experience> batch,
                                 const nafd::MlpParams& target, double gamma) {
    const double h = std::min(1e-6, 1e-2 * min_hidden_preactivation(p, batch));
    const nafd::MlpParams g = nafd::mlp_gradient(p, batch, target, gamma);
    double diff = 0.0, nb = 0.0, nf = 0.0;
    auto probe = [&](double& v, double analytic) {
        const double keep = v;
        v = keep + h;
        const double up = td_loss(p, batch, target, gamma);
        v = keep - h;
        const double down = td_loss(p, batch, target, gamma);
        v = keep;
        const double fd = (up - down) / (2.0 * h);
        diff += (fd - analytic) * (fd - analytic);
        nb += analytic * analytic;
        nf += fd * fd;
    };
    for (int l = 0; l < p.layers(); ++l) {
        for (std::size_t i = 0; i < p.w[l].size(); ++i) probe(p.w[l][i], g.w[l][i]);
        for (std::size_t i = 0; i < p.b[l].size(); ++i) probe(p.b[l][i], g.b[l][i]);
    }
    const double scale = std::sqrt(std::max(nb, nf));
    return scale > 0.0 ? std::sqrt(diff) / scale : 0.0;
}

// Fully random parameters. Zero biases would put the all-zero state exactly on
// a ReLU kink, where central differences and the one-sided derivative differ.
inline nafd::MlpParams random_params(const std::vector<int>& sizes, std::mt19937_64& rng) {
    nafd::MlpParams p = nafd::MlpParams::random(sizes, rng());
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& layer : p.b)
        for (double& v : layer) v = u(rng);
    return p;
}

// Random valid transitions on an m-bit state space.
inline std::vector<nafd::Experience> random_batch(int m, int size, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> state(0, (std::uint64_t{1} << m) - 1);
    std::uniform_int_distribution<int> action(0, m - 1);
    std::normal_distribution<double> reward(0.0, 1.0);
    std::vector<nafd::Experience> out;
    for (int i = 0; i < size; ++i) {
        nafd::Experience e;
        e.state = state(rng);
        e.action = action(rng);
        e.next_state = e.state ^ (std::uint64_t{1} << e.action);
        e.reward = reward(rng);
        out.push_back(e);
    }
    return out;
}

// Quadratic dominance filter: keep rows no other row weakly beats in both
// objectives while strictly beating in one.
inline std::vector<std::size_t> brute_force_front(std::span<const nafd::Evaluation> table) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < table.size() && !dominated; ++j) {
            const auto& a = table[j].obj;
            const auto& b = table[i].obj;
            dominated = a.f1 >= b.f1 && a.f2 >= b.f2 && (a.f1 > b.f1 || a.f2 > b.f2);
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

}  // namespace oracle
