#include <cmath>
#include <random>

#include "nafd/admo.hpp"
#include "nafd/kernels.hpp"

namespace nafd {

MlpParams MlpParams::zeros(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw std::invalid_argument("MLP needs at least input and output layers");
    MlpParams p;
    p.sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        if (sizes[l] < 1 || sizes[l + 1] < 1) throw std::invalid_argument("MLP layer widths must be >= 1");
        p.w.emplace_back(static_cast<std::size_t>(sizes[l + 1]) * sizes[l], 0.0);
        p.b.emplace_back(sizes[l + 1], 0.0);
    }
    return p;
}

MlpParams MlpParams::random(const std::vector<int>& sizes, std::uint64_t seed) {
    MlpParams p = zeros(sizes);
    std::mt19937_64 rng(seed);
    for (int l = 0; l < p.layers(); ++l) {
        const double limit = std::sqrt(6.0 / sizes[l]);
        std::uniform_real_distribution<double> u(-limit, limit);
        for (auto& v : p.w[l]) v = u(rng);
    }
    return p;
}

bool MlpParams::finite() const {
    for (const auto& layer : w)
        for (double v : layer)
            if (!std::isfinite(v)) return false;
    for (const auto& layer : b)
        for (double v : layer)
            if (!std::isfinite(v)) return false;
    return true;
}

std::vector<double> encode_state(std::uint64_t mask, int m) {
    std::vector<double> s(m);
    for (int i = 0; i < m; ++i) s[i] = static_cast<double>((mask >> i) & 1U);
    return s;
}

namespace {

// Activations of every layer: acts[0] is the input, acts.back() the Q-vector.
// pre[l] holds the pre-activation of layer l + 1.
struct Forward {
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> pre;
};

void forward_pass(const MlpParams& p, std::span<const double> x, Forward& f) {
    const int L = p.layers();
    if (static_cast<int>(x.size()) != p.sizes[0]) throw std::invalid_argument("MLP input size mismatch");
    f.acts.resize(L + 1);
    f.pre.resize(L);
    f.acts[0].assign(x.begin(), x.end());
    for (int l = 0; l < L; ++l) {
        const int in = p.sizes[l], out = p.sizes[l + 1];
        auto& z = f.pre[l];
        auto& a = f.acts[l + 1];
        z.resize(out);
        a.resize(out);
        const double* w = p.w[l].data();
        const double* prev = f.acts[l].data();
        for (int i = 0; i < out; ++i) {
            z[i] = kernels::dot(w + static_cast<std::size_t>(i) * in, prev, in) + p.b[l][i];
            a[i] = (l + 1 < L) ? std::max(z[i], 0.0) : z[i];
        }
    }
}

double max_q(const std::vector<double>& q) {
    double best = q[0];
    for (double v : q) best = std::max(best, v);
    return best;
}

}  // namespace

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> state) {
    Forward f;
    forward_pass(p, state, f);
    return f.acts.back();
}

double mlp_loss(const MlpParams& p, std::span<const Experience> batch, const MlpParams& target, double gamma) {
    if (batch.empty()) return 0.0;
    const int m = p.sizes[0];
    double loss = 0.0;
    for (const auto& e : batch) {
        const double y = e.reward + gamma * max_q(mlp_forward(target, encode_state(e.next_state, m)));
        const double q = mlp_forward(p, encode_state(e.state, m))[e.action];
        loss += (y - q) * (y - q);
    }
    return loss / static_cast<double>(batch.size());
}

MlpParams mlp_gradient(const MlpParams& p, std::span<const Experience> batch, const MlpParams& target, double gamma,
                       double* loss) {
    MlpParams g = MlpParams::zeros(p.sizes);
    const int L = p.layers();
    const int m = p.sizes[0];
    double total = 0.0;
    if (batch.empty()) {
        if (loss) *loss = 0.0;
        return g;
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Forward f, ft;
    std::vector<double> delta, prev_delta;
    for (const auto& e : batch) {
        if (e.action < 0 || e.action >= p.sizes.back()) throw std::invalid_argument("experience action out of range");
        forward_pass(target, encode_state(e.next_state, m), ft);
        const double y = e.reward + gamma * max_q(ft.acts.back());
        forward_pass(p, encode_state(e.state, m), f);
        const double diff = y - f.acts.back()[e.action];
        total += diff * diff;

        delta.assign(p.sizes.back(), 0.0);
        delta[e.action] = -2.0 * diff * inv_b;
        for (int l = L - 1; l >= 0; --l) {
            const int in = p.sizes[l], out = p.sizes[l + 1];
            const double* x = f.acts[l].data();
            double* gw = g.w[l].data();
            prev_delta.assign(in, 0.0);
            for (int i = 0; i < out; ++i) {
                if (delta[i] == 0.0) continue;
                g.b[l][i] += delta[i];
                kernels::axpy(delta[i], x, gw + static_cast<std::size_t>(i) * in, in);
                if (l > 0) kernels::axpy(delta[i], p.w[l].data() + static_cast<std::size_t>(i) * in, prev_delta.data(), in);
            }
            if (l > 0) {
                for (int j = 0; j < in; ++j)
                    if (!(f.pre[l - 1][j] > 0.0)) prev_delta[j] = 0.0;
                delta.swap(prev_delta);
            }
        }
    }
    if (loss) *loss = total * inv_b;
    return g;
}

double mlp_train_step(MlpParams& p, std::span<const Experience> batch, const MlpParams& target, double lr,
                      double gamma) {
    double loss = 0.0;
    const MlpParams g = mlp_gradient(p, batch, target, gamma, &loss);
    if (!std::isfinite(loss)) throw DivergenceError("non-finite training loss");
    for (int l = 0; l < p.layers(); ++l) {
        kernels::axpy(-lr, g.w[l].data(), p.w[l].data(), p.w[l].size());
        kernels::axpy(-lr, g.b[l].data(), p.b[l].data(), p.b[l].size());
    }
    if (!p.finite()) throw DivergenceError("non-finite network parameters after update");
    return loss;
}

}  // namespace nafd
