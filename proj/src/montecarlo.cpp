#include "nafd/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "nafd/csv.hpp"
#include "nafd/kernels.hpp"

namespace nafd {

void MeanAccumulator::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

McEstimate MeanAccumulator::estimate() const {
    return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
}

void RatioAccumulator::add(double x, double y) {
    ++n_;
    const double n = static_cast<double>(n_);
    const double dx = x - mx_, dy = y - my_;
    mx_ += dx / n;
    my_ += dy / n;
    sxx_ += dx * (x - mx_);
    syy_ += dy * (y - my_);
    sxy_ += dx * (y - my_);
}

void RatioAccumulator::merge(const RatioAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_), n = na + nb;
    const double dx = o.mx_ - mx_, dy = o.my_ - my_;
    sxx_ += o.sxx_ + dx * dx * na * nb / n;
    syy_ += o.syy_ + dy * dy * na * nb / n;
    sxy_ += o.sxy_ + dx * dy * na * nb / n;
    mx_ += dx * nb / n;
    my_ += dy * nb / n;
    n_ += o.n_;
}

McEstimate RatioAccumulator::estimate() const {
    if (n_ == 0 || my_ == 0.0) return {0.0, 0.0, n_};
    const double r = mx_ / my_;
    if (n_ < 2) return {r, 0.0, n_};
    const double n1 = static_cast<double>(n_ - 1);
    const double var = (sxx_ - 2.0 * r * sxy_ + r * r * syy_) / n1;
    return {r, std::sqrt(std::max(var, 0.0) / static_cast<double>(n_)) / std::abs(my_), n_};
}

McEstimate RatioAccumulator::numerator() const {
    return {mx_, n_ > 1 ? std::sqrt(sxx_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0, n_};
}

McEstimate RatioAccumulator::denominator() const {
    return {my_, n_ > 1 ? std::sqrt(syy_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0, n_};
}

namespace {

CMat sqrt_factor(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
    double real() { return dist_(rng_); }
    cd complex() {
        static const double s = std::sqrt(0.5);
        const double re = dist_(rng_);
        return {s * re, s * dist_(rng_)};
    }
    // x = F z with z ~ CN(0, I)
    void correlated(const CMat& f, CVec& x, CVec& z) {
        const auto n = f.cols();
        z.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) z[i] = complex();
        x.setZero(f.rows());
        for (Eigen::Index j = 0; j < n; ++j)
            kernels::caxpy(z[j], f.col(j).data(), x.data(), static_cast<std::size_t>(f.rows()));
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> dist_;
};

}  // namespace

ChannelSampler::ChannelSampler(const ChannelStatistics& stats) : stats_(stats) {
    const int M = stats.M(), K = stats.K();
    f_r_.resize(static_cast<std::size_t>(M) * K);
    f_theta_.resize(f_r_.size());
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            f_r_[m * K + k] = sqrt_factor(stats.r_hat_ue(m, k));
            f_theta_[m * K + k] = sqrt_factor(stats.theta_ue(m, k));
        }
    }
    f_theta_ap_.resize(static_cast<std::size_t>(M) * M);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < M; ++n)
            if (m != n) f_theta_ap_[m * M + n] = sqrt_factor(stats.theta_ap(m, n));
}

void ChannelSampler::draw(RealizationBundle& out, std::uint64_t seed) const { draw_impl(out, seed, nullptr); }

void ChannelSampler::draw_for(RealizationBundle& out, std::uint64_t seed, const DuplexAssignment& a) const {
    draw_impl(out, seed, &a);
}

void ChannelSampler::draw_impl(RealizationBundle& out, std::uint64_t seed, const DuplexAssignment* a) const {
    const auto& sc = stats_.scenario();
    const int M = stats_.M(), N = stats_.N(), K = stats_.K(), T = stats_.T();
    const int kdl = stats_.num_dl(), kul = stats_.num_ul();
    const bool full = a == nullptr;
    out.seed = seed;
    out.M = M;
    out.N = N;
    out.K = K;
    out.T = T;
    out.h_ue_ap.resize(static_cast<std::size_t>(M) * K);
    out.h_ap_ap.resize(static_cast<std::size_t>(M) * M);
    out.h_ue_ue.resize(static_cast<std::size_t>(kul) * kdl);
    out.q.resize(static_cast<std::size_t>(M) * T);
    out.h_hat.resize(static_cast<std::size_t>(M) * K);
    out.err.resize(out.h_hat.size());
    out.err_ap.resize(static_cast<std::size_t>(M) * M);

    Gaussian g(seed);
    CVec z;

    // Per-draw target-link pieces, shared by every link through that target.
    std::vector<double> amp_tx(static_cast<std::size_t>(M) * T), amp_rx(amp_tx.size()), amp_ue(static_cast<std::size_t>(K) * T);
    std::vector<CVec> q_rx(static_cast<std::size_t>(M) * T);
    std::vector<cd> q_ue(static_cast<std::size_t>(K) * T);
    for (int m = 0; m < M; ++m) {
        for (int t = 0; t < T; ++t) {
            const auto& tx = stats_.ap_target(m, t);
            const auto& rx = stats_.ap_target_rx(m, t);
            amp_tx[m * T + t] = std::sqrt(tx.amp_sq) + std::sqrt(tx.gain_var) * g.real();
            amp_rx[m * T + t] = std::sqrt(rx.amp_sq) + std::sqrt(rx.gain_var) * g.real();
            CVec& q = out.q[m * T + t];
            q.resize(N);
            for (int i = 0; i < N; ++i) q[i] = tx.steer[i] + std::sqrt(tx.steer_var) * g.complex();
            CVec& qr = q_rx[m * T + t];
            qr.resize(N);
            for (int i = 0; i < N; ++i) qr[i] = rx.steer[i] + std::sqrt(rx.steer_var) * g.complex();
        }
    }
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t < T; ++t) {
            const auto& lk = stats_.ue_target(k, t);
            amp_ue[k * T + t] = std::sqrt(lk.amp_sq) + std::sqrt(lk.gain_var) * g.real();
            q_ue[k * T + t] = g.complex();
        }
    }

    if (full) {
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                CVec& h = out.h_ue_ap[m * K + k];
                h.resize(N);
                const double lam = std::sqrt(stats_.direct_amp_sq_ue_ap(m, k));
                for (int i = 0; i < N; ++i) h[i] = lam * g.complex();
                for (int t = 0; t < T; ++t) {
                    const cd c = sc.targets[t].reflection * amp_tx[m * T + t] * amp_ue[k * T + t] * q_ue[k * T + t];
                    h += c * out.q[m * T + t];
                }
            }
        }
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < M; ++n) {
                if (m == n) continue;
                CMat& h = out.h_ap_ap[m * M + n];
                h.resize(N, N);
                const double lam = std::sqrt(stats_.direct_amp_sq_ap_ap(m, n));
                for (Eigen::Index j = 0; j < h.size(); ++j) h.data()[j] = lam * g.complex();
                for (int t = 0; t < T; ++t) {
                    const double c = sc.targets[t].reflection * amp_tx[m * T + t] * amp_rx[n * T + t];
                    h += c * q_rx[n * T + t] * out.q[m * T + t].transpose();
                }
                h *= inv_sqrt_n;
            }
        }
    }
    for (int u = 0; u < kul; ++u) {
        for (int l = 0; l < kdl; ++l) {
            const int gu = sc.ul_ue(u), gl = sc.dl_ue(l);
            const double lam = link_amplitude(sc.config, sc.ues[gu].position, sc.ues[gl].position);
            cd h = lam * g.complex();
            for (int t = 0; t < T; ++t)
                h += sc.targets[t].reflection * amp_ue[gu * T + t] * q_ue[gu * T + t] * amp_ue[gl * T + t] * q_ue[gl * T + t];
            out.h_ue_ue[u * kdl + l] = h;
        }
    }

    // Estimation split.
    auto needed_ue = [&](int m, int k) {
        if (full) return true;
        const bool dl_ue = k < kdl;
        return dl_ue ? a->is_dl(m) : a->is_ul(m);
    };
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            if (!needed_ue(m, k)) continue;
            g.correlated(f_r_[m * K + k], out.h_hat[m * K + k], z);
            g.correlated(f_theta_[m * K + k], out.err[m * K + k], z);
        }
    }
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
    CMat zm(N, N);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < M; ++n) {
            if (m == n) continue;
            if (!full && !(a->is_dl(m) && a->is_ul(n))) continue;
            for (Eigen::Index j = 0; j < zm.size(); ++j) zm.data()[j] = g.complex();
            out.err_ap[m * M + n].noalias() = f_theta_ap_[m * M + n] * zm;
            out.err_ap[m * M + n] *= inv_sqrt_n;
        }
    }
}

RealizationBundle sample_channels(const ChannelStatistics& stats, std::uint64_t seed) {
    RealizationBundle b;
    ChannelSampler(stats).draw(b, seed);
    return b;
}

namespace {

InstantSinr finish(double num, double den) {
    InstantSinr s;
    s.num = num;
    s.den = den;
    if (den < kSinrDenominatorFloor) {
        s.guarded = true;
        s.sinr = num / kSinrDenominatorFloor;
    } else {
        s.sinr = num / den;
    }
    return s;
}

inline cd dotc(const CVec& a, const CVec& b) {
    return kernels::cdot(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

}  // namespace

InstantSinr instantaneous_dl_sinr(int l, const RealizationBundle& b, const DuplexAssignment& a,
                                  const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    const auto& sc = stats.scenario();
    const int K = b.K, T = b.T;
    const auto& el = nc.eps_dl[l];
    if (!el) return {};
    const int gl = sc.dl_ue(l);
    const double N = b.N;

    double gain = 0.0;
    for (int m : a.dl_aps()) gain += kernels::cnorm2(b.h_hat[m * K + gl].data(), b.N);
    const double num = sc.ues[gl].power * (*el) * (*el) * gain * gain;

    double den = stats.config().noise_dl;
    for (int k = 0; k < stats.num_dl(); ++k) {
        const auto& ek = nc.eps_dl[k];
        if (!ek) continue;
        const int gk = sc.dl_ue(k);
        cd inter = 0.0, err = 0.0;
        for (int m : a.dl_aps()) {
            if (k != l) inter += dotc(b.h_hat[m * K + gl], b.h_hat[m * K + gk]);
            err += dotc(b.err[m * K + gl], b.h_hat[m * K + gk]);
        }
        den += sc.ues[gk].power * (*ek) * (*ek) * (std::norm(inter) + std::norm(err));
    }
    for (int m : a.dl_aps())
        for (int t = 0; t < T; ++t)
            den += sc.targets[t].sensing_power * std::norm(dotc(b.err[m * K + gl], b.q[m * T + t])) / N;
    for (int u = 0; u < stats.num_ul(); ++u)
        den += sc.ues[sc.ul_ue(u)].power * std::norm(b.h_ue_ue[u * stats.num_dl() + l]);
    return finish(num, den);
}

InstantSinr instantaneous_ul_sinr(int u, const RealizationBundle& b, const DuplexAssignment& a,
                                  const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    const auto& sc = stats.scenario();
    const int M = b.M, K = b.K, T = b.T;
    const auto& eu = nc.eps_ul[u];
    if (!eu) return {};
    const int gu = sc.ul_ue(u);
    const double N = b.N;
    const double e2 = (*eu) * (*eu);

    double gain = 0.0;
    for (int n : a.ul_aps()) gain += kernels::cnorm2(b.h_hat[n * K + gu].data(), b.N);
    const double num = sc.ues[gu].power * e2 * gain * gain;

    double den = stats.config().noise_ul * e2 * gain;
    for (int k = 0; k < stats.num_ul(); ++k) {
        const int gk = sc.ul_ue(k);
        cd inter = 0.0, err = 0.0;
        for (int n : a.ul_aps()) {
            if (k != u) inter += dotc(b.h_hat[n * K + gu], b.h_hat[n * K + gk]);
            err += dotc(b.h_hat[n * K + gu], b.err[n * K + gk]);
        }
        den += sc.ues[gk].power * e2 * (std::norm(inter) + std::norm(err));
    }

    // Residual cross-link terms: v^H E_mn x for every DL transmission x.
    const int kdl = stats.num_dl();
    std::vector<cd> cli_c(kdl, 0.0);
    std::vector<cd> cli_s(static_cast<std::size_t>(M) * T, 0.0);
    CVec y(b.N);
    for (int m : a.dl_aps()) {
        for (int n : a.ul_aps()) {
            y.noalias() = b.err_ap[m * M + n].adjoint() * b.h_hat[n * K + gu];  // E^H v
            for (int j = 0; j < kdl; ++j)
                if (nc.eps_dl[j]) cli_c[j] += (*nc.eps_dl[j]) * dotc(y, b.h_hat[m * K + sc.dl_ue(j)]);
            for (int t = 0; t < T; ++t) cli_s[m * T + t] += dotc(y, b.q[m * T + t]);
        }
    }
    for (int j = 0; j < kdl; ++j) den += sc.ues[sc.dl_ue(j)].power * e2 * std::norm(cli_c[j]);
    for (int m : a.dl_aps())
        for (int t = 0; t < T; ++t) den += sc.targets[t].sensing_power * e2 * std::norm(cli_s[m * T + t]) / N;
    return finish(num, den);
}

McSinrResult mc_sinr(const ChannelStatistics& stats, const DuplexAssignment& a, std::size_t trials,
                     std::uint64_t seed) {
    const auto& cfg = stats.config();
    const int kdl = stats.num_dl(), kul = stats.num_ul();
    const RateReport closed = rate_report(a, stats);
    const NormalizationCoefficients& nc = closed.nc;

    std::vector<RatioAccumulator> ratio(kdl + kul);
    std::vector<MeanAccumulator> inst(kdl + kul), logr(kdl + kul);
    McSinrResult res;

    const ChannelSampler sampler(stats);
    RealizationBundle b;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        sampler.draw_for(b, mix_seed(seed, trial), a);
        for (int i = 0; i < kdl + kul; ++i) {
            const InstantSinr s = i < kdl ? instantaneous_dl_sinr(i, b, a, stats, nc)
                                          : instantaneous_ul_sinr(i - kdl, b, a, stats, nc);
            if (s.guarded) ++res.guarded;
            ratio[i].add(s.num, s.den);
            inst[i].add(s.sinr);
            logr[i].add(cfg.rate_prefactor() * std::log2(1.0 + s.sinr));
        }
    }
    for (int i = 0; i < kdl + kul; ++i) {
        UeMcResult r;
        r.direction = i < kdl ? Direction::Downlink : Direction::Uplink;
        r.index = i < kdl ? i : i - kdl;
        r.closed_form = i < kdl ? closed.dl[i].sinr : closed.ul[i - kdl].sinr;
        r.ratio = ratio[i].estimate();
        r.mean_sinr = inst[i].estimate();
        r.log_rate = logr[i].estimate();
        res.ues.push_back(r);
    }
    return res;
}

std::vector<ValidationRow> mc_validation_report(const SystemConfig& config, const std::vector<int>& n_sweep,
                                                std::size_t trials) {
    if (trials < kMinValidationTrials)
        throw std::invalid_argument("validation needs at least " + std::to_string(kMinValidationTrials) + " trials");
    std::vector<ValidationRow> rows;
    for (int n : n_sweep) {
        SystemConfig cfg = config;
        cfg.antennas = n;
        const Scenario sc = build_scenario(cfg);
        const ChannelStatistics stats(sc);
        const McSinrResult res = mc_sinr(stats, DuplexAssignment::balanced(cfg.num_aps), trials, cfg.seed);
        for (const auto& ue : res.ues) rows.push_back({n, ue, trials, cfg.seed});
    }
    return rows;
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
    std::string out = csv::row({"N", "ue_id", "direction", "closed_form", "mc_mean", "mc_stderr", "mc_log_form",
                                "trials", "seed"});
    for (const auto& r : rows) {
        out += csv::row({csv::num(static_cast<long long>(r.antennas)), csv::num(static_cast<long long>(r.ue.index)),
                         r.ue.direction == Direction::Downlink ? "DL" : "UL", csv::num(r.ue.closed_form),
                         csv::num(r.ue.ratio.mean), csv::num(r.ue.ratio.std_error), csv::num(r.ue.log_rate.mean),
                         csv::num(static_cast<long long>(r.trials)), std::to_string(r.seed)});
    }
    return out;
}

}  // namespace nafd
