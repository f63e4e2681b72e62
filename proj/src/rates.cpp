#include "nafd/rates.hpp"

#include <cmath>

namespace nafd {

GammaMoments gamma_from_sums(double sum, double sum_sq) {
    if (!(sum > 0.0) || !(sum_sq > 0.0)) throw DegenerateError("gamma_moments: all-zero diagonal");
    return {sum * sum / sum_sq, sum_sq / sum};
}

GammaMoments gamma_moments(std::span<const double> diag) {
    double s = 0.0, s2 = 0.0;
    for (double d : diag) {
        if (!(d >= 0.0)) throw DomainError("gamma_moments: negative diagonal entry");
        s += d;
        s2 += d * d;
    }
    return gamma_from_sums(s, s2);
}

NormalizationCoefficients normalization(const ChannelStatistics& stats, const DuplexAssignment& a) {
    const auto& sc = stats.scenario();
    NormalizationCoefficients nc;
    nc.eps_dl.resize(stats.num_dl());
    nc.eps_ul.resize(stats.num_ul());
    for (int l = 0; l < stats.num_dl(); ++l) {
        double s = 0.0;
        for (int m : a.dl_aps()) s += stats.tr_r(m, sc.dl_ue(l));
        if (s > 0.0) nc.eps_dl[l] = 1.0 / std::sqrt(s);
    }
    for (int u = 0; u < stats.num_ul(); ++u) {
        double s = 0.0;
        for (int n : a.ul_aps()) s += stats.tr_r(n, sc.ul_ue(u));
        if (s > 0.0) nc.eps_ul[u] = 1.0 / std::sqrt(s);
    }
    return nc;
}

DlTerms dl_sinr(int l, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    const auto& sc = stats.scenario();
    const auto& cfg = stats.config();
    DlTerms out;
    out.noise = cfg.noise_dl;
    out.eps = nc.eps_dl[l];
    if (!out.eps) return out;

    const int gl = sc.dl_ue(l);
    const double N = stats.N();
    double s = 0.0, s2 = 0.0;
    for (int m : a.dl_aps()) {
        s += stats.tr_r(m, gl);
        s2 += stats.gamma_spread(m, gl);
    }
    const double eps_l = *out.eps;
    out.signal = sc.ues[gl].power * eps_l * eps_l * gamma_from_sums(s, s2).second_moment();

    for (int k = 0; k < stats.num_dl(); ++k) {
        const auto& ek = nc.eps_dl[k];
        if (!ek) continue;
        const int gk = sc.dl_ue(k);
        const double w = sc.ues[gk].power * (*ek) * (*ek);
        double inter = 0.0, err = 0.0;
        for (int m : a.dl_aps()) {
            if (k != l) inter += stats.tr_rr(m, gl, gk);
            err += stats.tr_r_theta(m, gk, gl);
        }
        out.inter += w * inter;
        out.error += w * err;
    }
    for (int t = 0; t < stats.T(); ++t) {
        double acc = 0.0;
        for (int m : a.dl_aps()) acc += stats.tr_psi_theta(m, t, gl);
        out.sense += sc.targets[t].sensing_power / N * acc;
    }
    for (int u = 0; u < stats.num_ul(); ++u) out.cli += sc.ues[sc.ul_ue(u)].power * stats.phi_ue_ue(u, l);

    out.sinr = out.signal / (out.inter + out.error + out.sense + out.cli + out.noise);
    return out;
}

UlTerms ul_sinr(int u, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    const auto& sc = stats.scenario();
    const auto& cfg = stats.config();
    UlTerms out;
    out.eps = nc.eps_ul[u];
    if (!out.eps) return out;

    const int gu = sc.ul_ue(u);
    const double N = stats.N();
    const double e2 = (*out.eps) * (*out.eps);
    double s = 0.0, s2 = 0.0;
    for (int n : a.ul_aps()) {
        s += stats.tr_r(n, gu);
        s2 += stats.gamma_spread(n, gu);
    }
    out.signal = sc.ues[gu].power * e2 * gamma_from_sums(s, s2).second_moment();

    for (int k = 0; k < stats.num_ul(); ++k) {
        const int gk = sc.ul_ue(k);
        double inter = 0.0, err = 0.0;
        for (int n : a.ul_aps()) {
            if (k != u) inter += stats.tr_rr(n, gu, gk);
            err += stats.tr_r_theta(n, gu, gk);
        }
        out.inter += sc.ues[gk].power * e2 * inter;
        out.error += sc.ues[gk].power * e2 * err;
    }
    for (int m : a.dl_aps()) {
        for (int n : a.ul_aps()) {
            for (int j = 0; j < stats.num_dl(); ++j) {
                const auto& ej = nc.eps_dl[j];
                if (!ej) continue;
                out.cli_c += sc.ues[sc.dl_ue(j)].power * e2 * (*ej) * (*ej) * stats.tr_thetaA_rr(m, n, u, j);
            }
            for (int t = 0; t < stats.T(); ++t)
                out.cli_s += sc.targets[t].sensing_power * e2 / N * stats.tr_thetaA_r_psi(m, n, u, t);
        }
    }
    out.noise = cfg.noise_ul * e2 * s;

    out.sinr = out.signal / (out.inter + out.error + out.cli_c + out.cli_s + out.noise);
    return out;
}

double rate_from_sinr(double sinr, const SystemConfig& config) {
    return config.rate_prefactor() * std::log2(1.0 + sinr);
}

double dl_rate(int l, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    return rate_from_sinr(dl_sinr(l, a, stats, nc).sinr, stats.config());
}

double ul_rate(int u, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    return rate_from_sinr(ul_sinr(u, a, stats, nc).sinr, stats.config());
}

RateReport rate_report(const DuplexAssignment& a, const ChannelStatistics& stats) {
    RateReport rep;
    rep.nc = normalization(stats, a);
    for (int l = 0; l < stats.num_dl(); ++l) {
        rep.dl.push_back(dl_sinr(l, a, stats, rep.nc));
        rep.dl_rate.push_back(rate_from_sinr(rep.dl.back().sinr, stats.config()));
        rep.sum_rate += rep.dl_rate.back();
    }
    for (int u = 0; u < stats.num_ul(); ++u) {
        rep.ul.push_back(ul_sinr(u, a, stats, rep.nc));
        rep.ul_rate.push_back(rate_from_sinr(rep.ul.back().sinr, stats.config()));
        rep.sum_rate += rep.ul_rate.back();
    }
    return rep;
}

double sum_rate(const DuplexAssignment& a, const ChannelStatistics& stats) { return rate_report(a, stats).sum_rate; }

}  // namespace nafd
