#include "nafd/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nafd {

ResidualPowers residual_powers(int n, const DuplexAssignment& a, const ChannelStatistics& stats,
                               const NormalizationCoefficients& nc) {
    if (n < 0 || n >= a.size() || !a.is_ul(n)) throw DomainError("residual_powers: AP " + std::to_string(n) + " is not an uplink AP");
    const auto& sc = stats.scenario();
    ResidualPowers rp;
    for (int m : a.dl_aps()) {
        for (int j = 0; j < stats.num_dl(); ++j) {
            const auto& ej = nc.eps_dl[j];
            if (!ej) continue;
            const int gj = sc.dl_ue(j);
            rp.dl += sc.ues[gj].power * (*ej) * (*ej) * stats.tr_thetaA_r(m, n, gj);
        }
    }
    for (int k = 0; k < stats.num_ul(); ++k) {
        const int gk = sc.ul_ue(k);
        rp.ul += sc.ues[gk].power * stats.tr_theta(n, gk);
    }
    return rp;
}

ArrayFactors array_factors(const AntennaArray& array, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    ArrayFactors f;
    for (const auto& p : array.elements) {
        const double v = p.y * c - p.x * s;
        f.a += v;
        f.b += v * v;
    }
    return f;
}

CrlbComponents crlb_closed_form(const CrlbInputs& in) {
    const double n = in.antennas;
    const double k2 = 4.0 * kPi * kPi;
    const double gain = in.power * in.eta * in.eta * in.w_norm2;
    const double tx_det = n * in.tx.b - in.tx.a * in.tx.a;
    const double rx_det = n * in.rx.b - in.rx.a * in.rx.a;
    if (!(tx_det > 0.0) || !(rx_det > 0.0)) throw SingularGeometryError("CRLB: N B - A^2 <= 0 (endfire geometry)");
    if (!(gain > 0.0)) throw SingularGeometryError("CRLB: zero echo power");
    const double fc = in.bandwidth / kSpeedOfLight;
    const double lam2 = in.wavelength * in.wavelength;
    CrlbComponents c;
    c.distance = in.sigma_z2 / (k2 * gain * fc * fc * n * n);
    c.doa = lam2 * in.sigma_z2 / (k2 * gain * tx_det);
    c.dod = lam2 * in.sigma_z2 / (k2 * gain * rx_det);
    return c;
}

double target_power_factor(double reflection, TargetPowerFactor mode) {
    return mode == TargetPowerFactor::Squared ? reflection * reflection : reflection;
}

CrlbInputs crlb_inputs(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                       const NormalizationCoefficients& nc) {
    if (!a.is_dl(m)) throw DomainError("crlb: AP " + std::to_string(m) + " is not a downlink AP");
    const auto& sc = stats.scenario();
    const auto& cfg = sc.config;
    const auto& tgt = sc.targets.at(t);
    const ResidualPowers rp = residual_powers(n, a, stats, nc);
    const auto& tx = stats.ap_target(m, t);
    const auto& rx = stats.ap_target_rx(n, t);

    CrlbInputs in;
    in.sigma_z2 = rp.dl + rp.ul + cfg.noise_s;
    in.power = tgt.sensing_power * target_power_factor(tgt.reflection, cfg.target_power);
    in.eta = std::sqrt(tx.amp_sq) * std::sqrt(rx.amp_sq);
    in.w_norm2 = 1.0 + tx.steer_var;
    in.antennas = stats.N();
    in.tx = array_factors(sc.aps[m].array, direction(sc.aps[m].center, tgt.position));
    in.rx = array_factors(sc.aps[n].array, direction(tgt.position, sc.aps[n].center));
    in.bandwidth = cfg.bandwidth;
    in.wavelength = cfg.wavelength;
    return in;
}

CrlbComponents crlb_components(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                               const NormalizationCoefficients& nc) {
    return crlb_closed_form(crlb_inputs(m, n, t, a, stats, nc));
}

std::optional<double> crlb_loc(int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                               const NormalizationCoefficients& nc) {
    if (a.dl_aps().empty() || a.ul_aps().empty()) return std::nullopt;
    double acc = 0.0;
    for (int m : a.dl_aps()) {
        for (int n : a.ul_aps()) {
            try {
                acc += crlb_components(m, n, t, a, stats, nc).sum();
            } catch (const SingularGeometryError&) {
                return std::numeric_limits<double>::infinity();
            }
        }
    }
    return acc / static_cast<double>(a.dl_aps().size() * a.ul_aps().size());
}

double ler_from_crlb(std::optional<double> crlb, const SystemConfig& config) {
    if (!crlb || !std::isfinite(*crlb)) return 0.0;
    return config.rate_prefactor() * std::log2(1.0 + config.sigma_loc2 / *crlb);
}

double ler(int t, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    return ler_from_crlb(crlb_loc(t, a, stats, nc), stats.config());
}

SensingReport sensing_report(const DuplexAssignment& a, const ChannelStatistics& stats,
                             const NormalizationCoefficients& nc) {
    SensingReport rep;
    for (int t = 0; t < stats.T(); ++t) {
        rep.crlb.push_back(crlb_loc(t, a, stats, nc));
        rep.ler.push_back(ler_from_crlb(rep.crlb.back(), stats.config()));
        rep.f2 += rep.ler.back();
    }
    return rep;
}

double sense_sum(const DuplexAssignment& a, const ChannelStatistics& stats) {
    return sensing_report(a, stats, normalization(stats, a)).f2;
}

Eigen::MatrixXd fim_from_geometry(const FimGeometry& g) {
    const int nt = g.tx.size(), nr = g.rx.size();
    const int targets = static_cast<int>(g.doa.size());
    const double kd = 2.0 * kPi * g.bandwidth / kSpeedOfLight;
    CMat cols(static_cast<Eigen::Index>(nt) * nr, 3 * targets);
    for (int i = 0; i < targets; ++i) {
        const CVec a = steering_vector(g.tx, g.doa[i]);
        const CVec da = steering_derivative(g.tx, g.doa[i]);
        const CVec b = steering_vector(g.rx, g.dod[i]);
        const CVec db = steering_derivative(g.rx, g.dod[i]);
        const cd c = g.amplitude[i] * std::polar(1.0, -kd * g.range[i]);
        for (int p = 0; p < nt; ++p) {
            for (int q = 0; q < nr; ++q) {
                const Eigen::Index row = static_cast<Eigen::Index>(p) * nr + q;
                cols(row, 3 * i) = c * cd(0.0, -kd) * a[p] * b[q];
                cols(row, 3 * i + 1) = c * da[p] * b[q];
                cols(row, 3 * i + 2) = c * a[p] * db[q];
            }
        }
    }
    Eigen::MatrixXd j = (cols.adjoint() * cols).real() / g.sigma_z2;
    return 0.5 * (j + j.transpose());
}

namespace {

FimGeometry pair_geometry(int m, int n, int beam, const std::vector<int>& targets, const DuplexAssignment& a,
                          const ChannelStatistics& stats, const NormalizationCoefficients& nc) {
    const auto& sc = stats.scenario();
    const CrlbInputs beam_in = crlb_inputs(m, n, beam, a, stats, nc);
    FimGeometry g;
    g.tx = sc.aps[m].array;
    g.rx = sc.aps[n].array;
    g.bandwidth = sc.config.bandwidth;
    g.sigma_z2 = beam_in.sigma_z2;
    for (int t : targets) {
        const auto& tgt = sc.targets[t];
        const double eta = std::sqrt(stats.ap_target(m, t).amp_sq * stats.ap_target_rx(n, t).amp_sq);
        const double power = sc.targets[beam].sensing_power * target_power_factor(tgt.reflection, sc.config.target_power);
        g.doa.push_back(direction(sc.aps[m].center, tgt.position));
        g.dod.push_back(direction(tgt.position, sc.aps[n].center));
        g.range.push_back(distance(sc.aps[m].center, tgt.position) + distance(tgt.position, sc.aps[n].center));
        g.amplitude.push_back(std::sqrt(power * beam_in.w_norm2) * eta);
    }
    return g;
}

}  // namespace

Eigen::Matrix3d fim_numeric(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                            const NormalizationCoefficients& nc) {
    return fim_from_geometry(pair_geometry(m, n, t, {t}, a, stats, nc));
}

Eigen::MatrixXd fim_joint(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                          const NormalizationCoefficients& nc) {
    std::vector<int> all(stats.T());
    for (int i = 0; i < stats.T(); ++i) all[i] = i;
    return fim_from_geometry(pair_geometry(m, n, t, all, a, stats, nc));
}

Heatmap ler_heatmap(const Scenario& base, const DuplexAssignment& a, int resolution) {
    if (resolution < 2) throw std::invalid_argument("heatmap resolution must be >= 2");
    if (a.size() != base.num_aps()) throw std::invalid_argument("assignment size does not match AP count");
    Heatmap h;
    const double side = base.config.area_side;
    for (int i = 0; i < resolution; ++i) {
        const double c = (i + 0.5) * side / resolution;
        h.xs.push_back(c);
        h.ys.push_back(c);
    }
    h.ler = Eigen::MatrixXd::Zero(resolution, resolution);
    if (a.dl_aps().empty() || a.ul_aps().empty()) return h;
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const Scenario sc = with_targets(base, {{h.xs[ix], h.ys[iy]}});
            const ChannelStatistics stats(sc, false);
            h.ler(iy, ix) = ler(0, a, stats, normalization(stats, a));
        }
    }
    return h;
}

}  // namespace nafd
