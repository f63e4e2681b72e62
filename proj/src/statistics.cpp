#include "nafd/statistics.hpp"

#include <cmath>
#include <stdexcept>

#include "nafd/kernels.hpp"

namespace nafd {

double gamma_scalar(const TargetLink& link) { return link.amp_sq + link.gain_var; }

CMat psi_matrix(const CVec& steer, double steer_var) {
    CMat p = steer * steer.adjoint();
    p.diagonal().array() += steer_var;
    return p;
}

CMat zeta(const TargetLink& link) {
    if (link.steer.size() == 0) throw std::invalid_argument("zeta needs a multi-antenna endpoint");
    return gamma_scalar(link) * psi_matrix(link.steer, link.steer_var);
}

bool is_hermitian(const CMat& a, double rel_tol) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool is_psd(const CMat& a, double rel_tol) {
    if (a.size() == 0) return true;
    if (!is_hermitian(a, rel_tol)) return false;
    Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    return ev.minCoeff() >= -rel_tol * scale;
}

EstimationPair mmse_second_order(const CMat& phi, double pilot_power, double pilot_len, double noise_var) {
    if (!(pilot_power * pilot_len > 0.0) || !(noise_var > 0.0))
        throw DomainError("mmse_second_order: pilot energy and noise must be > 0");
    if (phi.rows() != phi.cols()) throw DomainError("mmse_second_order: phi must be square");
    if (!phi.allFinite() || !is_psd(phi)) throw DomainError("mmse_second_order: phi is not Hermitian PSD");

    const auto n = phi.rows();
    EstimationPair out;
    if (phi.cwiseAbs().maxCoeff() == 0.0) {
        out.r_hat = CMat::Zero(n, n);
        out.theta = CMat::Zero(n, n);
        return out;
    }
    const double s = pilot_power * pilot_len / noise_var;
    const CMat h = 0.5 * (phi + phi.adjoint());
    const CMat a = s * h + CMat::Identity(n, n);
    Eigen::LDLT<CMat> ldlt(a);
    CMat x = ldlt.solve(h);  // (s phi + I)^-1 phi
    // One refinement step keeps the solve residual at roundoff level.
    x += ldlt.solve(h - a * x);
    if ((a * x - h).norm() > 1e-12 * std::max(h.norm(), 1e-300) * static_cast<double>(n))
        throw NumericalError("mmse_second_order: Hermitian solve did not converge");

    CMat r = s * h * x;
    r = 0.5 * (r + r.adjoint()).eval();
    out.theta = h - r;
    out.r_hat = std::move(r);
    return out;
}

double trace_product_hermitian(const CMat& a, const CMat& b) {
    return kernels::cdot(b.data(), a.data(), static_cast<std::size_t>(a.size())).real();
}

ChannelStatistics::ChannelStatistics(const Scenario& scenario, bool cli_tables)
    : sc_(scenario),
      M_(scenario.num_aps()),
      N_(scenario.antennas()),
      K_(static_cast<int>(scenario.ues.size())),
      T_(scenario.num_targets()),
      cli_tables_(cli_tables) {
    const auto& cfg = sc_.config;
    const AngleTables ang = angles(sc_);
    const CMat eye = CMat::Identity(N_, N_);

    ap_tx_.resize(static_cast<std::size_t>(M_) * T_);
    ap_rx_.resize(static_cast<std::size_t>(M_) * T_);
    psi_.resize(static_cast<std::size_t>(M_) * T_);
    for (int m = 0; m < M_; ++m) {
        for (int t = 0; t < T_; ++t) {
            const auto& tgt = sc_.targets[t];
            const double amp = link_amplitude(cfg, sc_.aps[m].center, tgt.position);
            TargetLink tx{amp * amp, tgt.gain_var_ap[m], steering_vector(sc_.aps[m].array, ang.doa(m, t)),
                          tgt.steer_var_ap[m]};
            TargetLink rx{amp * amp, tgt.gain_var_ap[m], steering_vector(sc_.aps[m].array, ang.dod(t, m)),
                          tgt.steer_var_ap[m]};
            psi_[m * T_ + t] = psi_matrix(tx.steer, tx.steer_var);
            ap_tx_[m * T_ + t] = std::move(tx);
            ap_rx_[m * T_ + t] = std::move(rx);
        }
    }
    ue_link_.resize(static_cast<std::size_t>(K_) * T_);
    for (int k = 0; k < K_; ++k) {
        for (int t = 0; t < T_; ++t) {
            const auto& tgt = sc_.targets[t];
            const double amp = link_amplitude(cfg, sc_.ues[k].position, tgt.position);
            ue_link_[k * T_ + t] = TargetLink{amp * amp, tgt.gain_var_ue[k], CVec(), 0.0};
        }
    }

    // UE-AP: lambda^2 I + sum_t a_t^2 zeta(AP m, t) gamma(t, UE k)
    direct_ue_.resize(static_cast<std::size_t>(M_) * K_);
    phi_ue_.resize(static_cast<std::size_t>(M_) * K_);
    for (int m = 0; m < M_; ++m) {
        for (int k = 0; k < K_; ++k) {
            const double amp = link_amplitude(cfg, sc_.aps[m].center, sc_.ues[k].position);
            direct_ue_[m * K_ + k] = amp * amp;
            CMat phi = amp * amp * eye;
            for (int t = 0; t < T_; ++t) {
                const double a2 = sc_.targets[t].reflection * sc_.targets[t].reflection;
                phi += a2 * gamma_scalar(ue_link_[k * T_ + t]) * zeta(ap_tx_[m * T_ + t]);
            }
            phi_ue_[m * K_ + k] = std::move(phi);
        }
    }

    // AP-AP, per transmit-antenna column at the receiving AP n:
    // lambda^2 I + sum_t a_t^2 gamma(m, t) (1 + chi^2_mt) zeta(t, AP n)
    direct_ap_.assign(static_cast<std::size_t>(M_) * M_, 0.0);
    phi_ap_.assign(static_cast<std::size_t>(M_) * M_, CMat());
    for (int m = 0; m < M_; ++m) {
        for (int n = 0; n < M_; ++n) {
            if (m == n) continue;
            const double amp = link_amplitude(cfg, sc_.aps[m].center, sc_.aps[n].center);
            direct_ap_[m * M_ + n] = amp * amp;
            CMat phi = amp * amp * eye;
            for (int t = 0; t < T_; ++t) {
                const double a2 = sc_.targets[t].reflection * sc_.targets[t].reflection;
                const auto& tx = ap_tx_[m * T_ + t];
                phi += a2 * gamma_scalar(tx) * (1.0 + tx.steer_var) * zeta(ap_rx_[n * T_ + t]);
            }
            phi_ap_[m * M_ + n] = std::move(phi);
        }
    }

    const int kdl = num_dl(), kul = num_ul();
    phi_uu_.resize(static_cast<std::size_t>(kul) * kdl);
    for (int u = 0; u < kul; ++u) {
        for (int l = 0; l < kdl; ++l) {
            const int gu = sc_.ul_ue(u), gl = sc_.dl_ue(l);
            const double amp = link_amplitude(cfg, sc_.ues[gu].position, sc_.ues[gl].position);
            double v = amp * amp;
            for (int t = 0; t < T_; ++t) {
                const double a2 = sc_.targets[t].reflection * sc_.targets[t].reflection;
                v += a2 * gamma_scalar(ue_link_[gu * T_ + t]) * gamma_scalar(ue_link_[gl * T_ + t]);
            }
            phi_uu_[u * kdl + l] = v;
        }
    }

    // Pilots are received at the APs, so both splits see the uplink noise.
    est_ue_.resize(phi_ue_.size());
    for (std::size_t i = 0; i < phi_ue_.size(); ++i)
        est_ue_[i] = mmse_second_order(phi_ue_[i], cfg.pilot_power, cfg.tau_up, cfg.noise_ul);
    est_ap_.resize(phi_ap_.size());
    for (int m = 0; m < M_; ++m)
        for (int n = 0; n < M_; ++n)
            if (m != n)
                est_ap_[m * M_ + n] = mmse_second_order(phi_ap_[m * M_ + n], cfg.pilot_power, cfg.tau_dp, cfg.noise_ul);

    // Trace tables.
    tr_r_.resize(static_cast<std::size_t>(M_) * K_);
    sumsq_r_.resize(tr_r_.size());
    sumsq_eig_r_.resize(tr_r_.size());
    tr_theta_.resize(tr_r_.size());
    diag_r_.resize(tr_r_.size());
    for (std::size_t i = 0; i < est_ue_.size(); ++i) {
        const auto& r = est_ue_[i].r_hat;
        std::vector<double> d(N_);
        double s = 0.0, s2 = 0.0;
        for (int a = 0; a < N_; ++a) {
            d[a] = r(a, a).real();
            s += d[a];
            s2 += d[a] * d[a];
        }
        diag_r_[i] = std::move(d);
        tr_r_[i] = s;
        sumsq_r_[i] = s2;
        sumsq_eig_r_[i] = r.squaredNorm();
        tr_theta_[i] = est_ue_[i].theta.trace().real();
    }
    rr_.resize(static_cast<std::size_t>(M_) * K_ * K_);
    rtheta_.resize(rr_.size());
    for (int m = 0; m < M_; ++m) {
        for (int k1 = 0; k1 < K_; ++k1) {
            for (int k2 = 0; k2 < K_; ++k2) {
                rr_[(m * K_ + k1) * K_ + k2] = trace_product_hermitian(r_hat_ue(m, k1), r_hat_ue(m, k2));
                rtheta_[(m * K_ + k1) * K_ + k2] = trace_product_hermitian(r_hat_ue(m, k1), theta_ue(m, k2));
            }
        }
    }
    psitheta_.resize(static_cast<std::size_t>(M_) * T_ * K_);
    for (int m = 0; m < M_; ++m)
        for (int t = 0; t < T_; ++t)
            for (int k = 0; k < K_; ++k)
                psitheta_[(m * T_ + t) * K_ + k] = trace_product_hermitian(psi(m, t), theta_ue(m, k));
    thetaA_r_.assign(static_cast<std::size_t>(M_) * M_ * K_, 0.0);
    for (int m = 0; m < M_; ++m)
        for (int n = 0; n < M_; ++n)
            if (m != n)
                for (int k = 0; k < K_; ++k)
                    thetaA_r_[(m * M_ + n) * K_ + k] = trace_product_hermitian(theta_ap(m, n), r_hat_ue(m, k));

    if (!cli_tables_) return;
    thetaA_rr_.assign(static_cast<std::size_t>(M_) * M_ * kul * kdl, 0.0);
    thetaA_rpsi_.assign(static_cast<std::size_t>(M_) * M_ * kul * T_, 0.0);
    CMat p(N_, N_);
    for (int m = 0; m < M_; ++m) {
        for (int n = 0; n < M_; ++n) {
            if (m == n) continue;
            for (int u = 0; u < kul; ++u) {
                p.noalias() = theta_ap(m, n) * r_hat_ue(n, sc_.ul_ue(u));
                const std::size_t base = (static_cast<std::size_t>(m) * M_ + n) * kul + u;
                for (int j = 0; j < kdl; ++j)
                    thetaA_rr_[base * kdl + j] = trace_product_hermitian(p, r_hat_ue(m, sc_.dl_ue(j)));
                for (int t = 0; t < T_; ++t)
                    thetaA_rpsi_[base * T_ + t] = trace_product_hermitian(p, psi(m, t));
            }
        }
    }
}

void ChannelStatistics::require_cli_tables() const {
    if (!cli_tables_) throw std::logic_error("ChannelStatistics built without cross-link tables");
}

double ChannelStatistics::tr_thetaA_rr(int m, int n, int u, int j) const {
    require_cli_tables();
    return thetaA_rr_[((static_cast<std::size_t>(m) * M_ + n) * num_ul() + u) * num_dl() + j];
}

double ChannelStatistics::tr_thetaA_r_psi(int m, int n, int u, int t) const {
    require_cli_tables();
    return thetaA_rpsi_[((static_cast<std::size_t>(m) * M_ + n) * num_ul() + u) * T_ + t];
}

double ChannelStatistics::gamma_spread(int m, int k) const {
    return config().gamma_match == GammaMatch::Eigen ? sumsq_eig_r(m, k) : sumsq_diag_r(m, k);
}

}  // namespace nafd
