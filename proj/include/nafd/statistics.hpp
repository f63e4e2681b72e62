#pragma once

#include <vector>

#include "nafd/common.hpp"
#include "nafd/scenario.hpp"

namespace nafd {

// Second-order description of one node-target link: mean squared amplitude,
// amplitude variance, mean steering vector (empty for single-antenna UEs) and
// the steering perturbation variance.
struct TargetLink {
    double amp_sq = 0.0;
    double gain_var = 0.0;
    CVec steer;
    double steer_var = 0.0;
};

double gamma_scalar(const TargetLink& link);
// q q^H + chi^2 I for the link's steering statistics.
CMat psi_matrix(const CVec& steer, double steer_var);
CMat zeta(const TargetLink& link);

struct EstimationPair {
    CMat r_hat;
    CMat theta;
};

// MMSE split of a channel with autocorrelation phi observed through pilots of
// total energy pilot_power * pilot_len in noise of variance noise_var.
// R = s phi (s phi + I)^-1 phi with s = pilot_power * pilot_len / noise_var.
EstimationPair mmse_second_order(const CMat& phi, double pilot_power, double pilot_len, double noise_var = 1.0);

// Eigenvalue-based checks with tolerance relative to the matrix scale.
bool is_hermitian(const CMat& a, double rel_tol = 1e-10);
bool is_psd(const CMat& a, double rel_tol = 1e-10);

// All channel autocorrelations, their MMSE splits, and the trace tables the
// closed forms are built from. Immutable after construction.
//
// UE indices are global (downlink UEs first). Uplink/downlink-specific
// accessors take the direction-local index and say so in the name.
class ChannelStatistics {
public:
    // cli_tables=false skips the uplink cross-link tables, enough for sensing.
    explicit ChannelStatistics(const Scenario& scenario, bool cli_tables = true);

    const Scenario& scenario() const { return sc_; }
    const SystemConfig& config() const { return sc_.config; }
    int M() const { return M_; }
    int N() const { return N_; }
    int K() const { return K_; }
    int T() const { return T_; }

    const TargetLink& ap_target(int m, int t) const { return ap_tx_[m * T_ + t]; }
    // AP n seen as the receiver of a target echo (departure-angle steering).
    const TargetLink& ap_target_rx(int n, int t) const { return ap_rx_[n * T_ + t]; }
    const TargetLink& ue_target(int k, int t) const { return ue_link_[k * T_ + t]; }
    double direct_amp_sq_ue_ap(int m, int k) const { return direct_ue_[m * K_ + k]; }
    double direct_amp_sq_ap_ap(int m, int n) const { return direct_ap_[m * M_ + n]; }

    const CMat& phi_ue_ap(int m, int k) const { return phi_ue_[m * K_ + k]; }
    // Channel from transmitting AP m into receiving AP n (m != n).
    const CMat& phi_ap_ap(int m, int n) const { return phi_ap_[m * M_ + n]; }
    // Uplink UE u into downlink UE l.
    double phi_ue_ue(int u, int l) const { return phi_uu_[u * num_dl() + l]; }
    const CMat& psi(int m, int t) const { return psi_[m * T_ + t]; }

    const CMat& r_hat_ue(int m, int k) const { return est_ue_[m * K_ + k].r_hat; }
    const CMat& theta_ue(int m, int k) const { return est_ue_[m * K_ + k].theta; }
    const CMat& r_hat_ap(int m, int n) const { return est_ap_[m * M_ + n].r_hat; }
    const CMat& theta_ap(int m, int n) const { return est_ap_[m * M_ + n].theta; }

    // Trace tables.
    double tr_r(int m, int k) const { return tr_r_[m * K_ + k]; }
    double sumsq_diag_r(int m, int k) const { return sumsq_r_[m * K_ + k]; }
    // tr(R_hat^2), the sum of squared eigenvalues.
    double sumsq_eig_r(int m, int k) const { return sumsq_eig_r_[m * K_ + k]; }
    // Per-AP spread term of the configured Gamma match.
    double gamma_spread(int m, int k) const;
    const std::vector<double>& diag_r(int m, int k) const { return diag_r_[m * K_ + k]; }
    double tr_theta(int m, int k) const { return tr_theta_[m * K_ + k]; }
    // tr(R_mk1 R_mk2)
    double tr_rr(int m, int k1, int k2) const { return rr_[(m * K_ + k1) * K_ + k2]; }
    // tr(R_mk1 Theta_mk2)
    double tr_r_theta(int m, int k1, int k2) const { return rtheta_[(m * K_ + k1) * K_ + k2]; }
    // tr(psi_mt Theta_mk)
    double tr_psi_theta(int m, int t, int k) const { return psitheta_[(m * T_ + t) * K_ + k]; }
    // tr(ThetaA_mn R_mk)
    double tr_thetaA_r(int m, int n, int k) const { return thetaA_r_[(m * M_ + n) * K_ + k]; }
    // tr(ThetaA_mn R_n,ul(u) R_m,dl(j)), uplink index u, downlink index j
    double tr_thetaA_rr(int m, int n, int u, int j) const;
    // tr(ThetaA_mn R_n,ul(u) psi_mt), uplink index u
    double tr_thetaA_r_psi(int m, int n, int u, int t) const;

    int num_dl() const { return sc_.config.num_dl_ues; }
    int num_ul() const { return sc_.config.num_ul_ues; }

private:
    void require_cli_tables() const;

    Scenario sc_;
    int M_, N_, K_, T_;
    bool cli_tables_;
    std::vector<TargetLink> ap_tx_, ap_rx_, ue_link_;
    std::vector<double> direct_ue_, direct_ap_;
    std::vector<CMat> phi_ue_, phi_ap_, psi_;
    std::vector<double> phi_uu_;
    std::vector<EstimationPair> est_ue_, est_ap_;

    std::vector<double> tr_r_, sumsq_r_, sumsq_eig_r_, tr_theta_;
    std::vector<std::vector<double>> diag_r_;
    std::vector<double> rr_, rtheta_, psitheta_, thetaA_r_;
    std::vector<double> thetaA_rr_, thetaA_rpsi_;
};

// tr(A B) for Hermitian B, through the SIMD complex dot kernel.
double trace_product_hermitian(const CMat& a, const CMat& b);

}  // namespace nafd
