#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nafd/rates.hpp"
#include "nafd/scenario.hpp"
#include "nafd/statistics.hpp"

namespace nafd {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

// Welford mean/variance with merge, so partitions can be combined.
class MeanAccumulator {
public:
    void add(double x);
    void merge(const MeanAccumulator& o);
    McEstimate estimate() const;
    std::size_t count() const { return n_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Ratio of means E[X]/E[Y] with a delta-method standard error.
class RatioAccumulator {
public:
    void add(double x, double y);
    void merge(const RatioAccumulator& o);
    McEstimate estimate() const;
    McEstimate numerator() const;
    McEstimate denominator() const;

private:
    std::size_t n_ = 0;
    double mx_ = 0.0, my_ = 0.0;
    double sxx_ = 0.0, syy_ = 0.0, sxy_ = 0.0;
};

// One joint channel draw.
//
// Physical links (h_ue_ap, h_ap_ap, h_ue_ue) follow the composed model: a
// Rayleigh direct path plus target echoes built from perturbed amplitudes and
// steering vectors. The estimation side draws h_hat ~ CN(0, R) and
// err ~ CN(0, Theta) independently; the SINR terms use h = h_hat + err.
struct RealizationBundle {
    std::uint64_t seed = 0;
    int M = 0, N = 0, K = 0, T = 0;
    std::vector<CVec> h_ue_ap;  // [m*K + k]
    std::vector<CMat> h_ap_ap;  // [m*M + n], rows index the receiving AP n
    std::vector<cd> h_ue_ue;    // [u*K_dl + l]
    std::vector<CVec> q;        // [m*T + t], perturbed steering toward target t
    std::vector<CVec> h_hat;    // [m*K + k]
    std::vector<CVec> err;      // [m*K + k]
    std::vector<CMat> err_ap;   // [m*M + n], residual after cancellation, same scale as h_ap_ap

    CVec effective(int m, int k) const { return h_hat[m * K + k] + err[m * K + k]; }
};

class ChannelSampler {
public:
    explicit ChannelSampler(const ChannelStatistics& stats);

    // Full draw of every link.
    void draw(RealizationBundle& out, std::uint64_t seed) const;
    // Only what the SINR expressions need under the assignment.
    void draw_for(RealizationBundle& out, std::uint64_t seed, const DuplexAssignment& a) const;

    const ChannelStatistics& stats() const { return stats_; }

private:
    void draw_impl(RealizationBundle& out, std::uint64_t seed, const DuplexAssignment* a) const;

    const ChannelStatistics& stats_;
    std::vector<CMat> f_r_, f_theta_;  // square-root factors per UE link
    std::vector<CMat> f_theta_ap_;     // per AP pair
};

RealizationBundle sample_channels(const ChannelStatistics& stats, std::uint64_t seed);

struct InstantSinr {
    double num = 0.0;
    double den = 0.0;
    double sinr = 0.0;
    bool guarded = false;  // denominator fell below the guard floor
};

inline constexpr double kSinrDenominatorFloor = 1e-30;

InstantSinr instantaneous_dl_sinr(int l, const RealizationBundle& b, const DuplexAssignment& a,
                                  const ChannelStatistics& stats, const NormalizationCoefficients& nc);
InstantSinr instantaneous_ul_sinr(int u, const RealizationBundle& b, const DuplexAssignment& a,
                                  const ChannelStatistics& stats, const NormalizationCoefficients& nc);

struct UeMcResult {
    Direction direction = Direction::Downlink;
    int index = 0;          // direction-local index
    double closed_form = 0.0;
    McEstimate ratio;       // E[num]/E[den], comparable with the closed form
    McEstimate mean_sinr;   // E[num/den], informational
    McEstimate log_rate;    // prefactor * E[log2(1 + num/den)], informational
};

struct McSinrResult {
    std::vector<UeMcResult> ues;  // downlink UEs first
    std::size_t guarded = 0;
};

inline constexpr std::size_t kMinValidationTrials = 1000;

McSinrResult mc_sinr(const ChannelStatistics& stats, const DuplexAssignment& a, std::size_t trials,
                     std::uint64_t seed);

struct ValidationRow {
    int antennas = 0;
    UeMcResult ue;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

// Sweeps the antenna count over the same geometry with the balanced
// assignment. Throws std::invalid_argument below kMinValidationTrials.
std::vector<ValidationRow> mc_validation_report(const SystemConfig& config, const std::vector<int>& n_sweep,
                                                std::size_t trials);
std::string validation_csv(const std::vector<ValidationRow>& rows);

}  // namespace nafd
