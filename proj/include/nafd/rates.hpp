#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nafd/scenario.hpp"
#include "nafd/statistics.hpp"

namespace nafd {

struct GammaMoments {
    double k = 0.0;      // shape
    double theta = 0.0;  // scale
    double mean() const { return k * theta; }
    double second_moment() const { return k * theta * theta + (k * theta) * (k * theta); }
};

// Moment-matched Gamma for a sum of independent exponentials with the given
// means. Throws DegenerateError on an all-zero input.
GammaMoments gamma_moments(std::span<const double> diag);
GammaMoments gamma_from_sums(double sum, double sum_sq);

// Precoder/combiner scales giving unit expected power over the serving APs.
// Empty when the UE has no serving AP under the assignment.
struct NormalizationCoefficients {
    std::vector<std::optional<double>> eps_dl;  // [l]
    std::vector<std::optional<double>> eps_ul;  // [u]
};

NormalizationCoefficients normalization(const ChannelStatistics& stats, const DuplexAssignment& a);

struct DlTerms {
    double signal = 0.0;
    double inter = 0.0;
    double error = 0.0;
    double sense = 0.0;
    double cli = 0.0;
    double noise = 0.0;
    double sinr = 0.0;
    std::optional<double> eps;
};

struct UlTerms {
    double signal = 0.0;
    double inter = 0.0;
    double error = 0.0;
    double cli_c = 0.0;
    double cli_s = 0.0;
    double noise = 0.0;
    double sinr = 0.0;
    std::optional<double> eps;
};

DlTerms dl_sinr(int l, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc);
UlTerms ul_sinr(int u, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc);

double rate_from_sinr(double sinr, const SystemConfig& config);
double dl_rate(int l, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc);
double ul_rate(int u, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc);

struct RateReport {
    NormalizationCoefficients nc;
    std::vector<DlTerms> dl;
    std::vector<UlTerms> ul;
    std::vector<double> dl_rate;
    std::vector<double> ul_rate;
    double sum_rate = 0.0;
};

RateReport rate_report(const DuplexAssignment& a, const ChannelStatistics& stats);
double sum_rate(const DuplexAssignment& a, const ChannelStatistics& stats);

}  // namespace nafd
