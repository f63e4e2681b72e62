#pragma once

#include <optional>
#include <vector>

#include "nafd/rates.hpp"
#include "nafd/scenario.hpp"
#include "nafd/statistics.hpp"

namespace nafd {

struct ResidualPowers {
    double dl = 0.0;  // leftover downlink data after CPU cancellation
    double ul = 0.0;  // uplink data left over from imperfect decoding
};

// Throws DomainError when n is not an uplink AP.
ResidualPowers residual_powers(int n, const DuplexAssignment& a, const ChannelStatistics& stats,
                               const NormalizationCoefficients& nc);

// A = sum_i (y_i cos th - x_i sin th), B = sum of the squared terms.
struct ArrayFactors {
    double a = 0.0;
    double b = 0.0;
};
ArrayFactors array_factors(const AntennaArray& array, double angle);

struct CrlbComponents {
    double distance = 0.0;  // m^2
    double doa = 0.0;       // rad^2
    double dod = 0.0;       // rad^2
    double sum() const { return distance + doa + dod; }
};

// Everything the bistatic bound needs for one (tx AP, rx AP, target) triple.
struct CrlbInputs {
    double sigma_z2 = 0.0;
    double power = 0.0;  // sensing power times the target power factor
    double eta = 0.0;    // product of the two mean link amplitudes
    double w_norm2 = 1.0;
    int antennas = 1;
    ArrayFactors tx;
    ArrayFactors rx;
    double bandwidth = 0.0;
    double wavelength = 0.0;
};

// Throws SingularGeometryError when N B - A^2 <= 0 on either side.
CrlbComponents crlb_closed_form(const CrlbInputs& in);

double target_power_factor(double reflection, TargetPowerFactor mode);

CrlbInputs crlb_inputs(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                       const NormalizationCoefficients& nc);
CrlbComponents crlb_components(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                               const NormalizationCoefficients& nc);

// Mean over all downlink x uplink AP pairs. Empty when either set is empty;
// +inf when some pair has singular geometry.
std::optional<double> crlb_loc(int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                               const NormalizationCoefficients& nc);

double ler_from_crlb(std::optional<double> crlb, const SystemConfig& config);
double ler(int t, const DuplexAssignment& a, const ChannelStatistics& stats, const NormalizationCoefficients& nc);

struct SensingReport {
    std::vector<std::optional<double>> crlb;  // [t]
    std::vector<double> ler;                  // [t]
    double f2 = 0.0;
};

SensingReport sensing_report(const DuplexAssignment& a, const ChannelStatistics& stats,
                             const NormalizationCoefficients& nc);
double sense_sum(const DuplexAssignment& a, const ChannelStatistics& stats);

// Geometry for the numeric Fisher information of one tx/rx array pair with
// several reflecting targets. Parameters are ordered (d, theta, phi) per target.
struct FimGeometry {
    AntennaArray tx;
    AntennaArray rx;
    std::vector<double> doa;        // at the tx array
    std::vector<double> dod;        // at the rx array
    std::vector<double> range;      // bistatic path length, m
    std::vector<double> amplitude;  // |complex gain| per target
    double bandwidth = 0.0;
    double sigma_z2 = 1.0;
};

Eigen::MatrixXd fim_from_geometry(const FimGeometry& g);

// 3x3 information matrix of target t for the pair (m, n).
Eigen::Matrix3d fim_numeric(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                            const NormalizationCoefficients& nc);
// Joint 3T x 3T matrix for the echo of the beam steered at target t, all
// targets' parameters unknown.
Eigen::MatrixXd fim_joint(int m, int n, int t, const DuplexAssignment& a, const ChannelStatistics& stats,
                          const NormalizationCoefficients& nc);

struct Heatmap {
    std::vector<double> xs;  // cell centers
    std::vector<double> ys;
    Eigen::MatrixXd ler;  // rows follow ys, columns follow xs
};

// Sweeps a single probe target over the cell centers of a res x res grid.
Heatmap ler_heatmap(const Scenario& base, const DuplexAssignment& a, int resolution);

}  // namespace nafd
