#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nafd/common.hpp"

namespace nafd {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

// Element positions are local coordinates relative to the AP center.
struct AntennaArray {
    std::vector<Position> elements;
    double wavelength = 0.1;

    // Half-wavelength ULA along x. Centered arrays put the phase reference at
    // the array centroid; otherwise element 0 sits at the origin.
    static AntennaArray ula(int n, double wavelength, bool centered = true);

    int size() const { return static_cast<int>(elements.size()); }
    void validate() const;
};

enum class Direction { Downlink, Uplink };

struct ApNode {
    int id = 0;
    Position center;
    AntennaArray array;
};

struct UeNode {
    int id = 0;
    Position position;
    Direction direction = Direction::Downlink;
    double power = 0.1;  // transmit power for UL UEs, serving power for DL UEs
};

// Variances are absolute (same units as squared amplitudes), filled per link at
// scenario build time from the configured relative uncertainties.
struct TargetNode {
    int id = 0;
    Position position;
    double reflection = 0.8;
    double sensing_power = 0.5;
    std::vector<double> gain_var_ap;   // [m]
    std::vector<double> gain_var_ue;   // [k]
    std::vector<double> steer_var_ap;  // [m]
};

enum class ApPlacement { Circle, Uniform };
enum class TargetPowerFactor { Squared, Literal };
// Spectrum fed to the Gamma moment match of ||h_hat||^2: eigenvalues of R_hat
// (exact second moment) or its diagonal (exact only for diagonal R_hat).
enum class GammaMatch { Eigen, Diagonal };

struct SystemConfig {
    int num_aps = 8;
    int antennas = 20;
    int num_dl_ues = 4;
    int num_ul_ues = 4;
    int num_targets = 2;

    double area_side = 300.0;
    ApPlacement placement = ApPlacement::Circle;
    double circle_radius = 200.0;
    bool centered_arrays = true;

    double path_loss_exponent = 3.7;
    // Distances are measured in units of this length before the power law is
    // applied, which sets the absolute SNR regime.
    double reference_distance = 40.0;

    double p_ul = 0.1;
    double p_dl = 0.5;
    double p_s = 0.5;
    double pilot_power = 0.1;

    int tau = 100;
    int tau_up = 10;
    int tau_dp = 10;

    double bandwidth = 10e6;
    double wavelength = 0.1;
    double noise_dl = 5.011872336272725e-12;  // -113 dB
    double noise_ul = 5.011872336272725e-12;
    double noise_s = 5.011872336272725e-12;
    double sigma_loc2 = 1.0;

    double reflection = 0.8;
    // Target-link amplitude variance relative to the mean squared amplitude.
    double gain_uncertainty_ap = 0.01;
    double gain_uncertainty_ue = 0.01;
    // Steering-vector perturbation variance on AP-target links.
    double steering_perturbation = 0.01;
    TargetPowerFactor target_power = TargetPowerFactor::Squared;
    GammaMatch gamma_match = GammaMatch::Eigen;

    std::uint64_t seed = 0;

    int num_ues() const { return num_dl_ues + num_ul_ues; }
    double rate_prefactor() const { return 1.0 - static_cast<double>(tau_dp + tau_up) / tau; }
    // Throws ConfigError naming the violated invariant.
    void validate() const;
};

class DuplexAssignment {
public:
    DuplexAssignment() = default;
    explicit DuplexAssignment(std::vector<std::uint8_t> mode);

    static DuplexAssignment from_mask(std::uint64_t mask, int m);
    static DuplexAssignment from_bits(const std::string& bits);
    static DuplexAssignment all_dl(int m);
    static DuplexAssignment all_ul(int m);
    // First ceil(M/2) APs by index transmit downlink.
    static DuplexAssignment balanced(int m);

    int size() const { return static_cast<int>(mode_.size()); }
    bool is_dl(int m) const { return mode_[m] != 0; }
    bool is_ul(int m) const { return mode_[m] == 0; }
    // x_u and x_d as the complementary indicator pair.
    int x_d(int m) const { return mode_[m]; }
    int x_u(int m) const { return 1 - mode_[m]; }
    const std::vector<int>& dl_aps() const { return dl_; }
    const std::vector<int>& ul_aps() const { return ul_; }

    std::uint64_t mask() const;
    std::string bits() const;
    DuplexAssignment flipped(int m) const;

    bool operator==(const DuplexAssignment& o) const { return mode_ == o.mode_; }

private:
    std::vector<std::uint8_t> mode_;
    std::vector<int> dl_;
    std::vector<int> ul_;
};

struct Scenario {
    SystemConfig config;
    std::vector<ApNode> aps;
    std::vector<UeNode> ues;  // downlink UEs first, then uplink UEs
    std::vector<TargetNode> targets;

    int num_aps() const { return static_cast<int>(aps.size()); }
    int antennas() const { return config.antennas; }
    int num_dl() const { return config.num_dl_ues; }
    int num_ul() const { return config.num_ul_ues; }
    int num_targets() const { return static_cast<int>(targets.size()); }
    // Global UE index of the l-th downlink / u-th uplink UE.
    int dl_ue(int l) const { return l; }
    int ul_ue(int u) const { return config.num_dl_ues + u; }
};

Scenario build_scenario(const SystemConfig& config);
// Same network with the targets moved to the given positions.
Scenario with_targets(const Scenario& base, const std::vector<Position>& positions);

CVec steering_vector(const AntennaArray& array, double angle);
// Derivative of the steering vector with respect to the angle.
CVec steering_derivative(const AntennaArray& array, double angle);
double path_gain(double distance, double alpha);
// Mean large-scale amplitude between two points under the config's
// reference distance and exponent.
double link_amplitude(const SystemConfig& config, const Position& a, const Position& b);

struct AngleTables {
    Eigen::MatrixXd doa;  // [m][t], direction of the target seen from AP m
    Eigen::MatrixXd dod;  // [t][n], direction of AP n seen from target t
};

double direction(const Position& from, const Position& to);
AngleTables angles(const Scenario& scenario);

}  // namespace nafd
