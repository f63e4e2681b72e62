#include "nafd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

namespace nafd {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid configuration: " + what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Independent RNG streams so that, e.g., changing N or K leaves target
// positions untouched.
enum Stream : std::uint64_t { kUeStream = 1, kTargetStream = 2, kApStream = 3 };

std::vector<TargetNode> make_targets(const SystemConfig& cfg, const std::vector<ApNode>& aps,
                                     const std::vector<UeNode>& ues,
                                     const std::vector<Position>& positions) {
    std::vector<TargetNode> out;
    out.reserve(positions.size());
    for (std::size_t t = 0; t < positions.size(); ++t) {
        TargetNode node;
        node.id = static_cast<int>(t);
        node.position = positions[t];
        node.reflection = cfg.reflection;
        node.sensing_power = cfg.p_s;
        for (const auto& ap : aps) {
            const double g = link_amplitude(cfg, ap.center, positions[t]);
            node.gain_var_ap.push_back(cfg.gain_uncertainty_ap * g * g);
            node.steer_var_ap.push_back(cfg.steering_perturbation);
        }
        for (const auto& ue : ues) {
            const double g = link_amplitude(cfg, ue.position, positions[t]);
            node.gain_var_ue.push_back(cfg.gain_uncertainty_ue * g * g);
        }
        out.push_back(std::move(node));
    }
    return out;
}

}  // namespace

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

AntennaArray AntennaArray::ula(int n, double wavelength, bool centered) {
    AntennaArray arr;
    arr.wavelength = wavelength;
    const double spacing = wavelength / 2.0;
    const double offset = centered ? (n - 1) / 2.0 : 0.0;
    for (int i = 0; i < n; ++i) arr.elements.push_back({(i - offset) * spacing, 0.0});
    return arr;
}

void AntennaArray::validate() const {
    if (elements.empty()) throw ConfigError("invalid configuration: antenna array needs N >= 1");
    if (!positive(wavelength)) throw ConfigError("invalid configuration: wavelength must be > 0");
    std::set<std::pair<double, double>> seen;
    for (const auto& p : elements) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ConfigError("invalid configuration: non-finite element position");
        if (!seen.insert({p.x, p.y}).second)
            throw ConfigError("invalid configuration: duplicate element position");
    }
}

void SystemConfig::validate() const {
    require(num_aps >= 1, "num_aps must be >= 1");
    require(num_aps <= 63, "num_aps must be <= 63");
    require(antennas >= 1, "antennas must be >= 1");
    require(num_dl_ues >= 0 && num_ul_ues >= 0, "UE counts must be >= 0");
    require(num_targets >= 0, "num_targets must be >= 0");
    require(positive(area_side), "area_side must be > 0");
    require(placement != ApPlacement::Circle || positive(circle_radius), "circle_radius must be > 0");
    require(std::isfinite(path_loss_exponent) && path_loss_exponent > 2.0, "path_loss_exponent must be > 2");
    require(positive(reference_distance), "reference_distance must be > 0");
    require(positive(p_ul) && positive(p_dl) && positive(p_s) && positive(pilot_power),
            "all powers must be > 0");
    require(tau_up >= 1 && tau_dp >= 1, "pilot lengths must be >= 1");
    require(tau_up + tau_dp < tau, "tau_up + tau_dp must be < tau");
    require(positive(bandwidth), "bandwidth must be > 0");
    require(positive(wavelength), "wavelength must be > 0");
    require(positive(noise_dl) && positive(noise_ul) && positive(noise_s), "noise powers must be > 0");
    require(positive(sigma_loc2), "sigma_loc2 must be > 0");
    require(std::isfinite(reflection) && reflection > 0.0 && reflection <= 1.0, "reflection must be in (0, 1]");
    require(nonneg(gain_uncertainty_ap) && nonneg(gain_uncertainty_ue), "gain uncertainties must be >= 0");
    require(nonneg(steering_perturbation), "steering_perturbation must be >= 0");
}

DuplexAssignment::DuplexAssignment(std::vector<std::uint8_t> mode) : mode_(std::move(mode)) {
    for (int m = 0; m < size(); ++m) {
        if (mode_[m] > 1) throw std::invalid_argument("duplex mode must be 0 or 1");
        (mode_[m] ? dl_ : ul_).push_back(m);
    }
}

DuplexAssignment DuplexAssignment::from_mask(std::uint64_t mask, int m) {
    std::vector<std::uint8_t> mode(m);
    for (int i = 0; i < m; ++i) mode[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    return DuplexAssignment(std::move(mode));
}

DuplexAssignment DuplexAssignment::from_bits(const std::string& bits) {
    std::vector<std::uint8_t> mode;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("assignment bits must be 0/1: " + bits);
        mode.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return DuplexAssignment(std::move(mode));
}

DuplexAssignment DuplexAssignment::all_dl(int m) { return DuplexAssignment(std::vector<std::uint8_t>(m, 1)); }
DuplexAssignment DuplexAssignment::all_ul(int m) { return DuplexAssignment(std::vector<std::uint8_t>(m, 0)); }

DuplexAssignment DuplexAssignment::balanced(int m) {
    std::vector<std::uint8_t> mode(m, 0);
    for (int i = 0; i < (m + 1) / 2; ++i) mode[i] = 1;
    return DuplexAssignment(std::move(mode));
}

std::uint64_t DuplexAssignment::mask() const {
    std::uint64_t mask = 0;
    for (int i = 0; i < size(); ++i) mask |= static_cast<std::uint64_t>(mode_[i]) << i;
    return mask;
}

std::string DuplexAssignment::bits() const {
    std::string s;
    for (auto v : mode_) s.push_back(static_cast<char>('0' + v));
    return s;
}

DuplexAssignment DuplexAssignment::flipped(int m) const {
    auto mode = mode_;
    mode.at(m) ^= 1U;
    return DuplexAssignment(std::move(mode));
}

Scenario build_scenario(const SystemConfig& config) {
    config.validate();
    Scenario sc;
    sc.config = config;
    const double side = config.area_side;
    const Position center{side / 2.0, side / 2.0};

    std::mt19937_64 ap_rng(mix_seed(config.seed, kApStream));
    std::uniform_real_distribution<double> coord(0.0, side);
    for (int m = 0; m < config.num_aps; ++m) {
        ApNode ap;
        ap.id = m;
        if (config.placement == ApPlacement::Circle) {
            // The first ceil(M/2) indices take every other slot so that an
            // index-ordered half split alternates around the circle. The
            // half-step offset keeps APs off the axes through the center.
            const int half = (config.num_aps + 1) / 2;
            const int slot = m < half ? 2 * m : 2 * (m - half) + 1;
            const double phi = 2.0 * kPi * (slot + 0.5) / config.num_aps;
            ap.center = {center.x + config.circle_radius * std::cos(phi),
                         center.y + config.circle_radius * std::sin(phi)};
        } else {
            ap.center.x = coord(ap_rng);
            ap.center.y = coord(ap_rng);
        }
        ap.array = AntennaArray::ula(config.antennas, config.wavelength, config.centered_arrays);
        sc.aps.push_back(std::move(ap));
    }

    std::mt19937_64 ue_rng(mix_seed(config.seed, kUeStream));
    for (int k = 0; k < config.num_ues(); ++k) {
        UeNode ue;
        ue.id = k;
        ue.position.x = coord(ue_rng);
        ue.position.y = coord(ue_rng);
        ue.direction = k < config.num_dl_ues ? Direction::Downlink : Direction::Uplink;
        ue.power = ue.direction == Direction::Downlink ? config.p_dl : config.p_ul;
        sc.ues.push_back(ue);
    }

    std::mt19937_64 target_rng(mix_seed(config.seed, kTargetStream));
    std::vector<Position> targets;
    for (int t = 0; t < config.num_targets; ++t) {
        Position p;
        p.x = coord(target_rng);
        p.y = coord(target_rng);
        targets.push_back(p);
    }
    sc.targets = make_targets(config, sc.aps, sc.ues, targets);
    return sc;
}

Scenario with_targets(const Scenario& base, const std::vector<Position>& positions) {
    Scenario sc = base;
    sc.config.num_targets = static_cast<int>(positions.size());
    sc.targets = make_targets(sc.config, sc.aps, sc.ues, positions);
    return sc;
}

CVec steering_vector(const AntennaArray& array, double angle) {
    const double kx = std::cos(angle), ky = std::sin(angle);
    const double scale = 2.0 * kPi / array.wavelength;
    CVec a(array.size());
    for (int i = 0; i < array.size(); ++i) {
        const auto& p = array.elements[i];
        a[i] = std::polar(1.0, scale * (kx * p.x + ky * p.y));
    }
    return a;
}

CVec steering_derivative(const AntennaArray& array, double angle) {
    const double dkx = -std::sin(angle), dky = std::cos(angle);
    const double scale = 2.0 * kPi / array.wavelength;
    CVec a = steering_vector(array, angle);
    for (int i = 0; i < array.size(); ++i) {
        const auto& p = array.elements[i];
        a[i] *= cd(0.0, scale * (dkx * p.x + dky * p.y));
    }
    return a;
}

double path_gain(double d, double alpha) {
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("path_gain: distance must be > 0");
    return std::pow(d, -alpha);
}

double link_amplitude(const SystemConfig& config, const Position& a, const Position& b) {
    const double d = distance(a, b);
    if (!(d > 0.0)) throw DomainError("coincident link endpoints");
    // Links shorter than the reference distance get unit gain, never more.
    return path_gain(std::max(d, config.reference_distance) / config.reference_distance, config.path_loss_exponent);
}

double direction(const Position& from, const Position& to) {
    const double dx = to.x - from.x, dy = to.y - from.y;
    if (dx == 0.0 && dy == 0.0) throw DomainError("direction: coincident points");
    return std::atan2(dy, dx);
}

AngleTables angles(const Scenario& sc) {
    AngleTables tab;
    const int M = sc.num_aps(), T = sc.num_targets();
    tab.doa.resize(M, T);
    tab.dod.resize(T, M);
    for (int m = 0; m < M; ++m) {
        for (int t = 0; t < T; ++t) {
            tab.doa(m, t) = direction(sc.aps[m].center, sc.targets[t].position);
            tab.dod(t, m) = direction(sc.targets[t].position, sc.aps[m].center);
        }
    }
    return tab;
}

}  // namespace nafd
