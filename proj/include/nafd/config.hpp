#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nafd/admo.hpp"
#include "nafd/scenario.hpp"

namespace nafd {

struct ValidateOptions {
    std::vector<int> n_sweep{8, 12, 16, 20, 24};
    std::size_t trials = 100000;
};

struct ParetoOptions {
    // Communication weights; the sensing weight is 1 - comm.
    std::vector<double> comm_weights{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
};

struct HeatmapOptions {
    int resolution = 30;
    std::string assignment = "balanced";  // or an explicit bit string, AP 0 first
};

struct CdfOptions {
    int scenarios = 50;
};

struct RunConfig {
    SystemConfig system;
    DqnConfig rl;
    RewardWeights weights;
    ValidateOptions validate;
    ParetoOptions pareto;
    HeatmapOptions heatmap;
    CdfOptions cdf;
    bool seed_given = false;
};

// Parses the sectioned key = value format. Unknown sections or keys and
// malformed values raise ConfigError with "source:line: message".
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
// Fails with a named-field ConfigError when the seed was never supplied.
void require_seed(const RunConfig& cfg);
// Canonical text that parses back to the same configuration.
std::string to_config_text(const RunConfig& cfg);

}  // namespace nafd
