#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nafd/config.hpp"

namespace nafd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct CommandOptions {
    std::string command;
    std::string config_path;  // empty: built-in defaults
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string solver = "dqn";
    std::optional<std::size_t> trials;
    std::optional<std::pair<double, double>> weights;
    std::optional<int> grid;
    std::optional<int> scenarios;
    std::vector<std::string> argv;  // recorded in the manifest
};

// Loads the config, applies flag overrides and checks required fields.
RunConfig resolve_config(const CommandOptions& opts);

// Each command writes its CSVs into out_dir and returns the file names.
std::vector<std::string> cmd_validate(const RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_optimize(const RunConfig& cfg, const std::string& solver, const std::string& out_dir);
std::vector<std::string> cmd_pareto(const RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_heatmap(const RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_cdf(const RunConfig& cfg, const std::string& out_dir);

// Runs the command and writes run_manifest.json plus resolved_config.ini.
std::vector<std::string> execute(const CommandOptions& opts);

// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace nafd::cli
