#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nafd/cli.hpp"
#include "nafd/config.hpp"

using namespace nafd;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"(# tiny network for fast command runs
[system]
seed = 7
aps = 4
antennas = 4
dl_ues = 2
ul_ues = 2
targets = 1

[rl]
episodes = 20

[validate]
n_sweep = 4, 6
trials = 1000

[pareto]
comm_weights = 0.5, 1.0

[heatmap]
resolution = 3

[cdf]
scenarios = 2
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nafd_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nafd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "t.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("values land in the right fields") {
        const RunConfig c = parse_config(kSmallConfig);
        CHECK(c.seed_given);
        CHECK(c.system.seed == 7);
        CHECK(c.system.num_aps == 4);
        CHECK(c.rl.episodes == 20);
        CHECK(c.validate.n_sweep == std::vector<int>{4, 6});
        CHECK(c.pareto.comm_weights == std::vector<double>{0.5, 1.0});
        CHECK(c.heatmap.resolution == 3);
        CHECK(c.cdf.scenarios == 2);
        CHECK(c.system.antennas == 4);
        CHECK(c.system.p_dl == SystemConfig{}.p_dl);
    }

    TEST_CASE("errors name the line and the field") {
        CHECK(config_error("[system]\nantennas = 4x\n") ==
              "t.ini:2: system.antennas: expected an integer, got '4x'");
        CHECK(config_error("[system]\nbandwidth = 1e7\n\nbogus = 1\n") == "t.ini:4: system.bogus: unknown field");
        CHECK(config_error("[nope]\n") == "t.ini:1: unknown section [nope]");
        CHECK(config_error("[rl]\nlr =\n") == "t.ini:2: rl.lr: missing value");
        CHECK(config_error("aps = 3\n") == "t.ini:1: key outside of any section");
        CHECK(config_error("[system]\np_dl = nan\n").find("expected a finite number") != std::string::npos);
        CHECK(config_error("[system]\nplacement = spiral\n").find("system.placement") != std::string::npos);
    }

    TEST_CASE("canonical text round-trips") {
        RunConfig c = parse_config(kSmallConfig);
        c.system.bandwidth = 12.5e6;
        c.system.gamma_match = GammaMatch::Diagonal;
        c.rl.hidden = {16, 8, 4};
        const std::string text = to_config_text(c);
        const RunConfig back = parse_config(text);
        CHECK(to_config_text(back) == text);
        CHECK(back.system.bandwidth == 12.5e6);
        CHECK(back.system.gamma_match == GammaMatch::Diagonal);
        CHECK(back.rl.hidden == std::vector<int>{16, 8, 4});
    }

    TEST_CASE("seed is required") {
        const RunConfig c = parse_config("[system]\naps = 4\n");
        CHECK_FALSE(c.seed_given);
        CHECK_THROWS_AS(require_seed(c), ConfigError);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("exit codes") {
        const fs::path dir = scratch("exit");
        std::ofstream(dir / "noseed.ini") << "[system]\naps = 4\n";
        std::ofstream(dir / "bad.ini") << "[system]\nseed = 1\nantennas = 0\n";
        CHECK(run_cli({"heatmap", "--config", (dir / "noseed.ini").string(), "--out", dir.string()}) == cli::kExitConfig);
        CHECK(run_cli({"heatmap", "--config", (dir / "bad.ini").string(), "--out", dir.string()}) == cli::kExitConfig);
        CHECK(run_cli({"heatmap", "--config", (dir / "missing.ini").string(), "--seed", "1"}) == cli::kExitConfig);
        CHECK(run_cli({"frobnicate"}) == cli::kExitUsage);
        CHECK(run_cli({"optimize", "--seed", "1", "--solver", "greedy", "--out", dir.string()}) == cli::kExitUsage);
        CHECK(run_cli({"optimize", "--seed", "1", "--weights", "0,0", "--out", dir.string()}) != cli::kExitOk);
    }

    TEST_CASE("every command writes its files and repeats bit for bit") {
        const fs::path dir = scratch("repeat");
        std::ofstream(dir / "small.ini") << kSmallConfig;
        const std::string cfg = (dir / "small.ini").string();
        const std::vector<std::pair<std::vector<std::string>, std::string>> runs{
            {{"validate"}, "validation.csv"},
            {{"optimize", "--solver", "exu"}, "optimize_table.csv"},
            {{"optimize", "--solver", "dqn"}, "optimize_trace.csv"},
            {{"pareto"}, "pareto.csv"},
            {{"heatmap"}, "heatmap.csv"},
            {{"cdf"}, "cdf.csv"},
        };
        for (const auto& [args, file] : runs) {
            std::string first;
            for (int rep = 0; rep < 2; ++rep) {
                const fs::path out = dir / (args[0] + std::to_string(args.size()) + "_" + std::to_string(rep));
                auto full = args;
                full.insert(full.end(), {"--config", cfg, "--out", out.string()});
                REQUIRE(run_cli(full) == cli::kExitOk);
                CHECK(fs::exists(out / "run_manifest.json"));
                CHECK(fs::exists(out / "resolved_config.ini"));
                const std::string body = slurp(out / file);
                CHECK(!body.empty());
                if (rep == 0) first = body;
                else CHECK(body == first);
            }
        }
    }

    TEST_CASE("seed flag overrides the config and replay reproduces a run") {
        const fs::path dir = scratch("replay");
        std::ofstream(dir / "small.ini") << kSmallConfig;
        const std::string cfg = (dir / "small.ini").string();
        REQUIRE(run_cli({"heatmap", "--config", cfg, "--seed", "99", "--out", (dir / "a").string()}) == 0);
        REQUIRE(run_cli({"heatmap", "--config", cfg, "--out", (dir / "b").string()}) == 0);
        CHECK(slurp(dir / "a" / "heatmap.csv") != slurp(dir / "b" / "heatmap.csv"));
        CHECK(slurp(dir / "a" / "resolved_config.ini").find("seed = 99") != std::string::npos);
        REQUIRE(run_cli({"replay", "--manifest", (dir / "a" / "run_manifest.json").string(), "--out",
                         (dir / "c").string()}) == 0);
        CHECK(slurp(dir / "a" / "heatmap.csv") == slurp(dir / "c" / "heatmap.csv"));
    }

    TEST_CASE("heatmap matrix layout") {
        const fs::path dir = scratch("heatmap");
        std::ofstream(dir / "small.ini") << kSmallConfig;
        REQUIRE(run_cli({"heatmap", "--config", (dir / "small.ini").string(), "--grid", "2", "--out", dir.string()}) == 0);
        std::istringstream in(slurp(dir / "heatmap.csv"));
        std::string line;
        std::getline(in, line);
        CHECK(line == "y\\x,75,225");
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 2);
    }
}
