#include "nafd/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nafd/csv.hpp"

namespace nafd {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Ctx {
    const std::string& source;
    int line;
    std::string key;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(line) + ": " + key + ": " + msg);
    }
};

double as_double(const Ctx& c, const std::string& v) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        c.fail("expected a finite number, got '" + v + "'");
    return out;
}

long long as_int(const Ctx& c, const std::string& v) {
    long long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) c.fail("expected an integer, got '" + v + "'");
    return out;
}

int as_int32(const Ctx& c, const std::string& v) {
    const long long x = as_int(c, v);
    if (x < -2147483647LL || x > 2147483647LL) c.fail("integer out of range");
    return static_cast<int>(x);
}

std::uint64_t as_u64(const Ctx& c, const std::string& v) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        c.fail("expected an unsigned 64-bit integer, got '" + v + "'");
    return out;
}

bool as_bool(const Ctx& c, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    c.fail("expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

using Setter = std::function<void(RunConfig&, const Ctx&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"system",
         {
             {"aps", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.num_aps = as_int32(c, v); }},
             {"antennas", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.antennas = as_int32(c, v); }},
             {"dl_ues", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.num_dl_ues = as_int32(c, v); }},
             {"ul_ues", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.num_ul_ues = as_int32(c, v); }},
             {"targets", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.num_targets = as_int32(c, v); }},
             {"area_side", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.area_side = as_double(c, v); }},
             {"placement",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  if (v == "circle") r.system.placement = ApPlacement::Circle;
                  else if (v == "uniform") r.system.placement = ApPlacement::Uniform;
                  else c.fail("expected circle or uniform, got '" + v + "'");
              }},
             {"circle_radius", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.circle_radius = as_double(c, v); }},
             {"centered_arrays", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.centered_arrays = as_bool(c, v); }},
             {"path_loss_exponent", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.path_loss_exponent = as_double(c, v); }},
             {"reference_distance", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.reference_distance = as_double(c, v); }},
             {"p_ul", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.p_ul = as_double(c, v); }},
             {"p_dl", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.p_dl = as_double(c, v); }},
             {"p_s", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.p_s = as_double(c, v); }},
             {"pilot_power", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.pilot_power = as_double(c, v); }},
             {"tau", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.tau = as_int32(c, v); }},
             {"tau_up", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.tau_up = as_int32(c, v); }},
             {"tau_dp", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.tau_dp = as_int32(c, v); }},
             {"bandwidth", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.bandwidth = as_double(c, v); }},
             {"wavelength", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.wavelength = as_double(c, v); }},
             {"noise_dl", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.noise_dl = as_double(c, v); }},
             {"noise_ul", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.noise_ul = as_double(c, v); }},
             {"noise_s", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.noise_s = as_double(c, v); }},
             {"sigma_loc2", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.sigma_loc2 = as_double(c, v); }},
             {"reflection", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.reflection = as_double(c, v); }},
             {"gain_uncertainty_ap", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.gain_uncertainty_ap = as_double(c, v); }},
             {"gain_uncertainty_ue", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.gain_uncertainty_ue = as_double(c, v); }},
             {"steering_perturbation", [](RunConfig& r, const Ctx& c, const std::string& v) { r.system.steering_perturbation = as_double(c, v); }},
             {"target_power",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  if (v == "squared") r.system.target_power = TargetPowerFactor::Squared;
                  else if (v == "literal") r.system.target_power = TargetPowerFactor::Literal;
                  else c.fail("expected squared or literal, got '" + v + "'");
              }},
             {"gamma_match",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  if (v == "eigen") r.system.gamma_match = GammaMatch::Eigen;
                  else if (v == "diagonal") r.system.gamma_match = GammaMatch::Diagonal;
                  else c.fail("expected eigen or diagonal, got '" + v + "'");
              }},
             {"seed",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  r.system.seed = as_u64(c, v);
                  r.seed_given = true;
              }},
         }},
        {"rl",
         {
             {"episodes", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.episodes = as_int32(c, v); }},
             {"steps", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.steps = as_int32(c, v); }},
             {"lr", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.lr = as_double(c, v); }},
             {"gamma", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.gamma = as_double(c, v); }},
             {"eps_start", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.eps_start = as_double(c, v); }},
             {"eps_end", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.eps_end = as_double(c, v); }},
             {"target_update", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.target_update = as_int32(c, v); }},
             {"eps_decay_updates", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.eps_decay_updates = as_int32(c, v); }},
             {"replay_capacity", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.replay_capacity = as_int32(c, v); }},
             {"batch", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.batch = as_int32(c, v); }},
             {"hidden",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  r.rl.hidden.clear();
                  for (const auto& item : split_list(v)) r.rl.hidden.push_back(as_int32(c, item));
              }},
             {"reward_probe_states", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.reward_probe_states = as_int32(c, v); }},
             {"eval_start",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  if (v == "balanced") r.rl.eval_start = EvalStart::Balanced;
                  else if (v == "random") r.rl.eval_start = EvalStart::Random;
                  else c.fail("expected balanced or random, got '" + v + "'");
              }},
             {"eval_steps", [](RunConfig& r, const Ctx& c, const std::string& v) { r.rl.eval_steps = as_int32(c, v); }},
         }},
        {"weights",
         {
             {"comm", [](RunConfig& r, const Ctx& c, const std::string& v) { r.weights.comm = as_double(c, v); }},
             {"sense", [](RunConfig& r, const Ctx& c, const std::string& v) { r.weights.sense = as_double(c, v); }},
         }},
        {"validate",
         {
             {"n_sweep",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  r.validate.n_sweep.clear();
                  for (const auto& item : split_list(v)) r.validate.n_sweep.push_back(as_int32(c, item));
              }},
             {"trials",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  const long long t = as_int(c, v);
                  if (t < 0) c.fail("trials must be >= 0");
                  r.validate.trials = static_cast<std::size_t>(t);
              }},
         }},
        {"pareto",
         {
             {"comm_weights",
              [](RunConfig& r, const Ctx& c, const std::string& v) {
                  r.pareto.comm_weights.clear();
                  for (const auto& item : split_list(v)) r.pareto.comm_weights.push_back(as_double(c, item));
              }},
         }},
        {"heatmap",
         {
             {"resolution", [](RunConfig& r, const Ctx& c, const std::string& v) { r.heatmap.resolution = as_int32(c, v); }},
             {"assignment", [](RunConfig& r, const Ctx&, const std::string& v) { r.heatmap.assignment = v; }},
         }},
        {"cdf",
         {
             {"scenarios", [](RunConfig& r, const Ctx& c, const std::string& v) { r.cdf.scenarios = as_int32(c, v); }},
         }},
    };
    return s;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
    RunConfig cfg;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    const auto& sch = schema();
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(source + ":" + std::to_string(line) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!sch.count(section))
                throw ConfigError(source + ":" + std::to_string(line) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(source + ":" + std::to_string(line) + ": key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const Ctx ctx{source, line, section + "." + key};
        const auto& keys = sch.at(section);
        auto it = keys.find(key);
        if (it == keys.end()) ctx.fail("unknown field");
        if (value.empty()) ctx.fail("missing value");
        it->second(cfg, ctx, value);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path + ": cannot open configuration file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

void require_seed(const RunConfig& cfg) {
    if (!cfg.seed_given) throw ConfigError("missing required field 'system.seed' (set it in the config or pass --seed)");
}

std::string to_config_text(const RunConfig& r) {
    const auto& s = r.system;
    auto d = [](double v) { return csv::num(v); };
    auto i = [](long long v) { return std::to_string(v); };
    auto list_i = [](const std::vector<int>& v) {
        std::string out;
        for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
        return out;
    };
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    out += "[system]\n";
    kv("seed", std::to_string(s.seed));
    kv("aps", i(s.num_aps));
    kv("antennas", i(s.antennas));
    kv("dl_ues", i(s.num_dl_ues));
    kv("ul_ues", i(s.num_ul_ues));
    kv("targets", i(s.num_targets));
    kv("area_side", d(s.area_side));
    kv("placement", s.placement == ApPlacement::Circle ? "circle" : "uniform");
    kv("circle_radius", d(s.circle_radius));
    kv("centered_arrays", s.centered_arrays ? "true" : "false");
    kv("path_loss_exponent", d(s.path_loss_exponent));
    kv("reference_distance", d(s.reference_distance));
    kv("p_ul", d(s.p_ul));
    kv("p_dl", d(s.p_dl));
    kv("p_s", d(s.p_s));
    kv("pilot_power", d(s.pilot_power));
    kv("tau", i(s.tau));
    kv("tau_up", i(s.tau_up));
    kv("tau_dp", i(s.tau_dp));
    kv("bandwidth", d(s.bandwidth));
    kv("wavelength", d(s.wavelength));
    kv("noise_dl", d(s.noise_dl));
    kv("noise_ul", d(s.noise_ul));
    kv("noise_s", d(s.noise_s));
    kv("sigma_loc2", d(s.sigma_loc2));
    kv("reflection", d(s.reflection));
    kv("gain_uncertainty_ap", d(s.gain_uncertainty_ap));
    kv("gain_uncertainty_ue", d(s.gain_uncertainty_ue));
    kv("steering_perturbation", d(s.steering_perturbation));
    kv("target_power", s.target_power == TargetPowerFactor::Squared ? "squared" : "literal");
    kv("gamma_match", s.gamma_match == GammaMatch::Eigen ? "eigen" : "diagonal");
    out += "\n[rl]\n";
    kv("episodes", i(r.rl.episodes));
    kv("steps", i(r.rl.steps));
    kv("lr", d(r.rl.lr));
    kv("gamma", d(r.rl.gamma));
    kv("eps_start", d(r.rl.eps_start));
    kv("eps_end", d(r.rl.eps_end));
    kv("target_update", i(r.rl.target_update));
    kv("eps_decay_updates", i(r.rl.eps_decay_updates));
    kv("replay_capacity", i(r.rl.replay_capacity));
    kv("batch", i(r.rl.batch));
    kv("hidden", list_i(r.rl.hidden));
    kv("reward_probe_states", i(r.rl.reward_probe_states));
    kv("eval_start", r.rl.eval_start == EvalStart::Balanced ? "balanced" : "random");
    kv("eval_steps", i(r.rl.eval_steps));
    out += "\n[weights]\n";
    kv("comm", d(r.weights.comm));
    kv("sense", d(r.weights.sense));
    out += "\n[validate]\n";
    kv("n_sweep", list_i(r.validate.n_sweep));
    kv("trials", std::to_string(r.validate.trials));
    out += "\n[pareto]\n";
    std::string cw;
    for (std::size_t k = 0; k < r.pareto.comm_weights.size(); ++k) cw += (k ? "," : "") + d(r.pareto.comm_weights[k]);
    kv("comm_weights", cw);
    out += "\n[heatmap]\n";
    kv("resolution", i(r.heatmap.resolution));
    kv("assignment", r.heatmap.assignment);
    out += "\n[cdf]\n";
    kv("scenarios", i(r.cdf.scenarios));
    return out;
}

}  // namespace nafd
