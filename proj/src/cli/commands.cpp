#include "nafd/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nafd/admo.hpp"
#include "nafd/csv.hpp"
#include "nafd/montecarlo.hpp"
#include "nafd/sensing.hpp"
#include "nafd/statistics.hpp"

namespace nafd::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string bits_of(const DuplexAssignment& a) { return a.bits(); }

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

DuplexAssignment heatmap_assignment(const RunConfig& cfg) {
    const int m = cfg.system.num_aps;
    if (cfg.heatmap.assignment == "balanced") return DuplexAssignment::balanced(m);
    if (cfg.heatmap.assignment == "all_dl") return DuplexAssignment::all_dl(m);
    if (cfg.heatmap.assignment == "all_ul") return DuplexAssignment::all_ul(m);
    DuplexAssignment a;
    try {
        a = DuplexAssignment::from_bits(cfg.heatmap.assignment);
    } catch (const std::exception& e) {
        throw ConfigError("heatmap.assignment: " + std::string(e.what()));
    }
    if (a.size() != m)
        throw ConfigError("heatmap.assignment: expected " + std::to_string(m) + " modes, got " +
                          std::to_string(a.size()));
    return a;
}

std::pair<double, double> parse_weights(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw UsageError("--weights expects 'comm,sense'");
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
        const double wc = std::stod(a, &p1);
        const double ws = std::stod(b, &p2);
        if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing characters");
        return {wc, ws};
    } catch (const std::exception&) {
        throw UsageError("--weights expects two numbers, got '" + s + "'");
    }
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
    RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
    if (opts.seed) {
        cfg.system.seed = *opts.seed;
        cfg.seed_given = true;
    }
    if (opts.trials) cfg.validate.trials = *opts.trials;
    if (opts.weights) {
        cfg.weights.comm = opts.weights->first;
        cfg.weights.sense = opts.weights->second;
    }
    if (opts.grid) cfg.heatmap.resolution = *opts.grid;
    if (opts.scenarios) cfg.cdf.scenarios = *opts.scenarios;
    require_seed(cfg);
    cfg.system.validate();
    cfg.rl.validate();
    cfg.weights.validate();
    return cfg;
}

std::vector<std::string> cmd_validate(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.validate.n_sweep.empty()) throw ConfigError("validate.n_sweep: must not be empty");
    const auto rows = mc_validation_report(cfg.system, cfg.validate.n_sweep, cfg.validate.trials);
    csv::write_file(join_path(out_dir, "validation.csv"), validation_csv(rows));
    return {"validation.csv"};
}

std::vector<std::string> cmd_optimize(const RunConfig& cfg, const std::string& solver_name_arg,
                                      const std::string& out_dir) {
    Solver solver;
    try {
        solver = parse_solver(solver_name_arg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const Scenario sc = build_scenario(cfg.system);
    const ChannelStatistics stats(sc);
    const ObjectiveEvaluator ev(stats);
    const auto out = run_solver(solver, cfg.weights, ev, cfg.rl, mix_seed(cfg.system.seed, 100));

    std::vector<std::string> files;
    if (out.trace) {
        std::string t = csv::row({"episode", "mean_reward", "mean_loss"});
        const auto& tr = *out.trace;
        for (std::size_t e = 0; e < tr.episode_mean_reward.size(); ++e)
            t += csv::row({csv::num(static_cast<long long>(e)), csv::num(tr.episode_mean_reward[e]),
                           csv::num(tr.episode_loss[e])});
        csv::write_file(join_path(out_dir, "optimize_trace.csv"), t);
        files.push_back("optimize_trace.csv");
        if (tr.diverged) throw DivergenceError(solver_name(solver) + " diverged: " + tr.error);
    }
    if (out.exhaustive) {
        std::string t = csv::row({"mask", "assignment", "num_dl", "f1", "f2", "reward"});
        for (std::size_t k = 0; k < out.exhaustive->table.size(); ++k) {
            const auto& e = out.exhaustive->table[k];
            t += csv::row({csv::num(static_cast<long long>(k)), bits_of(e.assignment),
                           csv::num(static_cast<long long>(e.assignment.dl_aps().size())), csv::num(e.obj.f1),
                           csv::num(e.obj.f2), csv::num(e.reward)});
        }
        csv::write_file(join_path(out_dir, "optimize_table.csv"), t);
        files.push_back("optimize_table.csv");
    }
    std::string r = csv::row({"solver", "assignment", "num_dl", "f1", "f2", "reward"});
    r += csv::row({solver_name(solver), bits_of(out.best.assignment),
                   csv::num(static_cast<long long>(out.best.assignment.dl_aps().size())), csv::num(out.best.obj.f1),
                   csv::num(out.best.obj.f2), csv::num(out.best.reward)});
    csv::write_file(join_path(out_dir, "optimize_result.csv"), r);
    files.insert(files.begin(), "optimize_result.csv");
    return files;
}

std::vector<std::string> cmd_pareto(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.pareto.comm_weights.empty()) throw ConfigError("pareto.comm_weights: must not be empty");
    for (double wc : cfg.pareto.comm_weights)
        if (!(wc >= 0.0 && wc <= 1.0)) throw ConfigError("pareto.comm_weights: values must lie in [0, 1]");
    const Scenario sc = build_scenario(cfg.system);
    const ChannelStatistics stats(sc);
    const ObjectiveEvaluator ev(stats);
    // The exhaustive table does not depend on the weights.
    const auto exu = exhaustive_search(RewardWeights{1.0, 0.0}, ev);
    const auto front = pareto_front(exu.table);
    std::vector<bool> on_front(exu.table.size(), false);
    for (auto i : front) on_front[i] = true;

    std::string t = csv::row({"source", "assignment", "f1", "f2", "is_pareto", "comm_weight", "sense_weight",
                              "front_distance"});
    for (std::size_t k = 0; k < exu.table.size(); ++k) {
        const auto& e = exu.table[k];
        t += csv::row({"exu", bits_of(e.assignment), csv::num(e.obj.f1), csv::num(e.obj.f2),
                       on_front[k] ? "true" : "false", "", "",
                       csv::num(front_distance(e.obj, exu.table, front))});
    }
    for (std::size_t k = 0; k < cfg.pareto.comm_weights.size(); ++k) {
        const RewardWeights w{cfg.pareto.comm_weights[k], 1.0 - cfg.pareto.comm_weights[k]};
        const auto tr = dqn_train(cfg.rl, w, ev, mix_seed(cfg.system.seed, 200 + k));
        if (tr.diverged) throw DivergenceError("dqn diverged: " + tr.error);
        const auto& e = tr.result;
        const bool pareto = on_front[e.assignment.mask()];
        t += csv::row({"dqn", bits_of(e.assignment), csv::num(e.obj.f1), csv::num(e.obj.f2),
                       pareto ? "true" : "false", csv::num(w.comm), csv::num(w.sense),
                       csv::num(front_distance(e.obj, exu.table, front))});
    }
    csv::write_file(join_path(out_dir, "pareto.csv"), t);
    return {"pareto.csv"};
}

std::vector<std::string> cmd_heatmap(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.heatmap.resolution < 2) throw ConfigError("heatmap.resolution: must be >= 2");
    const Scenario sc = build_scenario(cfg.system);
    const auto hm = ler_heatmap(sc, heatmap_assignment(cfg), cfg.heatmap.resolution);
    // Header row holds the x cell centers; each row leads with its y center.
    std::vector<std::string> header{"y\\x"};
    for (double x : hm.xs) header.push_back(csv::num(x));
    std::string t = csv::row(header);
    for (std::size_t iy = 0; iy < hm.ys.size(); ++iy) {
        std::vector<std::string> cells{csv::num(hm.ys[iy])};
        for (std::size_t ix = 0; ix < hm.xs.size(); ++ix)
            cells.push_back(csv::num(hm.ler(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix))));
        t += csv::row(cells);
    }
    csv::write_file(join_path(out_dir, "heatmap.csv"), t);
    return {"heatmap.csv"};
}

std::vector<std::string> cmd_cdf(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.cdf.scenarios < 1) throw ConfigError("cdf.scenarios: must be >= 1");
    const auto table = cdf_experiment(cfg.system, cfg.cdf.scenarios, cfg.weights, all_solvers(), cfg.rl,
                                      cfg.system.seed);
    csv::write_file(join_path(out_dir, "cdf.csv"), cdf_csv(table));
    return {"cdf.csv"};
}

std::vector<std::string> execute(const CommandOptions& opts) {
    const RunConfig cfg = resolve_config(opts);
    fs::create_directories(opts.out_dir);
    std::vector<std::string> files;
    if (opts.command == "validate") files = cmd_validate(cfg, opts.out_dir);
    else if (opts.command == "optimize") files = cmd_optimize(cfg, opts.solver, opts.out_dir);
    else if (opts.command == "pareto") files = cmd_pareto(cfg, opts.out_dir);
    else if (opts.command == "heatmap") files = cmd_heatmap(cfg, opts.out_dir);
    else if (opts.command == "cdf") files = cmd_cdf(cfg, opts.out_dir);
    else throw UsageError("unknown command '" + opts.command + "'");

    csv::write_file(join_path(opts.out_dir, "resolved_config.ini"), to_config_text(cfg));
    nlohmann::ordered_json m;
    m["command"] = opts.command;
    m["config_path"] = opts.config_path;
    m["resolved_config"] = "resolved_config.ini";
    m["seed"] = cfg.system.seed;
    m["solver"] = opts.solver;
    m["output_dir"] = opts.out_dir;
    m["outputs"] = files;
    m["argv"] = opts.argv;
    m["timestamp"] = utc_timestamp();
    m["version"] = NAFD_VERSION;
    csv::write_file(join_path(opts.out_dir, "run_manifest.json"), m.dump(2) + "\n");
    return files;
}

namespace {

CommandOptions options_from_manifest(const std::string& path, const std::string& out_dir) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open manifest");
    nlohmann::json m;
    try {
        f >> m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    CommandOptions o;
    try {
        o.command = m.at("command").get<std::string>();
        o.solver = m.at("solver").get<std::string>();
        o.config_path = (fs::path(path).parent_path() / m.at("resolved_config").get<std::string>()).string();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    o.out_dir = out_dir;
    return o;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Duplex-mode optimization toolkit for cell-free ISAC networks", "nafd"};
    app.set_version_flag("--version", std::string(NAFD_VERSION));
    app.require_subcommand(1);

    CommandOptions opts;
    std::optional<std::string> weights;
    std::string manifest;
    for (int i = 0; i < argc; ++i) opts.argv.emplace_back(argv[i]);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Configuration file");
        sub->add_option("--seed", opts.seed, "Master seed (overrides system.seed)");
        sub->add_option("--out", opts.out_dir, "Output directory");
    };
    auto* validate = app.add_subcommand("validate", "Closed-form versus Monte-Carlo SINR over an N sweep");
    common(validate);
    validate->add_option("--trials", opts.trials, "Monte-Carlo trials per N");
    auto* optimize = app.add_subcommand("optimize", "Run one duplex-mode solver");
    common(optimize);
    optimize->add_option("--solver", opts.solver, "random, avg, exu, qlearn or dqn");
    optimize->add_option("--weights", weights, "Reward weights comm,sense");
    auto* pareto = app.add_subcommand("pareto", "Exhaustive front and DQN weight sweep");
    common(pareto);
    auto* heatmap = app.add_subcommand("heatmap", "Localization error rate over a target grid");
    common(heatmap);
    heatmap->add_option("--grid", opts.grid, "Grid resolution per axis");
    auto* cdf = app.add_subcommand("cdf", "Reward distribution of every solver over random scenarios");
    common(cdf);
    cdf->add_option("--scenarios", opts.scenarios, "Number of random scenarios");
    cdf->add_option("--weights", weights, "Reward weights comm,sense");
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("--manifest", manifest, "run_manifest.json to replay")->required();
    replay->add_option("--out", opts.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (replay->parsed()) {
            auto argv_copy = opts.argv;
            opts = options_from_manifest(manifest, opts.out_dir);
            opts.argv = argv_copy;
        } else {
            opts.command = app.get_subcommands().front()->get_name();
            if (weights) opts.weights = parse_weights(*weights);
        }
        const auto files = execute(opts);
        for (const auto& f : files) std::cout << join_path(opts.out_dir, f) << "\n";
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SizeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace nafd::cli
