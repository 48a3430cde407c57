// Command-line front end: scenario simulation, closed-form surfaces, the
// real-time trading rule, and parameter sweeps. All outputs are CSV files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigmkt/analytics.hpp"
#include "sigmkt/experiments.hpp"
#include "sigmkt/strategy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<long long> paths;
    std::optional<long long> threads;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
    cmd->add_option("--config", args.config_path, "experiment configuration file")->required();
    auto* out = cmd->add_option("--out", args.out_dir, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--paths", args.paths, "override the Monte Carlo path count");
    cmd->add_option("--threads", args.threads, "override the worker thread count");
}

sigmkt::ExperimentConfig load_with_overrides(const CommonArgs& args) {
    sigmkt::ExperimentConfig cfg = sigmkt::load_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.paths) {
        if (*args.paths < 0) throw sigmkt::ConfigError("paths: must be nonnegative");
        cfg.paths = static_cast<std::size_t>(*args.paths);
    }
    if (args.threads) {
        if (*args.threads < 1) throw sigmkt::ConfigError("threads: must be at least 1");
        cfg.threads = static_cast<unsigned>(*args.threads);
    }
    return cfg;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

/// Gain surface driving the decision layer: the signal-independent H surface
/// for the gaussian payoff at level x, or the prior-mass digital expectation.
sigmkt::DecisionGrid build_gain_surface(const sigmkt::ExperimentConfig& cfg,
                                        const sigmkt::TimeGrid& grid, double x, int agent) {
    const double s1 = cfg.agents.at(0).believed_sigma;
    const double s2 = cfg.agents.at(1).believed_sigma;
    if (cfg.payoff.kind() == sigmkt::PayoffKind::gaussian) {
        return sigmkt::h_surface(s1, s2, grid, x, agent);
    }
    if (cfg.payoff.kind() == sigmkt::PayoffKind::digital) {
        sigmkt::DecisionGrid g;
        g.intervals = grid.intervals();
        g.value.resize(g.intervals);
        for (std::size_t t = 1; t < g.intervals; ++t) {
            g.value[t].resize(t);
            for (std::size_t s = 0; s < t; ++s) {
                const sigmkt::QualityInputs q{s1, s2, grid.times[t], grid.times[s], grid.horizon};
                g.value[t][s] =
                    sigmkt::expected_profit_digital(q, cfg.payoff, cfg.payoff.p1(), agent);
            }
        }
        return g;
    }
    throw sigmkt::ConfigError("payoff: surfaces need a digital or gaussian payoff");
}

int cmd_simulate(const CommonArgs& args) {
    const sigmkt::ExperimentConfig cfg = load_with_overrides(args);
    fs::create_directories(args.out_dir);
    const sigmkt::AggregateResult result = sigmkt::run_experiment(cfg);
    const fs::path out = fs::path(args.out_dir) / "result.csv";
    sigmkt::emit_csv(result, out.string());
    std::cout << "wrote " << out.string() << " (" << result.paths << " paths)\n";
    for (std::size_t j = 0; j < result.total_pnl_mean.size(); ++j) {
        std::cout << "agent " << j << ": total pnl " << fmt(result.total_pnl_mean[j]) << " +- "
                  << fmt(result.total_pnl_se[j]) << " (se)\n";
    }
    return 0;
}

int cmd_analyze(const CommonArgs& args, double x, int agent) {
    const sigmkt::ExperimentConfig cfg = load_with_overrides(args);
    fs::create_directories(args.out_dir);
    const sigmkt::TimeGrid grid = sigmkt::make_grid(cfg.horizon, cfg.intervals);
    const double s1 = cfg.agents.at(0).believed_sigma;
    const double s2 = cfg.agents.at(1).believed_sigma;

    {
        auto out = open_out(fs::path(args.out_dir) / "quality.csv");
        out << "t,s,p_correct_1,p_correct_2,a,b\n";
        for (std::size_t t = 1; t < grid.intervals(); ++t) {
            for (std::size_t s = 0; s < t; ++s) {
                const sigmkt::QualityInputs q{s1, s2, grid.times[t], grid.times[s], grid.horizon};
                double p1;
                if (cfg.payoff.kind() == sigmkt::PayoffKind::digital) {
                    p1 = sigmkt::p_correct_digital(q, cfg.payoff.spread(), 1);
                } else {
                    p1 = sigmkt::p_correct_gaussian(q, sigmkt::GaussianHalfPosterior{0.0, 1.0}, 1);
                }
                const sigmkt::ABCoefficients ab = sigmkt::ab_coefficients(q);
                out << fmt(grid.times[t]) << ',' << fmt(grid.times[s]) << ',' << fmt(p1) << ','
                    << fmt(1.0 - p1) << ',' << fmt(ab.a) << ',' << fmt(ab.b) << '\n';
            }
        }
    }

    const sigmkt::DecisionGrid gain = build_gain_surface(cfg, grid, x, agent);
    {
        auto out = open_out(fs::path(args.out_dir) / "h_surface.csv");
        out << "t,s,gain\n";
        for (std::size_t t = 1; t < grid.intervals(); ++t) {
            for (std::size_t s = 0; s < t; ++s) {
                out << fmt(grid.times[t]) << ',' << fmt(grid.times[s]) << ','
                    << fmt(gain.at(t, s)) << '\n';
            }
        }
    }
    {
        auto out = open_out(fs::path(args.out_dir) / "adjusted_gain.csv");
        out << "t,s,adjusted_gain\n";
        for (std::size_t t = 1; t + 1 < grid.intervals(); ++t) {
            for (std::size_t s = 0; s < t; ++s) {
                out << fmt(grid.times[t]) << ',' << fmt(grid.times[s]) << ','
                    << fmt(sigmkt::adjusted_gain(gain, t, s)) << '\n';
            }
        }
    }
    {
        const sigmkt::ValueGrid vg = sigmkt::value_recursion(gain);
        auto out = open_out(fs::path(args.out_dir) / "value.csv");
        out << "t,s,value,action\n";
        for (std::size_t t = 1; t < grid.intervals(); ++t) {
            for (std::size_t s = 0; s < t; ++s) {
                out << fmt(grid.times[t]) << ',' << fmt(grid.times[s]) << ',' << fmt(vg.v[t][s])
                    << ',' << (vg.policy[t][s] == sigmkt::Action::trade ? "trade" : "skip")
                    << '\n';
            }
        }
    }
    std::cout << "wrote quality.csv, h_surface.csv, adjusted_gain.csv, value.csv under "
              << args.out_dir << "\n";
    return 0;
}

int cmd_strategy(const CommonArgs& args, double x, int agent) {
    const sigmkt::ExperimentConfig cfg = load_with_overrides(args);
    fs::create_directories(args.out_dir);
    const sigmkt::TimeGrid grid = sigmkt::make_grid(cfg.horizon, cfg.intervals);
    const sigmkt::DecisionGrid gain = build_gain_surface(cfg, grid, x, agent);
    const sigmkt::ValueGrid vg = sigmkt::value_recursion(gain);
    const sigmkt::StrategyTrace trace = sigmkt::run_realtime_policy(gain);

    {
        auto out = open_out(fs::path(args.out_dir) / "trace.csv");
        out << "auction_index,t,s,action,gain\n";
        for (std::size_t t = 1; t < grid.intervals(); ++t) {
            const std::size_t s = trace.last_trade[t - 1];
            out << t << ',' << fmt(grid.times[t]) << ',' << fmt(grid.times[s]) << ','
                << (trace.actions[t - 1] == sigmkt::Action::trade ? "trade" : "skip") << ','
                << fmt(gain.at(t, s)) << '\n';
        }
    }

    std::cout << "real-time policy total gain: " << fmt(trace.total_gain) << "\n";
    std::cout << "value recursion optimum:     " << fmt(vg.root()) << "\n";

    if (cfg.intervals <= 12) {
        // Exhaustive check over all 2^(m-1) schedules.
        const std::size_t auctions = cfg.intervals - 1;
        double best = 0.0;
        for (std::size_t mask = 0; mask < (1ULL << auctions); ++mask) {
            double total = 0.0;
            std::size_t s = 0;
            for (std::size_t t = 1; t <= auctions; ++t) {
                if (mask & (1ULL << (t - 1))) {
                    total += gain.at(t, s);
                    s = t;
                }
            }
            best = std::max(best, total);
        }
        std::cout << "exhaustive enumeration:      " << fmt(best) << "  (|diff| "
                  << fmt(std::abs(best - vg.root())) << ")\n";
    } else {
        std::cout << "enumeration skipped (only run for intervals <= 12)\n";
    }
    return 0;
}

json& navigate(json& doc, const std::string& dotted, std::string* leaf) {
    json* node = &doc;
    std::stringstream ss(dotted);
    std::string part, prev;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw sigmkt::ConfigError("param: empty path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const std::string& key = parts[i];
        if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
            node = &(*node)[std::stoul(key)];
        } else {
            node = &(*node)[key];
        }
    }
    *leaf = parts.back();
    return *node;
}

int cmd_sweep(const CommonArgs& args, const std::string& param,
              const std::vector<std::string>& values) {
    std::ifstream in(args.config_path);
    if (!in) throw sigmkt::ConfigError("config: cannot open '" + args.config_path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw sigmkt::ConfigError(std::string("config: ") + e.what());
    }

    fs::create_directories(args.out_dir);
    auto summary = open_out(fs::path(args.out_dir) / "sweep_summary.csv");
    summary << "param,value";
    bool header_done = false;

    for (const std::string& value : values) {
        json variant = doc;
        std::string leaf;
        json& parent = navigate(variant, param, &leaf);
        try {
            parent[leaf] = json::parse(value);
        } catch (const json::exception&) {
            parent[leaf] = value;  // uninterpretable as JSON: keep the raw string
        }
        sigmkt::ExperimentConfig cfg = sigmkt::config_from_json_text(variant.dump());
        if (args.seed) cfg.seed = *args.seed;
        if (args.paths) cfg.paths = static_cast<std::size_t>(*args.paths);
        if (args.threads) cfg.threads = static_cast<unsigned>(*args.threads);

        const sigmkt::AggregateResult result = sigmkt::run_experiment(cfg);
        const fs::path dir = fs::path(args.out_dir) / (param + "=" + value);
        fs::create_directories(dir);
        sigmkt::emit_csv(result, (dir / "result.csv").string());

        if (!header_done) {
            for (std::size_t j = 0; j < result.total_pnl_mean.size(); ++j) {
                summary << ",agent" << j << "_total_pnl,agent" << j << "_total_se";
            }
            summary << "\n";
            header_done = true;
        }
        summary << param << ',' << value;
        for (std::size_t j = 0; j < result.total_pnl_mean.size(); ++j) {
            summary << ',' << fmt(result.total_pnl_mean[j]) << ','
                    << fmt(result.total_pnl_se[j]);
        }
        summary << "\n";
        std::cout << param << "=" << value << " done\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-driven sequential-auction market simulator"};
    app.require_subcommand(1);

    CommonArgs sim_args, ana_args, str_args, swp_args;
    double ana_x = 0.5, str_x = 0.5;
    int ana_agent = 2, str_agent = 2;
    std::string sweep_param;
    std::vector<std::string> sweep_values;

    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo scenario and emit CSVs");
    add_common(sim, sim_args, true);

    auto* ana = app.add_subcommand("analyze", "closed-form quality/gain/value surfaces");
    add_common(ana, ana_args, true);
    ana->add_option("--x", ana_x, "payoff level for the gain surface");
    ana->add_option("--agent", ana_agent, "agent index (1 or 2)")->check(CLI::Range(1, 2));

    auto* str = app.add_subcommand("strategy", "decision trace and enumeration comparison");
    add_common(str, str_args, true);
    str->add_option("--x", str_x, "payoff level for the gain surface");
    str->add_option("--agent", str_agent, "agent index (1 or 2)")->check(CLI::Range(1, 2));

    auto* swp = app.add_subcommand("sweep", "rerun a scenario over a list of parameter values");
    add_common(swp, swp_args, true);
    swp->add_option("--param", sweep_param, "dotted config path, e.g. agents.1.sigma")->required();
    swp->add_option("--values", sweep_values, "comma separated values")
        ->required()
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (ana->parsed()) return cmd_analyze(ana_args, ana_x, ana_agent);
        if (str->parsed()) return cmd_strategy(str_args, str_x, str_agent);
        if (swp->parsed()) return cmd_sweep(swp_args, sweep_param, sweep_values);
    } catch (const sigmkt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
