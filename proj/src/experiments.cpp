#include "sigmkt/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sigmkt/rng.hpp"

namespace sigmkt {

namespace {

using nlohmann::json;

Scenario parse_scenario(const std::string& name) {
    if (name == "omitter") return Scenario::omitter;
    if (name == "attentive") return Scenario::attentive;
    if (name == "strategic") return Scenario::strategic;
    if (name == "cara") return Scenario::cara;
    throw ConfigError("scenario: expected omitter, attentive, strategic or cara, got '" + name +
                      "'");
}

AgentMode default_mode(Scenario scenario) {
    return scenario == Scenario::omitter ? AgentMode::omitter : AgentMode::attentive;
}

PayoffModel parse_payoff(const json& j) {
    const std::string kind = j.value("kind", "digital");
    try {
        if (kind == "digital") {
            return PayoffModel::digital(j.value("x0", 0.0), j.value("x1", 1.0),
                                        j.value("p0", 0.5), j.value("p1", 0.5));
        }
        if (kind == "gaussian") return PayoffModel::gaussian();
        if (kind == "tabulated") {
            if (!j.contains("x") || !j.contains("weights")) {
                throw ConfigError("payoff: tabulated kind needs 'x' and 'weights'");
            }
            return PayoffModel::tabulated(j.at("x").get<std::vector<double>>(),
                                          j.at("weights").get<std::vector<double>>());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("payoff: ") + e.what());
    }
    throw ConfigError("payoff.kind: expected digital, gaussian or tabulated, got '" + kind + "'");
}

std::vector<AgentSpec> default_agents(Scenario scenario) {
    AgentSpec low{0.5, 0.5, 1.5, std::nullopt, std::nullopt};
    AgentSpec high{1.5, 1.5, 0.5, std::nullopt, std::nullopt};
    if (scenario == Scenario::cara) {
        low.lambda = 1.0;
        high.lambda = 1.0;
    }
    return {low, high};
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    if (!j.contains("scenario")) throw ConfigError("scenario: missing required field");

    ExperimentConfig cfg;
    cfg.scenario = parse_scenario(j.at("scenario").get<std::string>());
    cfg.horizon = j.value("horizon", 1.0);
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon: must be positive");
    if (j.contains("intervals")) {
        const auto m = j.at("intervals").get<long long>();
        if (m < 1) throw ConfigError("intervals: must be at least 1");
        cfg.intervals = static_cast<std::size_t>(m);
    }
    cfg.rate = j.value("rate", 0.05);
    if (j.contains("payoff")) cfg.payoff = parse_payoff(j.at("payoff"));

    if (j.contains("agents")) {
        const json& arr = j.at("agents");
        if (!arr.is_array() || arr.size() < 2) {
            throw ConfigError("agents: need an array of at least two agents");
        }
        for (std::size_t idx = 0; idx < arr.size(); ++idx) {
            const json& a = arr[idx];
            AgentSpec spec;
            if (!a.contains("sigma")) {
                throw ConfigError("agents[" + std::to_string(idx) + "].sigma: missing");
            }
            spec.sigma = a.at("sigma").get<double>();
            if (!(spec.sigma > 0.0)) {
                throw ConfigError("agents[" + std::to_string(idx) + "].sigma: must be positive");
            }
            spec.believed_sigma = a.value("believed_sigma", spec.sigma);
            spec.counterpart_sigma = a.value("counterpart_sigma", 0.0);
            if (a.contains("lambda")) spec.lambda = a.at("lambda").get<double>();
            if (a.contains("mode")) {
                const std::string mode = a.at("mode").get<std::string>();
                if (mode == "omitter") {
                    spec.mode = AgentMode::omitter;
                } else if (mode == "attentive") {
                    spec.mode = AgentMode::attentive;
                } else {
                    throw ConfigError("agents[" + std::to_string(idx) +
                                      "].mode: expected omitter or attentive");
                }
            }
            cfg.agents.push_back(spec);
        }
        // Unstated counterpart beliefs default to the other agent's true sigma.
        if (cfg.agents.size() == 2) {
            if (cfg.agents[0].counterpart_sigma == 0.0) {
                cfg.agents[0].counterpart_sigma = cfg.agents[1].sigma;
            }
            if (cfg.agents[1].counterpart_sigma == 0.0) {
                cfg.agents[1].counterpart_sigma = cfg.agents[0].sigma;
            }
        } else {
            for (AgentSpec& spec : cfg.agents) {
                if (spec.counterpart_sigma == 0.0) spec.counterpart_sigma = spec.sigma;
            }
        }
    } else {
        cfg.agents = default_agents(cfg.scenario);
    }

    if (j.contains("multipliers")) {
        cfg.multipliers.bid = j.at("multipliers").value("bid", 0.95);
        cfg.multipliers.ask = j.at("multipliers").value("ask", 1.05);
        if (!(cfg.multipliers.bid <= 1.0) || !(cfg.multipliers.ask >= 1.0)) {
            throw ConfigError("multipliers: need bid <= 1 <= ask");
        }
    }
    if (j.contains("paths")) {
        const auto p = j.at("paths").get<long long>();
        if (p < 0) throw ConfigError("paths: must be nonnegative");
        cfg.paths = static_cast<std::size_t>(p);
    }
    cfg.seed = j.value("seed", 42ULL);
    if (j.contains("threads")) {
        const auto t = j.at("threads").get<long long>();
        if (t < 1) throw ConfigError("threads: must be at least 1");
        cfg.threads = static_cast<unsigned>(t);
    }
    if (j.contains("fundamental")) {
        const json& f = j.at("fundamental");
        if (f.is_string()) {
            if (f.get<std::string>() != "prior") {
                throw ConfigError("fundamental: expected a number or the string 'prior'");
            }
            cfg.fundamental = std::nullopt;
        } else {
            cfg.fundamental = f.get<double>();
        }
    }
    cfg.rho = j.value("rho", 0.0);
    if (!(std::abs(cfg.rho) <= 1.0)) throw ConfigError("rho: must lie in [-1, 1]");

    if (cfg.scenario == Scenario::cara) {
        if (cfg.agents.size() != 2) throw ConfigError("agents: cara scenario is two-agent");
        for (std::size_t idx = 0; idx < cfg.agents.size(); ++idx) {
            if (!cfg.agents[idx].lambda || !(*cfg.agents[idx].lambda > 0.0)) {
                throw ConfigError("agents[" + std::to_string(idx) +
                                  "].lambda: cara scenario needs a positive aversion level");
            }
        }
        if (cfg.payoff.kind() != PayoffKind::gaussian) {
            throw ConfigError("payoff: cara scenario uses the gaussian model");
        }
    } else {
        for (const AgentSpec& spec : cfg.agents) {
            if (spec.lambda) {
                std::cerr << "warning: lambda is ignored outside the cara scenario\n";
                break;
            }
        }
    }
    if (cfg.agents.size() > 2) {
        for (const AgentSpec& spec : cfg.agents) {
            if (spec.mode.value_or(default_mode(cfg.scenario)) != AgentMode::omitter) {
                throw ConfigError("agents: more than two agents requires omitter mode");
            }
        }
        if (cfg.scenario != Scenario::omitter) {
            throw ConfigError("scenario: more than two agents requires the omitter scenario");
        }
    }
    if (cfg.intervals < 2) {
        throw ConfigError("intervals: need at least 2 so one auction precedes expiry");
    }
    return cfg;
}

double draw_fundamental(const PayoffModel& model, Rng& rng) {
    switch (model.kind()) {
        case PayoffKind::digital:
            return rng.uniform() < model.p1() ? model.x1() : model.x0();
        case PayoffKind::gaussian:
            return rng.gaussian();
        case PayoffKind::tabulated: {
            const auto& x = model.grid();
            const auto& d = model.density();
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                const double cell = 0.5 * (d[i] + d[i + 1]) * (x[i + 1] - x[i]);
                if (acc + cell >= u || i + 2 == x.size()) {
                    const double need = u - acc;
                    // piecewise-linear density: invert the quadratic CDF in the cell
                    const double dx = x[i + 1] - x[i];
                    const double slope = (d[i + 1] - d[i]) / dx;
                    if (std::abs(slope) < 1e-14) {
                        const double frac = d[i] > 0.0 ? need / (d[i] * dx) : 1.0;
                        return x[i] + std::min(1.0, frac) * dx;
                    }
                    const double disc = d[i] * d[i] + 2.0 * slope * need;
                    const double step = (std::sqrt(std::max(0.0, disc)) - d[i]) / slope;
                    return x[i] + std::clamp(step, 0.0, dx);
                }
                acc += cell;
            }
            return x.back();
        }
    }
    return 0.0;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

AggregateResult run_experiment(const ExperimentConfig& config) {
    const TimeGrid grid = make_grid(config.horizon, config.intervals);
    const Numeraire numeraire{config.rate, config.horizon};
    const std::size_t n = config.agents.size();
    const std::size_t auctions = config.intervals - 1;
    const std::size_t P = config.paths;

    AggregateResult result;
    result.paths = P;
    result.auction_times.assign(grid.times.begin() + 1, grid.times.end() - 1);
    result.mean_pnl.assign(n, std::vector<double>(auctions, 0.0));
    result.se_pnl.assign(n, std::vector<double>(auctions, 0.0));
    result.mean_truth_weight.assign(n, std::vector<double>(auctions, 0.0));
    result.trade_freq.assign(n, std::vector<double>(auctions, 0.0));
    result.total_pnl_mean.assign(n, 0.0);
    result.total_pnl_se.assign(n, 0.0);
    if (P == 0) {
        result.auction_times.clear();
        return result;
    }

    // Per-path slices written independently, reduced in fixed order afterwards.
    const std::size_t cells = auctions * n;
    std::vector<double> pnl(P * cells);
    std::vector<double> truth(P * cells);
    std::vector<double> traded(P * cells);

    AuctionOptions options;
    options.multipliers = config.multipliers;
    options.cara_clearing = config.scenario == Scenario::cara;

    const auto simulate_one = [&](std::size_t k) {
        const std::uint64_t path_seed = derive_seed(config.seed, k);
        double x;
        {
            Rng draw(derive_seed(path_seed, 0));
            x = config.fundamental ? *config.fundamental
                                   : draw_fundamental(config.payoff, draw);
        }

        std::vector<SignalPath> paths;
        paths.reserve(n);
        if (n == 2) {
            const BridgePair pair = sample_bridge_pair(grid, config.rho, derive_seed(path_seed, 1));
            paths.push_back(signal_path(pair.beta1, grid,
                                        SignalParams{config.agents[0].sigma, config.horizon}, x));
            paths.push_back(signal_path(pair.beta2, grid,
                                        SignalParams{config.agents[1].sigma, config.horizon}, x));
        } else {
            for (std::size_t jX = 0; jX < n; ++jX) {
                paths.push_back(
                    signal_path(sample_bridge(grid, derive_seed(path_seed, 1 + jX)), grid,
                                SignalParams{config.agents[jX].sigma, config.horizon}, x));
            }
        }

        std::vector<AgentState> agents(n);
        for (std::size_t jA = 0; jA < n; ++jA) {
            const AgentSpec& spec = config.agents[jA];
            AgentState& a = agents[jA];
            a.id = static_cast<int>(jA);
            a.mode = spec.mode.value_or(default_mode(config.scenario));
            a.params = SignalParams{spec.believed_sigma, config.horizon};
            a.belief_sigma_counterpart = spec.counterpart_sigma;
            a.lambda = config.scenario == Scenario::cara ? spec.lambda : std::nullopt;
            a.strategic = config.scenario == Scenario::strategic;
            a.info = EffectiveInfo{config.horizon, SignalObservation{0.0, 0.0, spec.believed_sigma},
                                   std::nullopt, config.rho};
        }

        const SimulationRecord rec =
            run_auction_sequence(std::move(agents), paths, config.payoff, numeraire, grid, options);

        double* pnl_row = pnl.data() + k * cells;
        double* truth_row = truth.data() + k * cells;
        double* traded_row = traded.data() + k * cells;
        for (std::size_t i = 0; i < auctions; ++i) {
            for (std::size_t jA = 0; jA < n; ++jA) {
                pnl_row[i * n + jA] = rec.settlement.trade_pnl[i][jA];
                truth_row[i * n + jA] = rec.weight_on_truth[jA][i];
                traded_row[i * n + jA] = rec.quantities[jA][i] != 0.0 ? 1.0 : 0.0;
            }
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, config.threads), P));
    if (workers <= 1) {
        for (std::size_t k = 0; k < P; ++k) simulate_one(k);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (P + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(P, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t k = lo; k < hi; ++k) simulate_one(k);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    // Fixed-order two-pass reduction: results are independent of the number
    // of workers above.
    const double dP = static_cast<double>(P);
    for (std::size_t i = 0; i < auctions; ++i) {
        for (std::size_t jA = 0; jA < n; ++jA) {
            double mean = 0.0, mean_truth = 0.0, freq = 0.0;
            for (std::size_t k = 0; k < P; ++k) {
                mean += pnl[k * cells + i * n + jA];
                mean_truth += truth[k * cells + i * n + jA];
                freq += traded[k * cells + i * n + jA];
            }
            mean /= dP;
            mean_truth /= dP;
            freq /= dP;
            double ss = 0.0;
            for (std::size_t k = 0; k < P; ++k) {
                const double d = pnl[k * cells + i * n + jA] - mean;
                ss += d * d;
            }
            result.mean_pnl[jA][i] = mean;
            result.se_pnl[jA][i] = P > 1 ? std::sqrt(ss / (dP * (dP - 1.0))) : 0.0;
            result.mean_truth_weight[jA][i] = mean_truth;
            result.trade_freq[jA][i] = freq;
        }
    }
    for (std::size_t jA = 0; jA < n; ++jA) {
        double mean = 0.0;
        std::vector<double> totals(P, 0.0);
        for (std::size_t k = 0; k < P; ++k) {
            double tot = 0.0;
            for (std::size_t i = 0; i < auctions; ++i) tot += pnl[k * cells + i * n + jA];
            totals[k] = tot;
            mean += tot;
        }
        mean /= dP;
        double ss = 0.0;
        for (std::size_t k = 0; k < P; ++k) {
            const double d = totals[k] - mean;
            ss += d * d;
        }
        result.total_pnl_mean[jA] = mean;
        result.total_pnl_se[jA] = P > 1 ? std::sqrt(ss / (dP * (dP - 1.0))) : 0.0;
    }
    return result;
}

void emit_csv(const AggregateResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    out << "auction_index,t,agent_id,mean_pnl,se_pnl,mean_posterior_truth,trade_freq\n";
    const std::size_t n = result.mean_pnl.size();
    for (std::size_t i = 0; i < result.auction_times.size(); ++i) {
        for (std::size_t jA = 0; jA < n; ++jA) {
            out << (i + 1) << ',' << format_double(result.auction_times[i]) << ',' << jA << ','
                << format_double(result.mean_pnl[jA][i]) << ','
                << format_double(result.se_pnl[jA][i]) << ','
                << format_double(result.mean_truth_weight[jA][i]) << ','
                << format_double(result.trade_freq[jA][i]) << '\n';
        }
    }
    if (!out) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

}  // namespace sigmkt
