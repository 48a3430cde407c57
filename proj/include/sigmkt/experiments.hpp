#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmkt/market.hpp"

namespace sigmkt {

enum class Scenario { omitter, attentive, strategic, cara };

struct AgentSpec {
    double sigma = 1.0;               // true generating signal-to-noise
    double believed_sigma = 1.0;      // sigma the agent prices with
    double counterpart_sigma = 1.0;   // sigma attributed to the other side
    std::optional<AgentMode> mode;    // overrides the scenario default
    std::optional<double> lambda;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::omitter;
    double horizon = 1.0;
    std::size_t intervals = 10;
    double rate = 0.05;
    PayoffModel payoff = PayoffModel::digital(0.0, 1.0, 0.5, 0.5);
    std::vector<AgentSpec> agents;
    Multipliers multipliers{0.95, 1.05};
    std::size_t paths = 1000;
    std::uint64_t seed = 42;
    unsigned threads = 1;
    std::optional<double> fundamental = 1.0;  // nullopt: draw from the prior per path
    double rho = 0.0;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse + validate; messages name the offending field. Warnings (e.g. lambda
/// outside the cara scenario) go to stderr.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

/// Cross-path aggregates per auction and agent.
struct AggregateResult {
    std::vector<double> auction_times;                   // t_1 .. t_{m-1}
    std::vector<std::vector<double>> mean_pnl;           // [agent][auction]
    std::vector<std::vector<double>> se_pnl;             // [agent][auction]
    std::vector<std::vector<double>> mean_truth_weight;  // [agent][auction]
    std::vector<std::vector<double>> trade_freq;         // [agent][auction]
    std::vector<double> total_pnl_mean;                  // per agent
    std::vector<double> total_pnl_se;                    // per agent
    std::size_t paths = 0;

    bool operator==(const AggregateResult&) const = default;
};

/// Path-parallel Monte Carlo over independent simulations. Per-path seeds are
/// derived from the master seed, and reduction order is fixed, so the result
/// is bit-identical for any thread count.
AggregateResult run_experiment(const ExperimentConfig& config);

/// One header row, then auction_index,t,agent_id,mean_pnl,se_pnl,
/// mean_posterior_truth,trade_freq with round-trip decimal formatting.
void emit_csv(const AggregateResult& result, const std::string& path);

}  // namespace sigmkt
