#pragma once

#include <cstddef>
#include <vector>

#include "sigmkt/analytics.hpp"
#include "sigmkt/grid.hpp"

namespace sigmkt {

/**
 * Per-state values on the (auction index t, last-trade index s) state space,
 * t = 1..m-1, s = 0..t-1 (s = 0 means no trade yet). value[t] has t entries.
 */
struct DecisionGrid {
    std::size_t intervals = 0;  // m
    std::vector<std::vector<double>> value;

    double at(std::size_t t, std::size_t s) const { return value[t][s]; }
    std::size_t first_auction() const { return 1; }
    std::size_t last_auction() const { return intervals - 1; }
};

/// Signal-independent expected-profit surface H(t, s) for the Gaussian
/// dividend at a fixed payoff level x > 0. The low-market analogue L equals H
/// pointwise at fixed |x|, so any posterior-mass mixture of the two
/// coincides with H; the recursion and decision rule run on this surface.
DecisionGrid h_surface(double sigma1, double sigma2, const TimeGrid& grid, double x, int agent);

/// Expected profit integrated against an effective posterior, per state.
DecisionGrid expected_profit_surface(double sigma1, double sigma2, const TimeGrid& grid,
                                     const GaussianHalfPosterior& posterior, int agent);

/// Immediate gain adjusted for the cost of losing the informational edge:
///   G(t, s) - [G(t+1, s) - G(t+1, t)].
/// Throws std::invalid_argument at the final auction (no continuation).
double adjusted_gain(const DecisionGrid& gain, std::size_t t, std::size_t s);

enum class Action { skip, trade };

/// Real-time rule: trade iff G(t,s) > 0 and G(t,s) + G(t+1,t) > G(t+1,s);
/// the final auction uses only the first condition. Ties resolve to skip.
Action decide(const DecisionGrid& gain, std::size_t t, std::size_t s);

struct ValueGrid {
    std::vector<std::vector<double>> v;        // [t][s], t = 1..m-1 plus terminal row
    std::vector<std::vector<Action>> policy;   // argmax per state, tie -> skip

    double root() const { return v[1][0]; }
};

/// Backward recursion V(t,s) = max(V(t+1,s), G(t,s) + V(t+1,t)), V(m,.) = 0.
ValueGrid value_recursion(const DecisionGrid& gain);

struct StrategyTrace {
    std::vector<Action> actions;          // per auction 1..m-1
    std::vector<std::size_t> last_trade;  // s index in force at each auction
    double total_gain = 0.0;
};

/// Applies the real-time rule forward along the grid.
StrategyTrace run_realtime_policy(const DecisionGrid& gain);

/// Portfolio Sharpe objective sum(q E) / sqrt(sum(q^2 V)) over a trade
/// schedule. Throws std::domain_error when no trade is scheduled.
double sharpe_objective(const std::vector<int>& trades, const std::vector<double>& expected,
                        const std::vector<double>& variance);

}  // namespace sigmkt
