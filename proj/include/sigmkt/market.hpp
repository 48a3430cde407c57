#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "sigmkt/bridge.hpp"
#include "sigmkt/info.hpp"
#include "sigmkt/payoff.hpp"
#include "sigmkt/pricing.hpp"

namespace sigmkt {

enum class AgentMode { omitter, attentive };

/// Constant bid/ask multipliers, bid <= 1 <= ask.
struct Multipliers {
    double bid = 1.0;
    double ask = 1.0;
};

struct AgentState {
    int id = 0;
    AgentMode mode = AgentMode::omitter;
    SignalParams params;                    // believed own channel
    double belief_sigma_counterpart = 1.0;  // sigma attributed to the other side
    std::optional<double> lambda;           // CARA aversion (cara clearing only)
    bool strategic = false;                 // gate quotes by the real-time trade rule
    EffectiveInfo info;
};

struct Quote {
    int agent = -1;
    double bid = 0.0;
    double ask = 0.0;
    double underlying = 0.0;  // S_t^j before multipliers
};

/// Signal-based quote at time t. Risk-neutral agents scale the signal-implied
/// price by the multipliers; CARA agents quote certainty-equivalent bid/ask
/// (multipliers forced to 1). Throws std::logic_error if info is stale.
Quote quote(const AgentState& agent, double t, const PayoffModel& model,
            const Numeraire& numeraire, const Multipliers& multipliers, bool cara);

/// Outcome of one matching attempt. A crossed pair clears at the mid-price
/// (risk-neutral) or the lambda-weighted price (CARA). buyer/seller are -1
/// when quotes match exactly and the cleared quantity is zero.
struct Clearing {
    double price = 0.0;
    int buyer = -1;
    int seller = -1;

    bool has_direction() const { return buyer >= 0; }
};

std::optional<Clearing> match_and_clear(const Quote& a, const Quote& b);
std::optional<Clearing> match_and_clear_cara(const Quote& a, const Quote& b, double lambda_a,
                                             double lambda_b);

struct AuctionRecord {
    std::size_t index = 0;  // grid index of the auction time
    double t = 0.0;
    double clearing = std::numeric_limits<double>::quiet_NaN();
    bool traded = false;
    std::vector<double> quantity;  // per agent, sums to zero
    double s_before = 0.0;
    double s_after = 0.0;
};

struct TradeLedger {
    std::vector<AuctionRecord> auctions;
    std::vector<double> holdings;  // theta per agent, sums to zero
    double last_trade_time = 0.0;  // s_t
};

struct SettlementReport {
    std::vector<std::vector<double>> trade_pnl;  // [auction][agent]
    std::vector<double> total;                   // per agent
    bool high_market = false;                    // x above the prior reference price
};

/// Ex-post P&L q (X - S*) per trade and per agent; zero-sum bit-exactly.
SettlementReport settle(const TradeLedger& ledger, double x, const PayoffModel& model);

struct SimulationRecord {
    TimeGrid grid;
    std::vector<std::vector<double>> prices;           // [agent][auction] S_t^j
    std::vector<std::vector<double>> quantities;       // [agent][auction]
    std::vector<std::vector<double>> weight_on_truth;  // [agent][auction]
    TradeLedger ledger;
    SettlementReport settlement;
    double fundamental = 0.0;
};

struct AuctionOptions {
    Multipliers multipliers;
    bool cara_clearing = false;
};

/**
 * Sequential-auction loop over t_1 .. t_{m-1}. Omitters never update
 * counterpart information; attentive agents invert the counterpart's revealed
 * price after each executed trade and extend their effective information.
 * With more than two agents (omitter mode only) the deepest crossed pair
 * trades each auction. Strategic agents withhold quotes when the real-time
 * cost-adjusted gain rule says skip.
 */
SimulationRecord run_auction_sequence(std::vector<AgentState> agents,
                                      const std::vector<SignalPath>& paths,
                                      const PayoffModel& model, const Numeraire& numeraire,
                                      const TimeGrid& grid, const AuctionOptions& options);

}  // namespace sigmkt
