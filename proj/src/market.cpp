#include "sigmkt/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigmkt/analytics.hpp"
#include "sigmkt/quadrature.hpp"

namespace sigmkt {

namespace {

/// Expected profit of `agent` at (t, s) under his own beliefs, from the
/// closed-form decomposition; drives the strategic quote gate.
double believed_expected_profit(const PayoffModel& model, const AgentState& agent, double t,
                                double s, double horizon) {
    const QualityInputs q{agent.params.sigma, agent.belief_sigma_counterpart, t, s, horizon};
    switch (model.kind()) {
        case PayoffKind::gaussian: {
            const GaussianPosterior gp = gaussian_posterior(agent.info);
            return expected_profit_gaussian(q, GaussianHalfPosterior{gp.mean, gp.variance}, 1);
        }
        case PayoffKind::digital: {
            const PosteriorTable table = posterior(model, agent.info);
            return expected_profit_digital(q, model, table.weight[1], 1);
        }
        case PayoffKind::tabulated:
            throw std::invalid_argument(
                "run_auction_sequence: strategic gating needs a digital or gaussian payoff");
    }
    return 0.0;
}

bool strategic_wants_to_quote(const PayoffModel& model, const AgentState& agent,
                              const TimeGrid& grid, std::size_t auction_index) {
    const double t = grid.times[auction_index];
    const double s = agent.info.counterpart ? agent.info.counterpart->t : 0.0;
    const double immediate = believed_expected_profit(model, agent, t, s, grid.horizon);
    if (!(immediate > 0.0)) return false;
    if (auction_index == grid.intervals() - 1) return true;
    const double t_next = grid.times[auction_index + 1];
    const double if_skip = believed_expected_profit(model, agent, t_next, s, grid.horizon);
    const double if_trade = believed_expected_profit(model, agent, t_next, t, grid.horizon);
    return immediate + if_trade > if_skip;
}

double truth_weight(const PayoffModel& model, const EffectiveInfo& info, double x) {
    const PosteriorTable table = posterior(model, info);
    if (model.kind() == PayoffKind::digital) {
        const bool high = std::abs(x - model.x1()) < std::abs(x - model.x0());
        return high ? table.weight[1] : table.weight[0];
    }
    const double prior = model.kind() == PayoffKind::gaussian
                             ? quad::norm_pdf(x)
                             : [&] {
                                   PosteriorTable flat;
                                   flat.continuous = true;
                                   flat.x = model.grid();
                                   flat.weight = model.density();
                                   return flat.density_at(x);
                               }();
    if (!(prior > 0.0)) return 0.0;
    return table.density_at(x) / prior;
}

}  // namespace

Quote quote(const AgentState& agent, double t, const PayoffModel& model,
            const Numeraire& numeraire, const Multipliers& multipliers, bool cara) {
    if (agent.info.own.t != t) {
        throw std::logic_error("quote: effective information is stale");
    }
    Quote q;
    q.agent = agent.id;
    q.underlying = price(model, agent.info, numeraire);
    if (cara) {
        if (!agent.lambda) {
            throw std::invalid_argument("quote: cara clearing needs an aversion level");
        }
        const QuotePair pair = cara_quotes(agent.info, *agent.lambda, numeraire);
        q.bid = pair.bid;
        q.ask = pair.ask;
    } else {
        q.bid = multipliers.bid * q.underlying;
        q.ask = multipliers.ask * q.underlying;
    }
    return q;
}

std::optional<Clearing> match_and_clear(const Quote& a, const Quote& b) {
    const double depth_ab = a.bid - b.ask;  // a lifts b
    const double depth_ba = b.bid - a.ask;
    if (depth_ab < 0.0 && depth_ba < 0.0) return std::nullopt;

    const Quote* bid_side = &a;
    const Quote* ask_side = &b;
    if (depth_ba > depth_ab ||
        (depth_ba == depth_ab && b.underlying > a.underlying)) {
        bid_side = &b;
        ask_side = &a;
    }
    Clearing clearing;
    clearing.price = 0.5 * (bid_side->bid + ask_side->ask);

    // Trade direction follows the signal prices relative to the cleared
    // price; with exactly matching prices the quantity is zero and only the
    // price is discovered.
    if (bid_side->underlying > clearing.price && ask_side->underlying < clearing.price) {
        clearing.buyer = bid_side->agent;
        clearing.seller = ask_side->agent;
    } else if (bid_side->underlying < clearing.price && ask_side->underlying > clearing.price) {
        clearing.buyer = ask_side->agent;
        clearing.seller = bid_side->agent;
    }
    return clearing;
}

std::optional<Clearing> match_and_clear_cara(const Quote& a, const Quote& b, double lambda_a,
                                             double lambda_b) {
    const Quote* buyer = nullptr;
    const Quote* seller = nullptr;
    double lambda_buyer = 0.0, lambda_seller = 0.0;
    if (a.bid >= b.ask) {
        buyer = &a;
        seller = &b;
        lambda_buyer = lambda_a;
        lambda_seller = lambda_b;
    } else if (b.bid >= a.ask) {
        buyer = &b;
        seller = &a;
        lambda_buyer = lambda_b;
        lambda_seller = lambda_a;
    } else {
        return std::nullopt;
    }
    Clearing clearing;
    clearing.price =
        cara_clearing_price(seller->ask, buyer->bid, lambda_seller, lambda_buyer);
    clearing.buyer = buyer->agent;
    clearing.seller = seller->agent;
    return clearing;
}

SettlementReport settle(const TradeLedger& ledger, double x, const PayoffModel& model) {
    SettlementReport report;
    report.high_market = x > model.prior_mean();
    const std::size_t n = ledger.holdings.size();
    report.total.assign(n, 0.0);
    report.trade_pnl.reserve(ledger.auctions.size());
    for (const AuctionRecord& rec : ledger.auctions) {
        std::vector<double> pnl(n, 0.0);
        if (rec.traded) {
            const double gain = x - rec.clearing;
            for (std::size_t j = 0; j < n; ++j) {
                if (rec.quantity[j] > 0.0) {
                    pnl[j] = gain;
                } else if (rec.quantity[j] < 0.0) {
                    pnl[j] = -gain;  // exact negation keeps the books zero-sum
                }
                report.total[j] += pnl[j];
            }
        }
        report.trade_pnl.push_back(std::move(pnl));
    }
    return report;
}

SimulationRecord run_auction_sequence(std::vector<AgentState> agents,
                                      const std::vector<SignalPath>& paths,
                                      const PayoffModel& model, const Numeraire& numeraire,
                                      const TimeGrid& grid, const AuctionOptions& options) {
    const std::size_t n = agents.size();
    const std::size_t m = grid.intervals();
    if (n < 2) throw std::invalid_argument("run_auction_sequence: need at least two agents");
    if (paths.size() != n) {
        throw std::invalid_argument("run_auction_sequence: one signal path per agent required");
    }
    for (const SignalPath& p : paths) {
        if (p.xi.size() != grid.times.size()) {
            throw std::invalid_argument("run_auction_sequence: path/grid length mismatch");
        }
        if (p.fundamental != paths[0].fundamental) {
            throw std::invalid_argument("run_auction_sequence: fundamentals differ across paths");
        }
    }
    if (options.cara_clearing) {
        if (n != 2) throw std::invalid_argument("run_auction_sequence: cara mode is two-agent");
        for (const AgentState& a : agents) {
            if (!a.lambda) {
                throw std::invalid_argument("run_auction_sequence: cara mode needs lambdas");
            }
            if (a.strategic) {
                throw std::invalid_argument("run_auction_sequence: cara agents are not gated");
            }
        }
    }
    if (n > 2) {
        for (const AgentState& a : agents) {
            if (a.mode != AgentMode::omitter) {
                throw std::invalid_argument(
                    "run_auction_sequence: more than two agents only in omitter mode");
            }
        }
    }

    const double x_true = paths[0].fundamental;
    const std::size_t auctions = m - 1;

    SimulationRecord rec;
    rec.grid = grid;
    rec.fundamental = x_true;
    rec.prices.assign(n, std::vector<double>(auctions, 0.0));
    rec.quantities.assign(n, std::vector<double>(auctions, 0.0));
    rec.weight_on_truth.assign(n, std::vector<double>(auctions, 0.0));
    rec.ledger.holdings.assign(n, 0.0);

    for (std::size_t j = 0; j < n; ++j) {
        agents[j].info.horizon = grid.horizon;
        agents[j].info.own = SignalObservation{0.0, 0.0, agents[j].params.sigma};
    }

    std::size_t last_trade_index = 0;  // grid index of the last executed trade

    for (std::size_t i = 1; i < m; ++i) {
        const double t = grid.times[i];
        for (std::size_t j = 0; j < n; ++j) {
            agents[j].info.own = SignalObservation{t, paths[j].xi[i], agents[j].params.sigma};
        }

        std::vector<Quote> quotes(n);
        std::vector<bool> active(n, true);
        for (std::size_t j = 0; j < n; ++j) {
            if (agents[j].strategic && !strategic_wants_to_quote(model, agents[j], grid, i)) {
                active[j] = false;
            }
            quotes[j] =
                quote(agents[j], t, model, numeraire, options.multipliers, options.cara_clearing);
            rec.prices[j][i - 1] = quotes[j].underlying;
            rec.weight_on_truth[j][i - 1] = truth_weight(model, agents[j].info, x_true);
        }

        std::optional<Clearing> clearing;
        std::size_t pick_a = 0, pick_b = 1;
        if (options.cara_clearing) {
            if (active[0] && active[1]) {
                clearing = match_and_clear_cara(quotes[0], quotes[1], *agents[0].lambda,
                                                *agents[1].lambda);
            }
        } else {
            double best_depth = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (!active[j] || !active[k]) continue;
                    const double depth =
                        std::max(quotes[j].bid - quotes[k].ask, quotes[k].bid - quotes[j].ask);
                    if (depth >= 0.0 && depth > best_depth) {
                        best_depth = depth;
                        pick_a = j;
                        pick_b = k;
                    }
                }
            }
            if (best_depth >= 0.0) {
                clearing = match_and_clear(quotes[pick_a], quotes[pick_b]);
            }
        }

        AuctionRecord auction;
        auction.index = i;
        auction.t = t;
        auction.quantity.assign(n, 0.0);
        auction.s_before = rec.ledger.last_trade_time;

        if (clearing) {
            auction.clearing = clearing->price;
            if (clearing->has_direction()) {
                auction.traded = true;
                const std::size_t buyer = static_cast<std::size_t>(clearing->buyer);
                const std::size_t seller = static_cast<std::size_t>(clearing->seller);
                auction.quantity[buyer] = 1.0;
                auction.quantity[seller] = -1.0;
                rec.ledger.holdings[buyer] += 1.0;
                rec.ledger.holdings[seller] -= 1.0;
                rec.quantities[buyer][i - 1] = 1.0;
                rec.quantities[seller][i - 1] = -1.0;

                // Mutual inference: each attentive party backs the
                // counterpart's signal out of the revealed price, using the
                // sigma he attributes to that channel and whatever the
                // counterpart already knew about his own signal.
                const std::size_t parties[2] = {buyer, seller};
                for (int side = 0; side < 2; ++side) {
                    const std::size_t self = parties[side];
                    const std::size_t other = parties[1 - side];
                    if (agents[self].mode != AgentMode::attentive) continue;

                    EffectiveInfo probe;
                    probe.horizon = grid.horizon;
                    probe.rho = agents[self].info.rho;
                    probe.own = SignalObservation{t, 0.0, agents[self].belief_sigma_counterpart};
                    if (agents[other].mode == AgentMode::attentive && last_trade_index > 0) {
                        probe.counterpart = SignalObservation{
                            grid.times[last_trade_index], paths[self].xi[last_trade_index],
                            agents[other].belief_sigma_counterpart};
                    }
                    const double recovered = invert_price_to_signal(
                        model, probe, numeraire, quotes[other].underlying);
                    agents[self].info.counterpart = SignalObservation{
                        t, recovered, agents[self].belief_sigma_counterpart};
                }

                rec.ledger.last_trade_time = t;
                last_trade_index = i;
            }
        }
        auction.s_after = rec.ledger.last_trade_time;
        rec.ledger.auctions.push_back(std::move(auction));
    }

    rec.settlement = settle(rec.ledger, x_true, model);
    return rec;
}

}  // namespace sigmkt
