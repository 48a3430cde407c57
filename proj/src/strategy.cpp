#include "sigmkt/strategy.hpp"

#include <cmath>
#include <stdexcept>

#include "sigmkt/quadrature.hpp"

namespace sigmkt {

namespace {

DecisionGrid empty_grid(const TimeGrid& grid) {
    DecisionGrid g;
    g.intervals = grid.intervals();
    if (g.intervals < 2) {
        throw std::invalid_argument("strategy: need at least two intervals");
    }
    g.value.resize(g.intervals);
    for (std::size_t t = 1; t < g.intervals; ++t) g.value[t].resize(t, 0.0);
    return g;
}

template <typename F>
DecisionGrid fill_grid(const TimeGrid& grid, F&& state_value) {
    DecisionGrid g = empty_grid(grid);
    for (std::size_t t = 1; t < g.intervals; ++t) {
        for (std::size_t s = 0; s < t; ++s) {
            g.value[t][s] = state_value(grid.times[t], grid.times[s]);
        }
    }
    return g;
}

}  // namespace

DecisionGrid h_surface(double sigma1, double sigma2, const TimeGrid& grid, double x, int agent) {
    if (!(x > 0.0)) {
        throw std::invalid_argument("h_surface: payoff level must be positive");
    }
    if (agent != 1 && agent != 2) {
        throw std::invalid_argument("h_surface: agent index must be 1 or 2");
    }
    return fill_grid(grid, [&](double t, double s) {
        const QualityInputs q{sigma1, sigma2, t, s, grid.horizon};
        const ABCoefficients ab = ab_coefficients(q);
        if (ab.a == 0.0) return 0.0;
        const double c = ab.a * x / ab.b;
        const double h2 = quad::norm_cdf(c) * truncated_mean_positive_part(ab.a * x, ab.b) -
                          quad::norm_cdf(-c) * truncated_mean_positive_part(-ab.a * x, ab.b);
        return agent == 2 ? h2 : -h2;
    });
}

DecisionGrid expected_profit_surface(double sigma1, double sigma2, const TimeGrid& grid,
                                     const GaussianHalfPosterior& posterior, int agent) {
    return fill_grid(grid, [&](double t, double s) {
        return expected_profit_gaussian(QualityInputs{sigma1, sigma2, t, s, grid.horizon},
                                        posterior, agent);
    });
}

double adjusted_gain(const DecisionGrid& gain, std::size_t t, std::size_t s) {
    if (t < gain.first_auction() || t >= gain.last_auction()) {
        throw std::invalid_argument("adjusted_gain: no continuation auction after t");
    }
    if (s >= t) throw std::invalid_argument("adjusted_gain: requires s < t");
    return gain.at(t, s) - (gain.at(t + 1, s) - gain.at(t + 1, t));
}

Action decide(const DecisionGrid& gain, std::size_t t, std::size_t s) {
    if (t < gain.first_auction() || t > gain.last_auction() || s >= t) {
        throw std::invalid_argument("decide: state outside the grid");
    }
    const double immediate = gain.at(t, s);
    if (!(immediate > 0.0)) return Action::skip;
    if (t == gain.last_auction()) return Action::trade;
    return immediate + gain.at(t + 1, t) > gain.at(t + 1, s) ? Action::trade : Action::skip;
}

ValueGrid value_recursion(const DecisionGrid& gain) {
    const std::size_t m = gain.intervals;
    ValueGrid vg;
    vg.v.resize(m + 1);
    vg.policy.resize(m + 1);
    vg.v[m].assign(m, 0.0);  // terminal: no auction at t_m
    vg.policy[m].assign(m, Action::skip);
    for (std::size_t t = m - 1; t >= 1; --t) {
        vg.v[t].resize(t);
        vg.policy[t].resize(t);
        for (std::size_t s = 0; s < t; ++s) {
            const double keep = t + 1 <= m - 1 ? vg.v[t + 1][s] : 0.0;
            const double swap = gain.at(t, s) + (t + 1 <= m - 1 ? vg.v[t + 1][t] : 0.0);
            if (swap > keep) {
                vg.v[t][s] = swap;
                vg.policy[t][s] = Action::trade;
            } else {
                vg.v[t][s] = keep;
                vg.policy[t][s] = Action::skip;
            }
        }
        if (t == 1) break;
    }
    return vg;
}

StrategyTrace run_realtime_policy(const DecisionGrid& gain) {
    StrategyTrace trace;
    std::size_t s = 0;
    for (std::size_t t = gain.first_auction(); t <= gain.last_auction(); ++t) {
        trace.last_trade.push_back(s);
        const Action a = decide(gain, t, s);
        trace.actions.push_back(a);
        if (a == Action::trade) {
            trace.total_gain += gain.at(t, s);
            s = t;
        }
    }
    return trace;
}

double sharpe_objective(const std::vector<int>& trades, const std::vector<double>& expected,
                        const std::vector<double>& variance) {
    if (trades.size() != expected.size() || trades.size() != variance.size()) {
        throw std::invalid_argument("sharpe_objective: mismatched schedule lengths");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
        num += trades[i] * expected[i];
        den += static_cast<double>(trades[i]) * trades[i] * variance[i];
    }
    if (!(den > 0.0)) {
        throw std::domain_error("sharpe_objective: undefined for an all-skip schedule");
    }
    return num / std::sqrt(den);
}

}  // namespace sigmkt
