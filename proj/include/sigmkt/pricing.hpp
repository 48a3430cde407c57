#pragma once

#include <vector>

#include "sigmkt/bridge.hpp"
#include "sigmkt/info.hpp"
#include "sigmkt/payoff.hpp"

namespace sigmkt {

/// kappa_t * (sigma xi x - 1/2 sigma^2 x^2 t); the x-dependent part of the
/// bridge log likelihood. Throws std::domain_error at t >= T.
double log_likelihood_exponent(double t, double sigma, double xi, double x, double horizon);

/// rho_hat = rho sqrt((s/t) (kappa_s/kappa_t)): correlation between the own
/// signal at t and the counterpart signal at s <= t, conditional on the payoff.
/// Weakly decreasing in t for fixed s. Throws std::invalid_argument on s > t.
double conditional_corr(double t, double s, double horizon, double rho);

/// Full log density of xi_t given x for one channel: N(sigma t x, t/kappa_t).
double univariate_log_likelihood(double t, double sigma, double xi, double x, double horizon);

/// Full log density of (own xi_t, counterpart xi_s) given x, with conditional
/// correlation rho_hat. Requires s > 0 and |rho_hat| < 1.
double bivariate_log_likelihood(const SignalObservation& own, const SignalObservation& counterpart,
                                double rho_hat, double x, double horizon);

/// Effective log likelihood: joint when counterpart information is present
/// (s > 0), otherwise the univariate one. At rho_hat = 0 the joint form equals
/// the product of the univariate densities; at s = 0 a counterpart observation
/// carries no information and the own-signal density is returned.
double signal_log_likelihood(const EffectiveInfo& info, double x);

/// Posterior over the payoff support for digital/tabulated models.
/// weight: probability mass (digital) or density values (tabulated), normalized.
struct PosteriorTable {
    std::vector<double> x;
    std::vector<double> weight;
    bool continuous = false;

    double mean() const;
    double mass_above(double level) const;
    double density_at(double x_eval) const;  // continuous models only
};

PosteriorTable posterior(const PayoffModel& model, const EffectiveInfo& info);

struct GaussianPosterior {
    double mean = 0.0;
    double variance = 1.0;
};

/// Closed-form posterior for the standard-normal prior, valid for any rho_hat.
GaussianPosterior gaussian_posterior(const EffectiveInfo& info);

/// Discounted posterior mean of X. Gaussian models use the closed form;
/// digital/tabulated integrate the posterior. Throws std::domain_error at t >= T.
double price(const PayoffModel& model, const EffectiveInfo& info, const Numeraire& numeraire);

/// Independent quadrature route: Laplace-recentered 200-node Gauss-Hermite
/// for continuous priors, exact two-term sum for digital. Cross-check only.
double price_by_quadrature(const PayoffModel& model, const EffectiveInfo& info,
                           const Numeraire& numeraire);

/// Discretized innovation increments
///   dW_i = kappa_{t_i} (xi_i / T - sigma E[X|xi_i]) dt_i + (xi_{i+1} - xi_i),
/// i = 0..m-2. Under the agent's filtration W behaves as standard Brownian
/// motion; tests check Var[dW_i] = dt and vanishing cross-correlation.
std::vector<double> innovation_increments(const SignalPath& path, const PayoffModel& model,
                                          const TimeGrid& grid);

struct QuotePair {
    double bid = 0.0;
    double ask = 0.0;
};

/**
 * CARA certainty-equivalent quotes for the Gaussian-prior model:
 *   bid = delta^{-1} (M - premium), ask = delta^{-1} (M + premium),
 * with M the posterior mean and premium = lambda / (2 * posterior precision).
 * At s = 0 the precision is sigma^2 kappa_t t + 1; with counterpart
 * information the posterior precision generalizes it (the certainty
 * equivalent of N(m, v) under exponential utility is m -+ lambda v / 2, so the
 * formula stays exact). Throws std::invalid_argument on lambda <= 0.
 */
QuotePair cara_quotes(const EffectiveInfo& info, double lambda, const Numeraire& numeraire);

/// Risk-averse clearing price: (lambda1 S1 + lambda2 S2) / (lambda1 + lambda2),
/// with S1 the seller-side ask quote and S2 the buyer-side bid quote.
double cara_clearing_price(double seller_ask, double buyer_bid, double lambda_seller,
                           double lambda_buyer);

/// Log-domain residual of the utility-equalization condition at a candidate
/// clearing price (seller short one contract, buyer long one). Zero at the
/// lambda-weighted price.
double cara_equalization_residual(double clearing, const EffectiveInfo& seller,
                                  double lambda_seller, const EffectiveInfo& buyer,
                                  double lambda_buyer);

/// Recover the signal value consistent with an observed (discounted) price.
/// info.own.xi is ignored; the price map is strictly increasing in xi for
/// fixed (t, sigma), linear for the Gaussian model, bisected to ~1e-12
/// otherwise. Throws std::domain_error if the price is outside the payoff range.
double invert_price_to_signal(const PayoffModel& model, const EffectiveInfo& info,
                              const Numeraire& numeraire, double target_price);

}  // namespace sigmkt
