#pragma once

#include <cstddef>
#include <vector>

#include "sigmkt/payoff.hpp"

namespace sigmkt {

/// Inputs of the ex-ante quality/profit formulas: current time t, last trade
/// time s < t, the two signal-to-noise levels and the horizon. All quantities
/// in this module are undiscounted and assume independent signal noises.
struct QualityInputs {
    double sigma1 = 0.5;
    double sigma2 = 1.5;
    double t = 0.5;
    double s = 0.0;
    double horizon = 1.0;
};

/// Coefficients of the half price differential for the Gaussian dividend:
/// (S^2(x) - S^1(x)) / 2 given (x, s) is N(a x, b^2). a > 0 iff sigma2 > sigma1.
struct ABCoefficients {
    double a = 0.0;
    double b = 0.0;
};

ABCoefficients ab_coefficients(const QualityInputs& q);

/// Probability that the agent's digital-dividend price lands on the correct
/// side of the clearing price. Independent of the realized signal values.
/// payoff_spread is x1 - x0. Agent 2's value is the exact complement.
double p_correct_digital(const QualityInputs& q, double payoff_spread, int agent);

/// Effective posterior N(mu, var) split at zero into high/low market halves.
struct GaussianHalfPosterior {
    double mu = 0.0;
    double var = 1.0;

    double sd() const;
    double mass_plus() const;
    double mass_minus() const;
};

/// Integral of Theta(-(a/b)x) against the normalized high half posterior; the
/// low-half route returns the same value by the change-of-variables identity.
double p_correct_gaussian(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                          int agent);

/// Same probability computed through the low-market half.
double p_correct_gaussian_low(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                              int agent);

/// E[(Y)^+] for Y ~ N(mean, sd^2): mean * Theta(mean/sd) + sd * phi(mean/sd).
double truncated_mean_positive_part(double mean, double sd);

/// E[(Y^+)^2] for Y ~ N(mean, sd^2).
double truncated_second_moment_positive_part(double mean, double sd);

/// Expected mid transaction prices around the agent's own price, by market
/// type and signal correctness; the differential statistics do not depend on
/// the agent's current signal value.
struct TransactionPrices {
    double high_correct = 0.0;
    double high_erroneous = 0.0;
    double low_correct = 0.0;
    double low_erroneous = 0.0;
};

TransactionPrices expected_transaction_prices(const QualityInputs& q, double x, double own_price);

/// Signal-based expected profit of the agent at (t, s) for the Gaussian
/// dividend: half-support integrals of the direction-weighted positive-part
/// kernels against the effective posterior. Positive for the superior agent,
/// negative for the inferior one.
double expected_profit_gaussian(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                                int agent);

/// Conditional variance of the same per-trade profit: second-moment kernels
/// minus the squared expectation; clamped at zero (tiny negative values only).
double profit_variance_gaussian(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                                int agent);

/// Clearing-price statistics for the digital dividend with the payoff pinned
/// to one of its two states, computed by Gaussian quadrature over the joint
/// law of the two price signals.
struct DigitalClearingStats {
    double p_correct = 0.0;
    double clearing_given_correct = 0.0;    // E[S* | correct side]
    double clearing_given_erroneous = 0.0;  // E[S* | wrong side]
};

DigitalClearingStats digital_clearing_stats(const QualityInputs& q, const PayoffModel& model,
                                            int state, int agent);

/// Digital-dividend expected profit with posterior mass weight_high on x1.
double expected_profit_digital(const QualityInputs& q, const PayoffModel& model,
                               double weight_high, int agent);

/// Sum of per-auction expected profits over the remaining schedule, holding
/// the current posterior fixed. stages[k] carries (t_u, s_u) for auction u.
double profit_to_go_gaussian(const std::vector<QualityInputs>& stages,
                             const GaussianHalfPosterior& posterior, int agent);

double profit_to_go_digital(const std::vector<QualityInputs>& stages, const PayoffModel& model,
                            double weight_high, int agent);

}  // namespace sigmkt
