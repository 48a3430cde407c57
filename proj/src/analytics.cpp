#include "sigmkt/analytics.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sigmkt/grid.hpp"
#include "sigmkt/quadrature.hpp"

namespace sigmkt {

namespace {

constexpr std::size_t kHalfLineNodes = 200;
constexpr std::size_t kClearingNodes = 96;

struct TimeFactors {
    double kt, ks, tkt, sks;
};

TimeFactors time_factors(const QualityInputs& q) {
    if (!(q.s >= 0.0) || !(q.s < q.t)) {
        throw std::invalid_argument("analytics: requires 0 <= s < t");
    }
    const double kt = kappa(q.t, q.horizon);
    const double ks = q.s > 0.0 ? kappa(q.s, q.horizon) : 1.0;
    return TimeFactors{kt, ks, q.t * kt, q.s * ks};
}

void check_agent(int agent) {
    if (agent != 1 && agent != 2) {
        throw std::invalid_argument("analytics: agent index must be 1 or 2");
    }
}

/// sum_i f(x_i) w_i over (0, upper] with the tanh-rescaled rule.
template <typename F>
double half_line_integral(double upper, F&& f) {
    const quad::Rule rule = quad::half_line_rule(upper, kHalfLineNodes);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
        acc += rule.weight[i] * f(rule.node[i]);
    }
    return acc;
}

/// Direction-weighted positive-part kernel of the expected-profit integrand
/// for agent 1 at payoff level x > 0 (even in x; agent 2 is the negation).
double profit_integrand_agent1(double x, const ABCoefficients& ab) {
    const double c = ab.a * x / ab.b;
    return quad::norm_cdf(-c) * truncated_mean_positive_part(-ab.a * x, ab.b) -
           quad::norm_cdf(c) * truncated_mean_positive_part(ab.a * x, ab.b);
}

/// Second moment of the same decomposition; agent-independent and even in x.
double second_moment_integrand(double x, const ABCoefficients& ab) {
    const double c = ab.a * x / ab.b;
    return quad::norm_cdf(-c) * truncated_second_moment_positive_part(-ab.a * x, ab.b) +
           quad::norm_cdf(c) * truncated_second_moment_positive_part(ab.a * x, ab.b);
}

double posterior_density(const GaussianHalfPosterior& p, double x) {
    const double sd = p.sd();
    return quad::norm_pdf((x - p.mu) / sd) / sd;
}

struct StatsKey {
    std::array<std::uint64_t, 8> doubles;
    int state;
    int agent;

    bool operator<(const StatsKey& other) const {
        if (doubles != other.doubles) return doubles < other.doubles;
        if (state != other.state) return state < other.state;
        return agent < other.agent;
    }
};

std::uint64_t bits(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof(u));
    return u;
}

}  // namespace

ABCoefficients ab_coefficients(const QualityInputs& q) {
    const TimeFactors f = time_factors(q);
    const double s1 = q.sigma1, s2 = q.sigma2;
    const double d1 = s1 * s1 * f.tkt + s2 * s2 * f.sks + 1.0;
    const double d2 = s2 * s2 * f.tkt + s1 * s1 * f.sks + 1.0;

    ABCoefficients ab;
    ab.a = 0.5 * (s2 * s2 * f.tkt / d2 - s2 * s2 * f.sks / d1) -
           0.5 * (s1 * s1 * f.tkt / d1 - s1 * s1 * f.sks / d2);

    const double vt = q.t / f.kt;  // Var beta_t
    const double vs = q.s > 0.0 ? q.s / f.ks : 0.0;
    const double cov_ts = q.s / f.kt;  // Cov(beta_s, beta_t)
    const double g11 = s1 * f.kt / d1, g12 = s1 * f.ks / d2;
    const double g21 = s2 * f.kt / d2, g22 = s2 * f.ks / d1;
    ab.b = 0.5 * std::sqrt(g11 * g11 * vt + g12 * g12 * vs - 2.0 * g11 * g12 * cov_ts +
                           g21 * g21 * vt + g22 * g22 * vs - 2.0 * g21 * g22 * cov_ts);
    return ab;
}

double p_correct_digital(const QualityInputs& q, double payoff_spread, int agent) {
    check_agent(agent);
    if (!(payoff_spread > 0.0)) {
        throw std::invalid_argument("p_correct_digital: payoff spread must be positive");
    }
    const TimeFactors f = time_factors(q);
    const double gap = f.tkt - f.sks;
    if (!(gap > 0.0)) {
        throw std::invalid_argument("p_correct_digital: requires t kappa_t > s kappa_s");
    }
    const double arg = 0.5 * payoff_spread * (q.sigma1 * q.sigma1 - q.sigma2 * q.sigma2) *
                       std::sqrt(gap) / std::sqrt(q.sigma1 * q.sigma1 + q.sigma2 * q.sigma2);
    const double p1 = quad::norm_cdf(arg);
    return agent == 1 ? p1 : 1.0 - p1;
}

double GaussianHalfPosterior::sd() const { return std::sqrt(var); }
double GaussianHalfPosterior::mass_plus() const { return quad::norm_cdf(mu / sd()); }
double GaussianHalfPosterior::mass_minus() const { return 1.0 - mass_plus(); }

double p_correct_gaussian(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                          int agent) {
    check_agent(agent);
    const ABCoefficients ab = ab_coefficients(q);
    if (ab.a == 0.0) return 0.5;
    const double mass = posterior.mass_plus();
    if (!(mass > 0.0)) {
        throw std::runtime_error("p_correct_gaussian: high half posterior has no mass");
    }
    const double upper = std::max(10.0, posterior.mu + 10.0 * posterior.sd());
    const double integral = half_line_integral(upper, [&](double x) {
        return quad::norm_cdf(-ab.a * x / ab.b) * posterior_density(posterior, x);
    });
    const double p1 = integral / mass;
    return agent == 1 ? p1 : 1.0 - p1;
}

double p_correct_gaussian_low(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                              int agent) {
    check_agent(agent);
    const ABCoefficients ab = ab_coefficients(q);
    if (ab.a == 0.0) return 0.5;
    const double mass = posterior.mass_minus();
    if (!(mass > 0.0)) {
        throw std::runtime_error("p_correct_gaussian_low: low half posterior has no mass");
    }
    const double upper = std::max(10.0, -posterior.mu + 10.0 * posterior.sd());
    const double integral = half_line_integral(upper, [&](double u) {
        // x = -u on the low half; Theta((a/b) x) weights the correct side.
        return quad::norm_cdf(-ab.a * u / ab.b) * posterior_density(posterior, -u);
    });
    const double p1 = integral / mass;
    return agent == 1 ? p1 : 1.0 - p1;
}

double truncated_mean_positive_part(double mean, double sd) {
    if (!(sd > 0.0)) {
        throw std::invalid_argument("truncated_mean_positive_part: sd must be positive");
    }
    const double z = mean / sd;
    return mean * quad::norm_cdf(z) + sd * quad::norm_pdf(z);
}

double truncated_second_moment_positive_part(double mean, double sd) {
    if (!(sd > 0.0)) {
        throw std::invalid_argument("truncated_second_moment_positive_part: sd must be positive");
    }
    const double z = mean / sd;
    return (mean * mean + sd * sd) * quad::norm_cdf(z) + mean * sd * quad::norm_pdf(z);
}

TransactionPrices expected_transaction_prices(const QualityInputs& q, double x,
                                              double own_price) {
    const ABCoefficients ab = ab_coefficients(q);
    const double ax = ab.a * std::abs(x);
    TransactionPrices out;
    out.high_correct = own_price - truncated_mean_positive_part(-ax, ab.b);
    out.high_erroneous = own_price + truncated_mean_positive_part(ax, ab.b);
    out.low_correct = own_price + truncated_mean_positive_part(-ax, ab.b);
    out.low_erroneous = own_price - truncated_mean_positive_part(ax, ab.b);
    return out;
}

double expected_profit_gaussian(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                                int agent) {
    check_agent(agent);
    const ABCoefficients ab = ab_coefficients(q);
    if (ab.a == 0.0) return 0.0;  // no informational edge; integrand vanishes
    const double sd = posterior.sd();
    const double upper_hi = std::max(10.0, posterior.mu + 10.0 * sd);
    const double upper_lo = std::max(10.0, -posterior.mu + 10.0 * sd);
    const double high = half_line_integral(upper_hi, [&](double x) {
        return profit_integrand_agent1(x, ab) * posterior_density(posterior, x);
    });
    const double low = half_line_integral(upper_lo, [&](double u) {
        return profit_integrand_agent1(u, ab) * posterior_density(posterior, -u);
    });
    const double agent1 = high + low;
    return agent == 1 ? agent1 : -agent1;
}

double profit_variance_gaussian(const QualityInputs& q, const GaussianHalfPosterior& posterior,
                                int agent) {
    check_agent(agent);
    const ABCoefficients ab = ab_coefficients(q);
    const double sd = posterior.sd();
    const double upper_hi = std::max(10.0, posterior.mu + 10.0 * sd);
    const double upper_lo = std::max(10.0, -posterior.mu + 10.0 * sd);
    const double second =
        half_line_integral(upper_hi,
                           [&](double x) {
                               return second_moment_integrand(x, ab) *
                                      posterior_density(posterior, x);
                           }) +
        half_line_integral(upper_lo, [&](double u) {
            return second_moment_integrand(u, ab) * posterior_density(posterior, -u);
        });
    const double mean = expected_profit_gaussian(q, posterior, agent);
    const double variance = second - mean * mean;
    if (variance < -1e-10) {
        throw std::runtime_error("profit_variance_gaussian: negative variance, kernel bug");
    }
    return variance < 0.0 ? 0.0 : variance;
}

namespace {

DigitalClearingStats digital_clearing_stats_impl(const QualityInputs& q, const PayoffModel& model,
                                                 int state, int agent) {
    const TimeFactors f = time_factors(q);
    const double spread = model.spread();
    const double xk = state == 1 ? spread : 0.0;  // normalized payoff level
    const double s1 = q.sigma1, s2 = q.sigma2;
    const double v1 = s1 * s1 * f.tkt + s2 * s2 * f.sks;
    const double v2 = s2 * s2 * f.tkt + s1 * s1 * f.sks;
    const double cov = (s1 * s1 + s2 * s2) * f.sks;
    const double var_w = v1 + v2 - 2.0 * cov;
    if (!(var_w > 0.0)) {
        throw std::runtime_error("digital_clearing_stats: degenerate differential");
    }
    const double sd_w = std::sqrt(var_w);
    const double cu = (v1 - cov) / sd_w;
    const double cv = (cov - v2) / sd_w;
    const double var_z = v1 - cu * cu;
    const double sd_z = var_z > 0.0 ? std::sqrt(var_z) : 0.0;

    // {S1 > S2}  <=>  w > w_star in standardized units.
    const double w_star = (0.5 * spread - xk) * (v1 - v2) / sd_w;
    const bool correct_is_upper = (agent == 1) == (state == 1);

    const double log_odds = std::log(model.p1() / model.p0());
    const auto mid_price = [&](double w, double z) {
        const double u0 = cu * w + z;
        const double v0 = cv * w + z;
        const double l1 = log_odds + spread * (v1 * xk + u0) - 0.5 * spread * spread * v1;
        const double l2 = log_odds + spread * (v2 * xk + v0) - 0.5 * spread * spread * v2;
        const double s1x = spread / (1.0 + std::exp(-l1));
        const double s2x = spread / (1.0 + std::exp(-l2));
        return model.x0() + 0.5 * (s1x + s2x);
    };

    const quad::HermiteRule& gh = quad::gauss_hermite(kClearingNodes);
    const auto z_average = [&](double w) {
        double acc = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < gh.node.size(); ++i) {
            const double z = std::numbers::sqrt2 * sd_z * gh.node[i];
            acc += gh.weight[i] * mid_price(w, z);
            norm += gh.weight[i];
        }
        return acc / norm;
    };

    // Conditional mean of the mid price on either side of w_star; the
    // truncated-normal weight is taken relative to phi(w_star) so both deep
    // and shallow truncations stay well conditioned.
    const quad::Rule& gl = quad::gauss_legendre(kClearingNodes);
    const auto side_mean = [&](bool upper) {
        const double reach = 12.0 + std::max(0.0, upper ? -w_star : w_star);
        double acc = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < gl.node.size(); ++i) {
            const double e = 0.5 * (gl.node[i] + 1.0) * reach;
            const double weight =
                0.5 * reach * gl.weight[i] *
                std::exp((upper ? -w_star * e : w_star * e) - 0.5 * e * e);
            const double w = upper ? w_star + e : w_star - e;
            acc += weight * z_average(w);
            norm += weight;
        }
        return acc / norm;
    };

    DigitalClearingStats stats;
    stats.p_correct = correct_is_upper ? quad::norm_cdf(-w_star) : quad::norm_cdf(w_star);
    stats.clearing_given_correct = side_mean(correct_is_upper);
    stats.clearing_given_erroneous = side_mean(!correct_is_upper);
    return stats;
}

}  // namespace

DigitalClearingStats digital_clearing_stats(const QualityInputs& q, const PayoffModel& model,
                                            int state, int agent) {
    check_agent(agent);
    if (model.kind() != PayoffKind::digital) {
        throw std::invalid_argument("digital_clearing_stats: digital model required");
    }
    if (state != 0 && state != 1) {
        throw std::invalid_argument("digital_clearing_stats: state must be 0 or 1");
    }

    static std::map<StatsKey, DigitalClearingStats> cache;
    static std::mutex cache_mutex;
    const StatsKey key{{bits(q.sigma1), bits(q.sigma2), bits(q.t), bits(q.s), bits(q.horizon),
                        bits(model.x0()), bits(model.x1()), bits(model.p1())},
                       state,
                       agent};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const DigitalClearingStats stats = digital_clearing_stats_impl(q, model, state, agent);
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, stats);
    return stats;
}

double expected_profit_digital(const QualityInputs& q, const PayoffModel& model,
                               double weight_high, int agent) {
    check_agent(agent);
    if (!(weight_high >= 0.0 && weight_high <= 1.0)) {
        throw std::invalid_argument("expected_profit_digital: weight_high must be in [0,1]");
    }
    const DigitalClearingStats high = digital_clearing_stats(q, model, 1, agent);
    const DigitalClearingStats low = digital_clearing_stats(q, model, 0, agent);
    const double x1 = model.x1();
    const double x0 = model.x0();
    const double high_term =
        high.p_correct * (x1 - high.clearing_given_correct) -
        (1.0 - high.p_correct) * (x1 - high.clearing_given_erroneous);
    const double low_term = low.p_correct * (low.clearing_given_correct - x0) -
                            (1.0 - low.p_correct) * (low.clearing_given_erroneous - x0);
    return weight_high * high_term + (1.0 - weight_high) * low_term;
}

double profit_to_go_gaussian(const std::vector<QualityInputs>& stages,
                             const GaussianHalfPosterior& posterior, int agent) {
    double total = 0.0;
    for (const QualityInputs& stage : stages) {
        total += expected_profit_gaussian(stage, posterior, agent);
    }
    return total;
}

double profit_to_go_digital(const std::vector<QualityInputs>& stages, const PayoffModel& model,
                            double weight_high, int agent) {
    double total = 0.0;
    for (const QualityInputs& stage : stages) {
        total += expected_profit_digital(stage, model, weight_high, agent);
    }
    return total;
}

}  // namespace sigmkt
