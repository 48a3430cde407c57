#include "sigmkt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sigmkt/quadrature.hpp"

namespace sigmkt {

namespace {

constexpr std::size_t kHermiteNodes = 200;

double require_time_before_horizon(double t, double horizon, const char* where) {
    if (!(t < horizon)) {
        throw std::domain_error(std::string(where) + ": pricing is undefined at t >= T");
    }
    return t;
}

/// Log prior density up to an additive constant; tabulated priors interpolate
/// linearly between grid nodes.
double log_prior(const PayoffModel& model, double x) {
    switch (model.kind()) {
        case PayoffKind::gaussian:
            return -0.5 * x * x;
        case PayoffKind::tabulated: {
            const auto& g = model.grid();
            const auto& d = model.density();
            if (x <= g.front() || x >= g.back()) return -std::numeric_limits<double>::infinity();
            const auto it = std::upper_bound(g.begin(), g.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
            const double w = (x - g[i]) / (g[i + 1] - g[i]);
            const double den = (1.0 - w) * d[i] + w * d[i + 1];
            return den > 0.0 ? std::log(den) : -std::numeric_limits<double>::infinity();
        }
        case PayoffKind::digital:
            throw std::logic_error("log_prior: digital priors are discrete");
    }
    return 0.0;
}

}  // namespace

double log_likelihood_exponent(double t, double sigma, double xi, double x, double horizon) {
    require_time_before_horizon(t, horizon, "log_likelihood_exponent");
    return kappa(t, horizon) * (sigma * xi * x - 0.5 * sigma * sigma * x * x * t);
}

double conditional_corr(double t, double s, double horizon, double rho) {
    if (!(s <= t)) {
        throw std::invalid_argument("conditional_corr: requires s <= t");
    }
    require_time_before_horizon(t, horizon, "conditional_corr");
    if (s <= 0.0 || rho == 0.0) return 0.0;
    if (s == t) return rho;
    return rho * std::sqrt((s / t) * (kappa(s, horizon) / kappa(t, horizon)));
}

double univariate_log_likelihood(double t, double sigma, double xi, double x, double horizon) {
    require_time_before_horizon(t, horizon, "univariate_log_likelihood");
    if (t == 0.0) return 0.0;  // xi_0 = 0 identically; no information
    const double v = t / kappa(t, horizon);
    const double e = xi - sigma * t * x;
    return -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * e * e / v;
}

double bivariate_log_likelihood(const SignalObservation& own, const SignalObservation& counterpart,
                                double rho_hat, double x, double horizon) {
    const double t = require_time_before_horizon(own.t, horizon, "bivariate_log_likelihood");
    const double s = counterpart.t;
    if (!(s > 0.0 && s < t)) {
        throw std::invalid_argument("bivariate_log_likelihood: requires 0 < s < t");
    }
    if (!(std::abs(rho_hat) < 1.0)) {
        throw std::invalid_argument("bivariate_log_likelihood: requires |rho_hat| < 1");
    }
    const double v1 = t / kappa(t, horizon);
    const double v2 = s / kappa(s, horizon);
    const double e1 = own.xi - own.sigma * t * x;
    const double e2 = counterpart.xi - counterpart.sigma * s * x;
    const double one_minus = 1.0 - rho_hat * rho_hat;
    const double quad =
        e1 * e1 / v1 - 2.0 * rho_hat * e1 * e2 / std::sqrt(v1 * v2) + e2 * e2 / v2;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(v1 * v2 * one_minus) -
           0.5 * quad / one_minus;
}

double signal_log_likelihood(const EffectiveInfo& info, double x) {
    if (!info.counterpart || info.counterpart->t <= 0.0) {
        return univariate_log_likelihood(info.own.t, info.own.sigma, info.own.xi, x, info.horizon);
    }
    const double rho_hat =
        conditional_corr(info.own.t, info.counterpart->t, info.horizon, info.rho);
    return bivariate_log_likelihood(info.own, *info.counterpart, rho_hat, x, info.horizon);
}

double PosteriorTable::mean() const {
    double m = 0.0;
    if (!continuous) {
        for (std::size_t i = 0; i < x.size(); ++i) m += x[i] * weight[i];
        return m;
    }
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        m += 0.5 * (x[i] * weight[i] + x[i + 1] * weight[i + 1]) * (x[i + 1] - x[i]);
    }
    return m;
}

double PosteriorTable::mass_above(double level) const {
    if (!continuous) {
        double m = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] > level) m += weight[i];
        }
        return m;
    }
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (x[i + 1] <= level) continue;
        double lo = std::max(x[i], level);
        const double w_lo = weight[i] + (weight[i + 1] - weight[i]) * (lo - x[i]) / (x[i + 1] - x[i]);
        m += 0.5 * (w_lo + weight[i + 1]) * (x[i + 1] - lo);
    }
    return m;
}

double PosteriorTable::density_at(double x_eval) const {
    if (!continuous) {
        throw std::logic_error("PosteriorTable::density_at: discrete posterior");
    }
    if (x_eval <= x.front() || x_eval >= x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), x_eval);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (x_eval - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * weight[i] + w * weight[i + 1];
}

PosteriorTable posterior(const PayoffModel& model, const EffectiveInfo& info) {
    require_time_before_horizon(info.own.t, info.horizon, "posterior");
    PosteriorTable table;
    switch (model.kind()) {
        case PayoffKind::digital: {
            table.x = {model.x0(), model.x1()};
            const double l0 = signal_log_likelihood(info, model.x0());
            const double l1 = signal_log_likelihood(info, model.x1());
            const double shift = std::max(l0, l1);
            const double w0 = model.p0() * std::exp(l0 - shift);
            const double w1 = model.p1() * std::exp(l1 - shift);
            const double total = w0 + w1;
            if (!(total > 0.0) || !std::isfinite(total)) {
                throw std::runtime_error("posterior: weights underflowed after shifting");
            }
            table.weight = {w0 / total, w1 / total};
            return table;
        }
        case PayoffKind::gaussian: {
            // Dense table over the +-10 prior-sd window; pricing itself goes
            // through the closed form, this representation serves diagnostics.
            const GaussianPosterior gp = gaussian_posterior(info);
            const double sd = std::sqrt(gp.variance);
            constexpr std::size_t n = 801;
            table.continuous = true;
            table.x.resize(n);
            table.weight.resize(n);
            const double lo = std::min(-10.0, gp.mean - 8.0 * sd);
            const double hi = std::max(10.0, gp.mean + 8.0 * sd);
            for (std::size_t i = 0; i < n; ++i) {
                table.x[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
                table.weight[i] = quad::norm_pdf((table.x[i] - gp.mean) / sd) / sd;
            }
            return table;
        }
        case PayoffKind::tabulated: {
            table.continuous = true;
            table.x = model.grid();
            table.weight.resize(table.x.size());
            std::vector<double> logw(table.x.size(), -std::numeric_limits<double>::infinity());
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < table.x.size(); ++i) {
                if (model.density()[i] > 0.0) {
                    logw[i] = std::log(model.density()[i]) + signal_log_likelihood(info, table.x[i]);
                    shift = std::max(shift, logw[i]);
                }
            }
            if (!std::isfinite(shift)) {
                throw std::runtime_error("posterior: tabulated weights underflowed");
            }
            double mass = 0.0;
            for (std::size_t i = 0; i < table.x.size(); ++i) {
                table.weight[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - shift) : 0.0;
            }
            for (std::size_t i = 0; i + 1 < table.x.size(); ++i) {
                mass += 0.5 * (table.weight[i] + table.weight[i + 1]) * (table.x[i + 1] - table.x[i]);
            }
            if (!(mass > 0.0)) {
                throw std::runtime_error("posterior: tabulated posterior is not normalizable");
            }
            for (double& w : table.weight) w /= mass;
            return table;
        }
    }
    return table;
}

GaussianPosterior gaussian_posterior(const EffectiveInfo& info) {
    const double T = info.horizon;
    const double t = require_time_before_horizon(info.own.t, T, "gaussian_posterior");
    const double s1 = info.own.sigma;
    const double kt = t > 0.0 ? kappa(t, T) : 1.0;

    if (!info.counterpart || info.counterpart->t <= 0.0) {
        const double precision = s1 * s1 * kt * t + 1.0;
        return GaussianPosterior{s1 * kt * info.own.xi / precision, 1.0 / precision};
    }

    const double s = info.counterpart->t;
    if (!(s < t)) throw std::invalid_argument("gaussian_posterior: requires s < t");
    const double s2 = info.counterpart->sigma;
    const double ks = kappa(s, T);
    const double rho_hat = conditional_corr(t, s, T, info.rho);
    const double one_minus = 1.0 - rho_hat * rho_hat;
    if (!(one_minus > 0.0)) {
        throw std::invalid_argument("gaussian_posterior: degenerate conditional correlation");
    }
    const double xi1 = info.own.xi;
    const double xi2 = info.counterpart->xi;
    const double quad_coef = s1 * s1 * kt * t + s2 * s2 * ks * s -
                             2.0 * rho_hat * s1 * s2 * std::sqrt(t * s * kt * ks);
    const double lin_coef = s1 * kt * xi1 + s2 * ks * xi2 -
                            rho_hat * std::sqrt(kt * ks / (t * s)) * (s1 * t * xi2 + s2 * s * xi1);
    const double precision = 1.0 + quad_coef / one_minus;
    return GaussianPosterior{lin_coef / (one_minus * precision), 1.0 / precision};
}

double price(const PayoffModel& model, const EffectiveInfo& info, const Numeraire& numeraire) {
    require_time_before_horizon(info.own.t, info.horizon, "price");
    const double disc = numeraire.discount(info.own.t);
    if (model.kind() == PayoffKind::gaussian) {
        return disc * gaussian_posterior(info).mean;
    }
    return disc * posterior(model, info).mean();
}

double price_by_quadrature(const PayoffModel& model, const EffectiveInfo& info,
                           const Numeraire& numeraire) {
    require_time_before_horizon(info.own.t, info.horizon, "price_by_quadrature");
    const double disc = numeraire.discount(info.own.t);

    if (model.kind() == PayoffKind::digital) {
        const double l0 = std::log(model.p0()) + signal_log_likelihood(info, model.x0());
        const double l1 = std::log(model.p1()) + signal_log_likelihood(info, model.x1());
        const double shift = std::max(l0, l1);
        const double w0 = std::exp(l0 - shift);
        const double w1 = std::exp(l1 - shift);
        return disc * (model.x0() * w0 + model.x1() * w1) / (w0 + w1);
    }

    if (model.kind() == PayoffKind::tabulated) {
        // Refined trapezoid on the interpolated prior.
        const auto& g = model.grid();
        const std::size_t refine = 4;
        const std::size_t n = (g.size() - 1) * refine + 1;
        std::vector<double> xs(n), lw(n);
        double shift = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t cell = std::min(i / refine, g.size() - 2);
            const double frac = static_cast<double>(i - cell * refine) / refine;
            xs[i] = g[cell] + frac * (g[cell + 1] - g[cell]);
            const double lp = log_prior(model, std::min(xs[i], g.back() - 1e-300));
            lw[i] = std::isfinite(lp) ? lp + signal_log_likelihood(info, xs[i])
                                      : -std::numeric_limits<double>::infinity();
            if (std::isfinite(lw[i])) shift = std::max(shift, lw[i]);
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double w_lo = std::isfinite(lw[i]) ? std::exp(lw[i] - shift) : 0.0;
            const double w_hi = std::isfinite(lw[i + 1]) ? std::exp(lw[i + 1] - shift) : 0.0;
            const double dx = xs[i + 1] - xs[i];
            den += 0.5 * (w_lo + w_hi) * dx;
            num += 0.5 * (xs[i] * w_lo + xs[i + 1] * w_hi) * dx;
        }
        if (!(den > 0.0)) throw std::runtime_error("price_by_quadrature: posterior underflow");
        return disc * num / den;
    }

    // Gaussian prior: Gauss-Hermite recentered at the numerically located
    // posterior mode (Laplace scaling), independent of the closed form.
    const auto g = [&](double x) { return -0.5 * x * x + signal_log_likelihood(info, x); };
    double x_hat = 0.0;
    const double h = 1e-5;
    for (int iter = 0; iter < 64; ++iter) {
        const double d1 = (g(x_hat + h) - g(x_hat - h)) / (2.0 * h);
        const double d2 = (g(x_hat + h) - 2.0 * g(x_hat) + g(x_hat - h)) / (h * h);
        if (!(d2 < 0.0)) break;
        const double step = d1 / d2;
        x_hat -= step;
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(x_hat))) break;
    }
    const double curvature =
        -(g(x_hat + h) - 2.0 * g(x_hat) + g(x_hat - h)) / (h * h);
    if (!(curvature > 0.0)) {
        throw std::runtime_error("price_by_quadrature: posterior mode not located");
    }
    const double scale = std::sqrt(2.0 / curvature);
    const double g0 = g(x_hat);
    const auto& rule = quad::gauss_hermite(kHermiteNodes);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
        const double x = x_hat + scale * rule.node[i];
        const double v = std::exp(rule.log_comp[i] + g(x) - g0);
        num += v * x;
        den += v;
    }
    return disc * num / den;
}

std::vector<double> innovation_increments(const SignalPath& path, const PayoffModel& model,
                                          const TimeGrid& grid) {
    const std::size_t m = grid.intervals();
    const double T = grid.horizon;
    std::vector<double> dw(m > 0 ? m - 1 : 0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double t = grid.times[i];
        EffectiveInfo info{T, SignalObservation{t, path.xi[i], path.params.sigma}, std::nullopt,
                           0.0};
        const double phi = model.kind() == PayoffKind::gaussian
                               ? gaussian_posterior(info).mean
                               : posterior(model, info).mean();
        dw[i] = kappa(t, T) * (path.xi[i] / T - path.params.sigma * phi) * grid.dt(i) +
                (path.xi[i + 1] - path.xi[i]);
    }
    return dw;
}

QuotePair cara_quotes(const EffectiveInfo& info, double lambda, const Numeraire& numeraire) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("cara_quotes: lambda must be positive");
    }
    const GaussianPosterior gp = gaussian_posterior(info);
    const double premium = 0.5 * lambda * gp.variance;
    const double disc = numeraire.discount(info.own.t);
    return QuotePair{disc * (gp.mean - premium), disc * (gp.mean + premium)};
}

double cara_clearing_price(double seller_ask, double buyer_bid, double lambda_seller,
                           double lambda_buyer) {
    if (!(lambda_seller > 0.0) || !(lambda_buyer > 0.0)) {
        throw std::invalid_argument("cara_clearing_price: aversion levels must be positive");
    }
    return (lambda_seller * seller_ask + lambda_buyer * buyer_bid) /
           (lambda_seller + lambda_buyer);
}

double cara_equalization_residual(double clearing, const EffectiveInfo& seller,
                                  double lambda_seller, const EffectiveInfo& buyer,
                                  double lambda_buyer) {
    const GaussianPosterior gs = gaussian_posterior(seller);
    const GaussianPosterior gb = gaussian_posterior(buyer);
    // log of minus expected utility on each side; equal at the clearing price.
    const double seller_side = -lambda_seller * clearing + lambda_seller * gs.mean +
                               0.5 * lambda_seller * lambda_seller * gs.variance;
    const double buyer_side = lambda_buyer * clearing - lambda_buyer * gb.mean +
                              0.5 * lambda_buyer * lambda_buyer * gb.variance;
    return seller_side - buyer_side;
}

double invert_price_to_signal(const PayoffModel& model, const EffectiveInfo& info,
                              const Numeraire& numeraire, double target_price) {
    const auto price_at = [&](double xi) {
        EffectiveInfo probe = info;
        probe.own.xi = xi;
        return price(model, probe, numeraire);
    };

    if (model.kind() == PayoffKind::gaussian) {
        const double f0 = price_at(0.0);
        const double f1 = price_at(1.0);
        const double slope = f1 - f0;
        if (!(std::abs(slope) > 0.0)) {
            throw std::domain_error("invert_price_to_signal: price does not depend on the signal");
        }
        return (target_price - f0) / slope;
    }

    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (price_at(lo) > target_price) {
        lo *= 2.0;
        if (++guard > 200) {
            throw std::domain_error("invert_price_to_signal: price below attainable range");
        }
    }
    guard = 0;
    while (price_at(hi) < target_price) {
        hi *= 2.0;
        if (++guard > 200) {
            throw std::domain_error("invert_price_to_signal: price above attainable range");
        }
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (price_at(mid) < target_price) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * (1.0 + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace sigmkt
