#include "sigmkt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sigmkt::quad {

namespace {

// Roots of H_n by Newton iteration on the orthonormal recurrence; weights from
// the derivative at the root. Weight function e^{-y^2}.
HermiteRule compute_hermite(std::size_t n) {
    if (n < 2) throw std::invalid_argument("gauss_hermite: need n >= 2");
    constexpr double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const std::size_t half = (n + 1) / 2;

    HermiteRule rule;
    rule.node.resize(n);
    rule.weight.resize(n);

    double z = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.node[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.node[1];
        } else {
            z = 2.0 * z - rule.node[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
        rule.node[i] = z;
        rule.node[n - 1 - i] = -z;
        rule.weight[i] = 2.0 / (pp * pp);
        rule.weight[n - 1 - i] = rule.weight[i];
    }
    if (n % 2 == 1) rule.node[half - 1] = 0.0;

    rule.log_comp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rule.log_comp[i] = std::log(rule.weight[i]) + rule.node[i] * rule.node[i];
    }
    return rule;
}

Rule compute_legendre(std::size_t n) {
    if (n < 2) throw std::invalid_argument("gauss_legendre: need n >= 2");
    Rule rule;
    rule.node.resize(n);
    rule.weight.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15) break;
        }
        rule.node[i] = -z;
        rule.node[n - 1 - i] = z;
        rule.weight[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weight[n - 1 - i] = rule.weight[i];
    }
    return rule;
}

std::mutex cache_mutex;

}  // namespace

const HermiteRule& gauss_hermite(std::size_t n) {
    static std::map<std::size_t, HermiteRule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_hermite(n)).first;
    return it->second;
}

const Rule& gauss_legendre(std::size_t n) {
    static std::map<std::size_t, Rule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_legendre(n)).first;
    return it->second;
}

Rule half_line_rule(double upper, std::size_t n, double c) {
    if (!(upper > 0.0)) throw std::invalid_argument("half_line_rule: upper must be positive");
    const Rule& gl = gauss_legendre(n);
    Rule rule;
    rule.node.resize(n);
    rule.weight.resize(n);
    const double scale = upper / std::tanh(c);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = 0.5 * (gl.node[i] + 1.0);  // [0, 1]
        const double ch = std::cosh(c * u);
        rule.node[i] = scale * std::tanh(c * u);
        rule.weight[i] = 0.5 * gl.weight[i] * scale * c / (ch * ch);
    }
    return rule;
}

double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace sigmkt::quad
