#pragma once

#include <cstddef>
#include <vector>

namespace sigmkt::quad {

struct Rule {
    std::vector<double> node;
    std::vector<double> weight;
};

/// Gauss-Hermite rule for weight e^{-y^2} (physicists' convention).
/// log_comp[i] = log(weight[i]) + node[i]^2, for integrating general decaying
/// integrands without overflow in the e^{y^2} compensation factor.
struct HermiteRule : Rule {
    std::vector<double> log_comp;
};

const HermiteRule& gauss_hermite(std::size_t n);

/// Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(std::size_t n);

/// Nodes/weights for int_0^upper f(x) dx after the substitution
/// x = upper * tanh(c u) / tanh(c), u in [0,1]; clusters nodes near 0 where
/// directional-quality integrands vary fastest.
Rule half_line_rule(double upper, std::size_t n, double c = 2.0);

double norm_pdf(double z);
double norm_cdf(double z);

}  // namespace sigmkt::quad
