#pragma once

#include <cstdint>
#include <vector>

#include "sigmkt/grid.hpp"

namespace sigmkt {

/// One information channel: signal-to-noise and contract horizon.
struct SignalParams {
    double sigma = 1.0;
    double horizon = 1.0;
};

/// Two standard Brownian bridges on a common grid with noise correlation rho.
/// beta1 = rho * beta2 + sqrt(1 - rho^2) * betabar, with beta2 and betabar
/// sampled independently from seeds derive_seed(seed, 0) and derive_seed(seed, 1).
struct BridgePair {
    std::vector<double> beta1;
    std::vector<double> beta2;
    double rho = 0.0;
};

/**
 * Signal path xi_t = sigma * t * x + beta_t on the grid. The realized
 * fundamental is kept for settlement and oracle code only; agent-facing code
 * receives SignalView, which does not carry it.
 */
struct SignalPath {
    std::vector<double> xi;
    SignalParams params;
    double fundamental = 0.0;
};

struct SignalView {
    const std::vector<double>* xi = nullptr;
    SignalParams params;
};

inline SignalView view(const SignalPath& path) { return SignalView{&path.xi, path.params}; }

/// Exact-law bridge on the grid via sequential conditional sampling;
/// beta(0) = beta(T) = 0 exactly by construction.
std::vector<double> sample_bridge(const TimeGrid& grid, std::uint64_t seed);

/// Correlated pair; |rho| <= 1 or std::invalid_argument.
BridgePair sample_bridge_pair(const TimeGrid& grid, double rho, std::uint64_t seed);

/// xi_i = sigma * t_i * x + beta_i pointwise.
SignalPath signal_path(const std::vector<double>& bridge, const TimeGrid& grid,
                       const SignalParams& params, double x);

/// Euler-Maruyama path of d xi = (sigma x - xi/T) kappa_t dt + dB.
/// Distributional cross-check only; production sampling goes through
/// sample_bridge + signal_path, which have no discretization bias.
SignalPath simulate_sde_bridge(const TimeGrid& grid, const SignalParams& params, double x,
                               std::uint64_t seed);

}  // namespace sigmkt
