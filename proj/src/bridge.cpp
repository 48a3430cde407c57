#include "sigmkt/bridge.hpp"

#include <cmath>
#include <stdexcept>

#include "sigmkt/rng.hpp"

namespace sigmkt {

std::vector<double> sample_bridge(const TimeGrid& grid, std::uint64_t seed) {
    const std::size_t m = grid.intervals();
    const double T = grid.horizon;
    Rng rng(seed);

    std::vector<double> beta(m + 1);
    beta[0] = 0.0;
    for (std::size_t i = 0; i + 1 <= m; ++i) {
        const double remaining_now = T - grid.times[i];
        const double remaining_next = T - grid.times[i + 1];  // exactly 0 at the last step
        const double dt = grid.dt(i);
        const double mean = beta[i] * remaining_next / remaining_now;
        const double sd = std::sqrt(dt * remaining_next / remaining_now);
        beta[i + 1] = mean + sd * rng.gaussian();
    }
    return beta;
}

BridgePair sample_bridge_pair(const TimeGrid& grid, double rho, std::uint64_t seed) {
    if (!(std::abs(rho) <= 1.0)) {
        throw std::invalid_argument("sample_bridge_pair: |rho| must not exceed 1");
    }
    BridgePair pair;
    pair.rho = rho;
    pair.beta2 = sample_bridge(grid, derive_seed(seed, 0));
    const std::vector<double> betabar = sample_bridge(grid, derive_seed(seed, 1));

    const double mix = std::sqrt(1.0 - rho * rho);
    pair.beta1.resize(pair.beta2.size());
    for (std::size_t i = 0; i < pair.beta1.size(); ++i) {
        pair.beta1[i] = rho * pair.beta2[i] + mix * betabar[i];
    }
    return pair;
}

SignalPath signal_path(const std::vector<double>& bridge, const TimeGrid& grid,
                       const SignalParams& params, double x) {
    if (bridge.size() != grid.times.size()) {
        throw std::invalid_argument("signal_path: bridge and grid sizes differ");
    }
    SignalPath path;
    path.params = params;
    path.fundamental = x;
    path.xi.resize(bridge.size());
    for (std::size_t i = 0; i < bridge.size(); ++i) {
        path.xi[i] = params.sigma * grid.times[i] * x + bridge[i];
    }
    return path;
}

SignalPath simulate_sde_bridge(const TimeGrid& grid, const SignalParams& params, double x,
                               std::uint64_t seed) {
    const std::size_t m = grid.intervals();
    const double T = grid.horizon;
    Rng rng(seed);

    SignalPath path;
    path.params = params;
    path.fundamental = x;
    path.xi.resize(m + 1);
    path.xi[0] = 0.0;
    for (std::size_t i = 0; i + 1 <= m; ++i) {
        const double t = grid.times[i];
        const double dt = grid.dt(i);
        const double drift = (params.sigma * x - path.xi[i] / T) * kappa(t, T);
        path.xi[i + 1] = path.xi[i] + drift * dt + std::sqrt(dt) * rng.gaussian();
    }
    return path;
}

}  // namespace sigmkt
