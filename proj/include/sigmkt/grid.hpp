#pragma once

#include <cstddef>
#include <vector>

namespace sigmkt {

/// Auction time grid 0 = t_0 < t_1 < ... < t_m = T.
struct TimeGrid {
    double horizon = 1.0;
    std::vector<double> times;

    std::size_t intervals() const { return times.empty() ? 0 : times.size() - 1; }
    double dt(std::size_t i) const { return times[i + 1] - times[i]; }
};

/// Uniform grid with spacing T/m. Throws std::invalid_argument on T <= 0 or m == 0.
TimeGrid make_grid(double horizon, std::size_t intervals);

/// Time change T/(T - t). Throws std::domain_error at t >= T: the bridge
/// likelihood degenerates there and settlement must be handled separately.
double kappa(double t, double horizon);

}  // namespace sigmkt
