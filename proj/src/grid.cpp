#include "sigmkt/grid.hpp"

#include <stdexcept>

namespace sigmkt {

TimeGrid make_grid(double horizon, std::size_t intervals) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("make_grid: horizon must be positive");
    }
    if (intervals < 1) {
        throw std::invalid_argument("make_grid: need at least one interval");
    }
    TimeGrid grid;
    grid.horizon = horizon;
    grid.times.resize(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        grid.times[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
    }
    grid.times.front() = 0.0;
    grid.times.back() = horizon;  // exact endpoints; pinning relies on this
    return grid;
}

double kappa(double t, double horizon) {
    if (!(t < horizon)) {
        throw std::domain_error("kappa: diverges at t >= T; settle instead of pricing");
    }
    return horizon / (horizon - t);
}

}  // namespace sigmkt
