#include "sigmkt/payoff.hpp"

#include <cmath>
#include <stdexcept>

namespace sigmkt {

PayoffModel PayoffModel::digital(double x0, double x1, double p0, double p1) {
    if (!(x1 > x0)) {
        throw std::invalid_argument("PayoffModel::digital: requires x1 > x0");
    }
    if (!(p0 >= 0.0) || !(p1 >= 0.0) || std::abs(p0 + p1 - 1.0) > 1e-9) {
        throw std::invalid_argument("PayoffModel::digital: prior must be nonnegative and sum to 1");
    }
    PayoffModel model;
    model.kind_ = PayoffKind::digital;
    model.x0_ = x0;
    model.x1_ = x1;
    const double total = p0 + p1;
    model.p0_ = p0 / total;
    model.p1_ = p1 / total;
    return model;
}

PayoffModel PayoffModel::gaussian() {
    PayoffModel model;
    model.kind_ = PayoffKind::gaussian;
    return model;
}

PayoffModel PayoffModel::tabulated(std::vector<double> x, std::vector<double> density) {
    if (x.size() < 2 || x.size() != density.size()) {
        throw std::invalid_argument("PayoffModel::tabulated: need matching grids of size >= 2");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (!(x[i + 1] > x[i])) {
            throw std::invalid_argument("PayoffModel::tabulated: grid must be strictly increasing");
        }
        if (density[i] < 0.0 || density[i + 1] < 0.0) {
            throw std::invalid_argument("PayoffModel::tabulated: prior must be nonnegative");
        }
        mass += 0.5 * (density[i] + density[i + 1]) * (x[i + 1] - x[i]);
    }
    if (!(mass > 0.0)) {
        throw std::invalid_argument("PayoffModel::tabulated: prior has zero mass");
    }
    for (double& d : density) d /= mass;

    PayoffModel model;
    model.kind_ = PayoffKind::tabulated;
    model.grid_ = std::move(x);
    model.density_ = std::move(density);
    return model;
}

double PayoffModel::prior_mean() const {
    switch (kind_) {
        case PayoffKind::digital:
            return p0_ * x0_ + p1_ * x1_;
        case PayoffKind::gaussian:
            return 0.0;
        case PayoffKind::tabulated: {
            double mean = 0.0;
            for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
                mean += 0.5 * (grid_[i] * density_[i] + grid_[i + 1] * density_[i + 1]) *
                        (grid_[i + 1] - grid_[i]);
            }
            return mean;
        }
    }
    return 0.0;
}

}  // namespace sigmkt
