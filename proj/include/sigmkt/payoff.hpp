#pragma once

#include <vector>

namespace sigmkt {

enum class PayoffKind { digital, gaussian, tabulated };

/**
 * Terminal dividend specification. Three kinds are supported:
 *  - digital: X in {x0, x1}, x1 > x0, prior (p0, p1);
 *  - gaussian: X ~ N(0,1) a priori;
 *  - tabulated: prior density values on a strictly increasing x grid
 *    (trapezoid-normalized at construction).
 */
class PayoffModel {
public:
    static PayoffModel digital(double x0, double x1, double p0, double p1);
    static PayoffModel gaussian();
    static PayoffModel tabulated(std::vector<double> x, std::vector<double> density);

    PayoffKind kind() const { return kind_; }

    double x0() const { return x0_; }
    double x1() const { return x1_; }
    double p0() const { return p0_; }
    double p1() const { return p1_; }
    double spread() const { return x1_ - x0_; }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& density() const { return density_; }

    double prior_mean() const;

private:
    PayoffModel() = default;

    PayoffKind kind_ = PayoffKind::gaussian;
    double x0_ = 0.0, x1_ = 0.0, p0_ = 0.0, p1_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> density_;
};

}  // namespace sigmkt
