#pragma once

#include <vector>

#include "infotrans/grid.hpp"

namespace infotrans {

// Periodic cubic B-spline interpolation. Coefficients come from cyclic
// tridiagonal solves, so grid values are reproduced exactly at the nodes and
// off-node error is O(h^4). Queries cost O(1) after construction.
class SplineInterpolant {
public:
    explicit SplineInterpolant(const ScalarField& f);

    double operator()(const Point& p) const;
    double operator()(double x0, double x1 = 0.0) const;

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    std::vector<double> coef_;
};

// Batch evaluation; points may lie anywhere in R^dim (wrapped periodically).
std::vector<double> interpolate(const ScalarField& f, const std::vector<Point>& points);

} // namespace infotrans
