#include "infotrans/grid.hpp"

#include <cmath>
#include <string>

namespace infotrans {

void validate_grid(const Grid& g) {
    if (g.dim != 1 && g.dim != 2)
        throw WrongDimension("grid dimension must be 1 or 2, got " + std::to_string(g.dim));
    for (int axis = 0; axis < g.dim; ++axis) {
        int n = g.sizes[axis];
        if (n < 8 || n % 2 != 0)
            throw ValidationError("grid size must be even and at least 8, got " +
                                  std::to_string(n) + " on axis " + std::to_string(axis));
    }
    if (g.dim == 1 && g.sizes[1] != 1)
        throw ValidationError("1-D grid must have sizes[1] == 1");
}

Grid make_grid(int n0) {
    Grid g{1, {n0, 1}};
    validate_grid(g);
    return g;
}

Grid make_grid(int n0, int n1) {
    Grid g{2, {n0, n1}};
    validate_grid(g);
    return g;
}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.points())
        throw ValidationError("field data size does not match grid");
}

Point grid_point(const Grid& g, std::size_t i) {
    auto n1 = std::size_t(g.sizes[1]);
    return {double(i / n1) / g.sizes[0], g.dim == 2 ? double(i % n1) / g.sizes[1] : 0.0};
}

ScalarField sample(const Grid& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        Point p = grid_point(g, i);
        out[i] = f(p[0], p[1]);
    }
    return out;
}

VectorField sample_vector(const Grid& g,
                          const std::function<std::array<double, 2>(double, double)>& f) {
    VectorField out(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
        Point p = grid_point(g, i);
        auto v = f(p[0], p[1]);
        for (int c = 0; c < g.dim; ++c) out[c][i] = v[c];
    }
    return out;
}

void check_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw ValidationError("fields live on different grids");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid(), b.grid());
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid(), b.grid());
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
    return out;
}

ScalarField pointwise_mul(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid(), b.grid());
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid(), b.grid());
    VectorField out = a;
    for (int c = 0; c < out.components(); ++c)
        for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] += b[c][i];
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid(), b.grid());
    VectorField out = a;
    for (int c = 0; c < out.components(); ++c)
        for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] -= b[c][i];
    return out;
}

VectorField operator*(double s, const VectorField& a) {
    VectorField out = a;
    for (int c = 0; c < out.components(); ++c)
        for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] *= s;
    return out;
}

void axpy(double s, const ScalarField& x, ScalarField& y) {
    check_same_grid(x.grid(), y.grid());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

void axpy(double s, const VectorField& x, VectorField& y) {
    check_same_grid(x.grid(), y.grid());
    for (int c = 0; c < y.components(); ++c) axpy(s, x[c], y[c]);
}

double max_abs(const ScalarField& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

double max_abs(const VectorField& a) {
    double m = 0.0;
    for (int c = 0; c < a.components(); ++c) m = std::max(m, max_abs(a[c]));
    return m;
}

bool all_finite(const ScalarField& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a[i])) return false;
    return true;
}

bool all_finite(const VectorField& a) {
    for (int c = 0; c < a.components(); ++c)
        if (!all_finite(a[c])) return false;
    return true;
}

} // namespace infotrans
