#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "infotrans/errors.hpp"

namespace infotrans {

// Uniform periodic grid on the unit torus [0,1)^dim, dim 1 or 2.
// Axis j has sizes[j] samples at x_j = i/sizes[j]; sizes are even and >= 8.
// Scalar data is row-major: index = i0 * sizes[1] + i1 (sizes[1] == 1 in 1-D).
struct Grid {
    int dim = 1;
    std::array<int, 2> sizes{0, 1};

    std::size_t points() const { return std::size_t(sizes[0]) * std::size_t(sizes[1]); }
    double spacing(int axis) const { return 1.0 / sizes[axis]; }
    bool operator==(const Grid&) const = default;
};

Grid make_grid(int n0);
Grid make_grid(int n0, int n1);
void validate_grid(const Grid& g);

// A point on (or lifted from) the torus; coordinate 1 is ignored in 1-D.
using Point = std::array<double, 2>;

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid_(g), v_(g.points(), fill) {}
    ScalarField(const Grid& g, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    double& at(int i0, int i1 = 0) { return v_[std::size_t(i0) * grid_.sizes[1] + i1]; }
    double at(int i0, int i1 = 0) const { return v_[std::size_t(i0) * grid_.sizes[1] + i1]; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

private:
    Grid grid_;
    std::vector<double> v_;
};

// Velocity-style field: one scalar component per axis.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g) : grid_(g) {
        for (int c = 0; c < g.dim; ++c) comp_.emplace_back(g);
    }

    const Grid& grid() const { return grid_; }
    int components() const { return int(comp_.size()); }
    ScalarField& operator[](int c) { return comp_[c]; }
    const ScalarField& operator[](int c) const { return comp_[c]; }

private:
    Grid grid_;
    std::vector<ScalarField> comp_;
};

// Grid coordinate of flat index i.
Point grid_point(const Grid& g, std::size_t i);

// Pointwise sampling of closures; handy for tests and presets.
ScalarField sample(const Grid& g, const std::function<double(double, double)>& f);
VectorField sample_vector(const Grid& g,
                          const std::function<std::array<double, 2>(double, double)>& f);

// Elementwise helpers. Shapes must match.
void check_same_grid(const Grid& a, const Grid& b);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField pointwise_mul(const ScalarField& a, const ScalarField& b);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
void axpy(double s, const ScalarField& x, ScalarField& y); // y += s*x
void axpy(double s, const VectorField& x, VectorField& y);

double max_abs(const ScalarField& a);
double max_abs(const VectorField& a);
bool all_finite(const ScalarField& a);
bool all_finite(const VectorField& a);

} // namespace infotrans
