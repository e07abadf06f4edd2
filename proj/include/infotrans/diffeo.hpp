#pragma once

#include <vector>

#include "infotrans/grid.hpp"
#include "infotrans/spectral.hpp"

namespace infotrans {

// Diffeomorphism of the torus in displacement form: phi(x) = x + d(x) mod 1
// with smooth periodic d and everywhere-positive Jacobian (checked against
// the spectral Jacobian at construction unless explicitly skipped).
class DiffeoMap {
public:
    DiffeoMap() = default;
    explicit DiffeoMap(VectorField displacement, bool validate = true);

    static DiffeoMap identity(const Grid& g);

    const Grid& grid() const { return grid_; }
    const VectorField& displacement() const { return disp_; }

    // phi evaluated at every grid node, unwrapped (not reduced mod 1).
    std::vector<Point> forward_grid() const;

    ScalarField jacobian() const;
    double min_jacobian() const;

private:
    Grid grid_;
    VectorField disp_;
};

ScalarField jacobian(const DiffeoMap& phi);

// (f o g)(x) = f(g(x)); displacements compose through periodic interpolation.
DiffeoMap compose(const DiffeoMap& f, const DiffeoMap& g);

// Pointwise damped Newton on phi(y) = x; residual below tol in max norm or
// NewtonDiverged after max_iter sweeps.
DiffeoMap invert(const DiffeoMap& phi, double tol = 1e-10, int max_iter = 50);

// max over grid nodes of the periodic distance between phi(x) and psi(x).
double map_distance(const DiffeoMap& phi, const DiffeoMap& psi);

} // namespace infotrans
