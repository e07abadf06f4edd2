#pragma once

#include <vector>

#include "infotrans/diffeo.hpp"
#include "infotrans/fisher.hpp"
#include "infotrans/grid.hpp"

namespace infotrans {

// Horizontal lift of the sphere geodesic from 1 to a positive unit-norm
// target s: zeta' = grad(w_t) o zeta with laplacian(w_t) = (2 sigma'/sigma)
// o zeta^{-1}. The inverse map is advected alongside (psi' = -(Dpsi) grad w_t)
// and re-anchored by Newton inversion every reanchor_every steps and at the
// end. None of this depends on the metric parameters.
struct LiftOptions {
    int steps = 200;
    int store_every = 1;      // snapshot stride; must divide steps
    int reanchor_every = 16;
    double mean_alarm = 1e-6; // NumericalError if a Poisson RHS mean exceeds this
};

struct LiftResult {
    double theta = 0.0;
    std::vector<double> times;
    std::vector<DiffeoMap> zeta;
    std::vector<DiffeoMap> zeta_inv;
    std::vector<ScalarField> potential;    // w at each stored time
    std::vector<double> mean_corrections;  // subtracted Poisson RHS means, per step
    double endpoint_error = 0.0;           // max|Jac(zeta(1)) - s^2|
};

// theta = arccos(integrate(s)) for the unit-norm lift coordinate s > 0.
double compute_theta(const ScalarField& sqrt_target);

// Potential of the initial horizontal velocity:
//   laplacian(w0) = 2 theta (s - cos theta) / sin theta,   s = sqrt(Jac(phi)),
// with the theta -> 0 limit 2 (s - 1).
ScalarField solve_w0(const DiffeoMap& phi);
ScalarField solve_w0_from_sqrt(const ScalarField& sqrt_target);

LiftResult lift_geodesic(const ScalarField& sqrt_target, const LiftOptions& opt = {});

// Factorisation phi = eta o psi with eta volume-preserving and psi = zeta(1)
// the horizontal transport reaching Jac(psi) = Jac(phi).
struct Factorisation {
    DiffeoMap eta;
    DiffeoMap psi;
    ScalarField w0;
    double theta = 0.0;
    double vol_residual = 0.0;     // max|Jac(eta) - 1|
    double compose_residual = 0.0; // max distance phi vs eta o psi
    std::vector<double> mean_corrections;
};

Factorisation factorise(const DiffeoMap& phi, const LiftOptions& opt = {});

// psi with pullback_density(vol, psi) = target, plus the Fisher distance
// travelled and the realised density residual.
struct TransportResult {
    DiffeoMap psi;
    double distance = 0.0;
    double density_residual = 0.0; // max|Jac(psi) - target ratio|
    std::vector<double> mean_corrections;
};

TransportResult density_transport(const Density& target, const LiftOptions& opt = {});

// Max over interior stored times of the relative non-gradient energy fraction
// of the reconstructed velocity zeta' o zeta^{-1}; small values certify the
// lift stayed horizontal.
double horizontality_check(const LiftResult& lift);

} // namespace infotrans
