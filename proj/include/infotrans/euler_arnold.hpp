#pragma once

#include <vector>

#include "infotrans/diffeo.hpp"
#include "infotrans/grid.hpp"
#include "infotrans/inertia.hpp"

namespace infotrans {

// Geodesic evolution in momentum form: m = A u,
//   dm_i/dt = -sum_j u_j d_j m_i - sum_j m_j d_i u_j - m_i div(u),
// stepped with classical RK4; u = A^{-1} m at every stage. All quadratic
// products are dealiased, which keeps energy exact in the semi-discrete
// system (measured drift isolates the time integrator).
struct EvolveOptions {
    double dt = 1e-3;
    double T = 1.0;
    int store_every = 1;        // stored spacing is store_every * dt
    double blowup_threshold = 1e6;
};

struct Trajectory {
    Grid grid;
    MetricParams params;
    double dt = 0.0;            // spacing of the stored samples
    std::vector<double> times;  // 0, dt, 2 dt, ...
    std::vector<VectorField> u;
    std::vector<VectorField> m;
};

VectorField momentum_rhs(const VectorField& u, const VectorField& m);

Trajectory evolve(const VectorField& u0, const MetricParams& p, const EvolveOptions& opt);

// 1-D only: max-norm residual of
//   d/dt u_xx + 2 u_x u_xx + u u_xxx - 2 mu(u) u_x / beta
// over interior stored times, with d/dt by central differences.
double muhs_residual(const Trajectory& traj);

// mu(u) = integrate(u) on the circle; conserved along solutions.
double mu_functional(const VectorField& u);

// Particle flow of the stored velocity: zeta(T) with zeta' = u(t) o zeta,
// RK4 over stored intervals, cubic time interpolation between samples.
DiffeoMap flow_map(const Trajectory& traj);

struct ComponentDiagnostics {
    std::vector<double> times;
    std::vector<double> harmonic_norm;
    std::vector<double> divfree_norm;
    std::vector<double> gradient_norm;
    std::vector<double> energy;
};

ComponentDiagnostics component_diagnostics(const Trajectory& traj);

} // namespace infotrans
