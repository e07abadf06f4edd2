#pragma once

#include <complex>
#include <vector>

#include "infotrans/grid.hpp"

namespace infotrans {

// Fourier coefficients of a real field in half-plane layout:
// 1-D: n/2+1 entries, index k1 = 0..n/2;
// 2-D: sizes[0] x (sizes[1]/2+1), axis-0 index wraps to negative wavenumbers.
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> c;
};

Spectrum analyze(const ScalarField& f);
ScalarField synthesize(const Spectrum& s);

// Integer wavenumber of axis-0 index; Nyquist maps to -n/2.
int wavenumber(int index, int n);

// Exact derivative of a band-limited field. Odd orders zero the Nyquist mode.
ScalarField spectral_derivative(const ScalarField& f, int axis, int order = 1);
ScalarField laplacian(const ScalarField& f);

// Solves laplacian(u) = f with zero mean. The input mean must already be
// (numerically) zero: |mean| <= mean_tol * max(1, max|f|) or MeanNotZero.
ScalarField inverse_laplacian(const ScalarField& f, double mean_tol = 1e-10);

// 2/3-rule truncation: zeroes modes with |k_j| > floor((N_j-1)/3), so grid
// quadrature of triple products of truncated fields is alias-free.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& f);
int dealias_cutoff(int n);

// Periodic quadrature: mean of samples (volume of the torus is 1).
double integrate(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double l2_norm(const ScalarField& a);
double l2_norm(const VectorField& a);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
// 2-D scalar curl d/dx0 v1 - d/dx1 v0; WrongDimension in 1-D.
ScalarField curl2d(const VectorField& v);

// v = harmonic + divfree + gradient(potential), L2-orthogonal summands.
// harmonic is the componentwise mean; potential is mean-zero; divfree is the
// remainder and carries (numerically) zero divergence.
struct HodgeComponents {
    std::array<double, 2> harmonic{0.0, 0.0};
    VectorField divfree;
    ScalarField potential;
};

HodgeComponents hodge_decompose(const VectorField& v);
VectorField recompose(const HodgeComponents& h);

} // namespace infotrans
