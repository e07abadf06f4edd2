#pragma once

#include "infotrans/grid.hpp"
#include "infotrans/spectral.hpp"

namespace infotrans {

// Parameters of the alpha-beta-gamma inner product on vector fields:
//   <u,v> = <h_u, h_v> + (1-gamma)<xi_u, xi_v> + alpha <curl xi_u, curl xi_v>
//         + beta <div u, div v>
// written against the Hodge split u = h + xi + grad(f). alpha, beta > 0,
// gamma in [0,1]; beta = 0 is rejected (it would kill the gradient modes).
struct MetricParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.0;
};

void validate(const MetricParams& p);

// The inertia operator is Fourier-diagonal: per mode k != 0 the projection
// onto k (gradient direction) is scaled by beta*|2 pi k|^2 and the
// complement by (1-gamma) + alpha*|2 pi k|^2; the k = 0 block is identity.
VectorField apply_inertia(const VectorField& u, const MetricParams& p);
VectorField apply_inertia_inverse(const VectorField& m, const MetricParams& p);

// <A u, u> by grid quadrature.
double energy(const VectorField& u, const MetricParams& p);

// energy split into the part that descends to the density side
// (fisher_part = beta * ||div u||^2) and the orthogonal remainder.
// The two parts are computed independently and sum to energy().
struct EnergySplit {
    double h_part = 0.0;
    double fisher_part = 0.0;
};

EnergySplit split_energy(const VectorField& u, const MetricParams& p);

} // namespace infotrans
