#include "infotrans/inertia.hpp"

#include <cmath>

namespace infotrans {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Per mode k != 0 the operator acts as
//   grad direction (parallel to k):  lambda_g = beta |2 pi k|^2
//   complement     (normal to k):    lambda_d = (1-gamma) + alpha |2 pi k|^2
// and as the identity on k = 0. inverse = true swaps in the reciprocals.
// Both scalings are even in k, so the half-spectrum layout is safe.
void apply_diagonal(std::vector<Spectrum>& comp, const Grid& g, const MetricParams& p,
                    bool inverse) {
    auto grad_scale = [&](double k2) {
        double lam = p.beta * kTwoPi * kTwoPi * k2;
        return inverse ? 1.0 / lam : lam;
    };
    auto div_scale = [&](double k2) {
        double lam = (1.0 - p.gamma) + p.alpha * kTwoPi * kTwoPi * k2;
        return inverse ? 1.0 / lam : lam;
    };

    if (g.dim == 1) {
        int half = g.sizes[0] / 2;
        for (int k = 1; k <= half; ++k) comp[0].c[k] *= grad_scale(double(k) * k);
        return;
    }

    int n0 = g.sizes[0], half1 = g.sizes[1] / 2;
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n0; ++i0) {
        int k0 = i0 <= n0 / 2 ? i0 : i0 - n0;
        for (int k1 = 0; k1 <= half1; ++k1, ++idx) {
            double k2 = double(k0) * k0 + double(k1) * k1;
            if (k2 == 0.0) continue;
            std::complex<double> u0 = comp[0].c[idx];
            std::complex<double> u1 = comp[1].c[idx];
            // split u into the k-parallel (gradient) and normal parts
            std::complex<double> dot = (double(k0) * u0 + double(k1) * u1) / k2;
            std::complex<double> g0 = dot * double(k0);
            std::complex<double> g1 = dot * double(k1);
            double lg = grad_scale(k2), ld = div_scale(k2);
            comp[0].c[idx] = lg * g0 + ld * (u0 - g0);
            comp[1].c[idx] = lg * g1 + ld * (u1 - g1);
        }
    }
}

VectorField apply_op(const VectorField& u, const MetricParams& p, bool inverse) {
    validate(p);
    const Grid& g = u.grid();
    std::vector<Spectrum> comp;
    for (int c = 0; c < g.dim; ++c) comp.push_back(analyze(u[c]));
    apply_diagonal(comp, g, p, inverse);
    VectorField out(g);
    for (int c = 0; c < g.dim; ++c) out[c] = synthesize(comp[c]);
    return out;
}

} // namespace

void validate(const MetricParams& p) {
    if (!(p.alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(p.beta > 0.0))
        throw ValidationError("beta must be positive: the gradient block degenerates at beta = 0");
    if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw ValidationError("gamma must lie in [0,1]");
}

VectorField apply_inertia(const VectorField& u, const MetricParams& p) {
    return apply_op(u, p, false);
}

VectorField apply_inertia_inverse(const VectorField& m, const MetricParams& p) {
    return apply_op(m, p, true);
}

double energy(const VectorField& u, const MetricParams& p) {
    return inner(apply_inertia(u, p), u);
}

EnergySplit split_energy(const VectorField& u, const MetricParams& p) {
    validate(p);
    EnergySplit out;
    ScalarField du = divergence(u);
    out.fisher_part = p.beta * inner(du, du);

    // independent route for the orthogonal part: strip the gradient component
    // and pair what is left with the operator
    HodgeComponents h = hodge_decompose(u);
    VectorField rest = u - gradient(h.potential);
    out.h_part = inner(apply_inertia(rest, p), rest);
    return out;
}

} // namespace infotrans
