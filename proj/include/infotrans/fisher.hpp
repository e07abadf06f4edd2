#pragma once

#include "infotrans/diffeo.hpp"
#include "infotrans/grid.hpp"

namespace infotrans {

// Smooth probability density on the torus, stored as the ratio against the
// uniform volume form: ratio > 0 pointwise and integrate(ratio) = 1 within
// 1e-10 (construction validates; normalise_density() builds one from any
// positive field).
class Density {
public:
    Density() = default;
    explicit Density(ScalarField ratio);

    static Density uniform(const Grid& g);

    const Grid& grid() const { return ratio_.grid(); }
    const ScalarField& ratio() const { return ratio_; }

private:
    ScalarField ratio_;
};

// Rescales a positive field to unit mass. Positivity is still required:
// values <= 1e-12 raise ValidationError rather than being clamped.
Density normalise_density(const ScalarField& f);

// Fisher-Rao pairing <a,b>_nu = integrate(a*b / ratio) for mean-zero
// tangents a, b (n-form coefficients against vol). |mean| above mean_tol
// raises NotTangent.
double fisher_inner(const ScalarField& a, const ScalarField& b, const Density& nu,
                    double mean_tol = 1e-10);

// Square-root lift onto the unit sphere in L2: f = sqrt(ratio).
ScalarField sqrt_lift(const Density& nu);

// Great-circle geodesic between the lifts, mapped back to densities:
//   sigma(t) = [sin((1-t)theta) f + sin(t theta) g] / sin(theta).
// theta < 1e-6 switches to the renormalised linear branch.
Density fisher_geodesic(const Density& nu0, const Density& nu1, double t);

// theta = arccos(integrate(sqrt(ratio0 * ratio1))), in [0, pi/2) for
// positive densities.
double fisher_distance(const Density& nu0, const Density& nu1);

struct PullbackStats {
    double mass_defect = 0.0; // |integrate(raw ratio) - 1| before renormalising
};

// phi^* nu = (ratio o phi) * Jac(phi) * vol; interpolation leaves a small
// mass defect which is renormalised away and reported, never hidden.
Density pullback_density(const Density& nu, const DiffeoMap& phi,
                         PullbackStats* stats = nullptr);

} // namespace infotrans
