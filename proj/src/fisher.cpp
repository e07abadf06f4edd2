#include "infotrans/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infotrans/interpolate.hpp"
#include "infotrans/parallel.hpp"

namespace infotrans {
namespace {

constexpr double kMassTol = 1e-10;
constexpr double kPositivityFloor = 1e-12;
constexpr double kSmallAngle = 1e-6;

void check_positive(const ScalarField& f, const char* what) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!(f[i] > kPositivityFloor))
            throw ValidationError(std::string(what) +
                                  " must be strictly positive; clamping is not applied");
}

} // namespace

Density::Density(ScalarField ratio) : ratio_(std::move(ratio)) {
    validate_grid(ratio_.grid());
    check_positive(ratio_, "density ratio");
    double mass = integrate(ratio_);
    if (std::abs(mass - 1.0) > kMassTol)
        throw ValidationError("density mass is " + std::to_string(mass) +
                              ", expected 1 within 1e-10; use normalise_density");
}

Density Density::uniform(const Grid& g) { return Density(ScalarField(g, 1.0)); }

Density normalise_density(const ScalarField& f) {
    check_positive(f, "density ratio");
    double mass = integrate(f);
    return Density((1.0 / mass) * f);
}

double fisher_inner(const ScalarField& a, const ScalarField& b, const Density& nu,
                    double mean_tol) {
    check_same_grid(a.grid(), nu.grid());
    check_same_grid(b.grid(), nu.grid());
    double ma = integrate(a), mb = integrate(b);
    if (std::abs(ma) > mean_tol || std::abs(mb) > mean_tol)
        throw NotTangent("tangents to the density space must have zero mean, got " +
                         std::to_string(ma) + " and " + std::to_string(mb));
    const ScalarField& rho = nu.ratio();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i] / rho[i];
    return acc / double(a.size());
}

ScalarField sqrt_lift(const Density& nu) {
    ScalarField f = nu.ratio();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sqrt(f[i]);
    return f;
}

Density fisher_geodesic(const Density& nu0, const Density& nu1, double t) {
    check_same_grid(nu0.grid(), nu1.grid());
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("geodesic parameter must be in [0,1]");
    if (t == 0.0) return nu0; // endpoints bit-exact, no sqrt round trip
    if (t == 1.0) return nu1;

    ScalarField f = sqrt_lift(nu0);
    ScalarField g = sqrt_lift(nu1);
    double c = std::clamp(inner(f, g), -1.0, 1.0);
    double theta = std::acos(c);

    ScalarField sigma(f.grid());
    if (theta < kSmallAngle) {
        // nearly identical endpoints: linear chord, renormalised onto the sphere
        for (std::size_t i = 0; i < sigma.size(); ++i)
            sigma[i] = (1.0 - t) * f[i] + t * g[i];
        double norm2 = inner(sigma, sigma);
        double scale = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] *= scale;
    } else {
        double s = std::sin(theta);
        if (s < 1e-12)
            throw DegenerateAngle("geodesic between (anti)podal points is not unique");
        double wf = std::sin((1.0 - t) * theta) / s;
        double wg = std::sin(t * theta) / s;
        for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = wf * f[i] + wg * g[i];
    }

    ScalarField ratio(sigma.grid());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = sigma[i] * sigma[i];
    // spherical combination preserves mass to round-off; rescale the last ulps
    double mass = integrate(ratio);
    return Density((1.0 / mass) * ratio);
}

double fisher_distance(const Density& nu0, const Density& nu1) {
    check_same_grid(nu0.grid(), nu1.grid());
    const ScalarField& r0 = nu0.ratio();
    const ScalarField& r1 = nu1.ratio();
    double acc = 0.0;
    for (std::size_t i = 0; i < r0.size(); ++i) acc += std::sqrt(r0[i] * r1[i]);
    double c = std::clamp(acc / double(r0.size()), -1.0, 1.0);
    return std::acos(c);
}

Density pullback_density(const Density& nu, const DiffeoMap& phi, PullbackStats* stats) {
    check_same_grid(nu.grid(), phi.grid());
    const Grid& g = nu.grid();

    SplineInterpolant interp(nu.ratio());
    std::vector<Point> pts = phi.forward_grid();
    ScalarField jac = phi.jacobian();

    ScalarField raw(g);
    parallel_for(g.points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) raw[i] = interp(pts[i]) * jac[i];
    });

    check_positive(raw, "pulled-back density");
    double mass = integrate(raw);
    if (stats) stats->mass_defect = std::abs(mass - 1.0);
    return Density((1.0 / mass) * raw);
}

} // namespace infotrans
