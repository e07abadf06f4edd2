#include "infotrans/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infotrans/interpolate.hpp"
#include "infotrans/parallel.hpp"
#include "infotrans/spectral.hpp"

namespace infotrans {
namespace {

constexpr double kSmallAngle = 1e-6;

void validate_sqrt_target(const ScalarField& s) {
    validate_grid(s.grid());
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s[i] > 0.0))
            throw ValidationError("lift coordinate must be strictly positive");
    double norm2 = inner(s, s);
    if (std::abs(norm2 - 1.0) > 1e-8)
        throw ValidationError("lift coordinate must have unit L2 norm, got norm^2 = " +
                              std::to_string(norm2));
}

// sigma(t) and sigma'(t) along the great circle from 1 to s.
struct CircleArc {
    double theta;
    const ScalarField* s;

    void eval(double t, ScalarField& sigma, ScalarField& dsigma) const {
        const ScalarField& sf = *s;
        sigma = ScalarField(sf.grid());
        dsigma = ScalarField(sf.grid());
        if (theta < kSmallAngle) {
            for (std::size_t i = 0; i < sf.size(); ++i) {
                sigma[i] = 1.0 + t * (sf[i] - 1.0);
                dsigma[i] = sf[i] - 1.0;
            }
            return;
        }
        double sn = std::sin(theta);
        double a = std::sin((1.0 - t) * theta) / sn;
        double b = std::sin(t * theta) / sn;
        double da = -theta * std::cos((1.0 - t) * theta) / sn;
        double db = theta * std::cos(t * theta) / sn;
        for (std::size_t i = 0; i < sf.size(); ++i) {
            sigma[i] = a + b * sf[i];
            dsigma[i] = da + db * sf[i];
        }
    }
};

} // namespace

double compute_theta(const ScalarField& sqrt_target) {
    validate_sqrt_target(sqrt_target);
    double c = std::clamp(integrate(sqrt_target), -1.0, 1.0);
    return std::acos(c);
}

ScalarField solve_w0_from_sqrt(const ScalarField& s) {
    double theta = compute_theta(s);
    ScalarField rhs(s.grid());
    if (theta < kSmallAngle) {
        for (std::size_t i = 0; i < s.size(); ++i) rhs[i] = 2.0 * (s[i] - 1.0);
    } else {
        double c = std::cos(theta), sn = std::sin(theta);
        for (std::size_t i = 0; i < s.size(); ++i)
            rhs[i] = 2.0 * theta * (s[i] - c) / sn;
    }
    // solvable by construction: mean(s) = cos(theta) up to rounding
    return inverse_laplacian(rhs);
}

ScalarField solve_w0(const DiffeoMap& phi) {
    ScalarField s = phi.jacobian();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0.0)) throw NotDiffeo("map Jacobian is not positive");
        s[i] = std::sqrt(s[i]);
    }
    return solve_w0_from_sqrt(s);
}

LiftResult lift_geodesic(const ScalarField& sqrt_target, const LiftOptions& opt) {
    if (opt.steps < 1) throw ValidationError("lift needs at least one step");
    if (opt.store_every < 1 || opt.steps % opt.store_every != 0)
        throw ValidationError("store_every must be >= 1 and divide steps");
    if (opt.reanchor_every < 1) throw ValidationError("reanchor_every must be >= 1");
    validate_sqrt_target(sqrt_target);

    const Grid& g = sqrt_target.grid();
    CircleArc arc{compute_theta(sqrt_target), &sqrt_target};

    LiftResult out;
    out.theta = arc.theta;

    VectorField dz(g);   // zeta displacement
    VectorField dpsi(g); // advected inverse displacement
    double h = 1.0 / opt.steps;

    ScalarField sigma, dsigma;
    double step_mean = 0.0;

    // one stage of the coupled system; also reports w for diagnostics
    auto stage = [&](double t, const VectorField& z, const VectorField& psi,
                     VectorField& zdot, VectorField& psidot, ScalarField* w_out) {
        arc.eval(t, sigma, dsigma);
        ScalarField ft(g);
        for (std::size_t i = 0; i < ft.size(); ++i) {
            if (!(sigma[i] > 0.0))
                throw NumericalError("geodesic left the positive cone at t = " + std::to_string(t));
            ft[i] = 2.0 * dsigma[i] / sigma[i];
        }
        SplineInterpolant ft_interp(ft);

        // Poisson source: f o zeta^{-1}, mean projected out (and accounted)
        ScalarField rhs(g);
        parallel_for(g.points(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                Point x = grid_point(g, i);
                rhs[i] = ft_interp(x[0] + psi[0][i], g.dim == 2 ? x[1] + psi[1][i] : 0.0);
            }
        });
        double mean = integrate(rhs);
        if (std::abs(mean) > opt.mean_alarm)
            throw NumericalError("transport source lost solvability: mean " +
                                 std::to_string(mean));
        step_mean = std::max(step_mean, std::abs(mean));
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= mean;

        ScalarField w = inverse_laplacian(rhs);
        VectorField gw = dealias(gradient(w));
        if (w_out) *w_out = w;

        // zeta' = grad(w) o zeta
        zdot = VectorField(g);
        for (int c = 0; c < g.dim; ++c) {
            SplineInterpolant gw_interp(gw[c]);
            parallel_for(g.points(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    Point x = grid_point(g, i);
                    zdot[c][i] = gw_interp(x[0] + z[0][i], g.dim == 2 ? x[1] + z[1][i] : 0.0);
                }
            });
        }

        // psi' = -(I + D dpsi) grad(w), all on the grid
        psidot = VectorField(g);
        if (g.dim == 1) {
            ScalarField dp = spectral_derivative(psi[0], 0, 1);
            for (std::size_t i = 0; i < dp.size(); ++i)
                psidot[0][i] = -(1.0 + dp[i]) * gw[0][i];
        } else {
            ScalarField p00 = spectral_derivative(psi[0], 0, 1);
            ScalarField p01 = spectral_derivative(psi[0], 1, 1);
            ScalarField p10 = spectral_derivative(psi[1], 0, 1);
            ScalarField p11 = spectral_derivative(psi[1], 1, 1);
            for (std::size_t i = 0; i < g.points(); ++i) {
                psidot[0][i] = -((1.0 + p00[i]) * gw[0][i] + p01[i] * gw[1][i]);
                psidot[1][i] = -(p10[i] * gw[0][i] + (1.0 + p11[i]) * gw[1][i]);
            }
        }
    };

    auto store = [&](int step_index, const ScalarField* w) {
        out.times.push_back(double(step_index) * h);
        out.zeta.emplace_back(dz);
        out.zeta_inv.emplace_back(dpsi);
        if (w) out.potential.push_back(*w);
    };

    VectorField zd, pd, zd2, pd2, zd3, pd3, zd4, pd4;
    ScalarField w_now;

    for (int s = 0; s < opt.steps; ++s) {
        double t = double(s) * h;
        step_mean = 0.0;

        stage(t, dz, dpsi, zd, pd, &w_now);
        if (s % opt.store_every == 0) store(s, &w_now);

        VectorField z2 = dz, p2 = dpsi;
        axpy(0.5 * h, zd, z2);
        axpy(0.5 * h, pd, p2);
        stage(t + 0.5 * h, z2, p2, zd2, pd2, nullptr);

        VectorField z3 = dz, p3 = dpsi;
        axpy(0.5 * h, zd2, z3);
        axpy(0.5 * h, pd2, p3);
        stage(t + 0.5 * h, z3, p3, zd3, pd3, nullptr);

        VectorField z4 = dz, p4 = dpsi;
        axpy(h, zd3, z4);
        axpy(h, pd3, p4);
        stage(t + h, z4, p4, zd4, pd4, nullptr);

        axpy(h / 6.0, zd, dz);
        axpy(h / 3.0, zd2, dz);
        axpy(h / 3.0, zd3, dz);
        axpy(h / 6.0, zd4, dz);
        axpy(h / 6.0, pd, dpsi);
        axpy(h / 3.0, pd2, dpsi);
        axpy(h / 3.0, pd3, dpsi);
        axpy(h / 6.0, pd4, dpsi);

        out.mean_corrections.push_back(step_mean);

        if (!all_finite(dz) || !all_finite(dpsi))
            throw NumericalError("lift state became non-finite");

        // advected inverse drifts; Newton snaps it back onto zeta^{-1}
        if ((s + 1) % opt.reanchor_every == 0 || s + 1 == opt.steps)
            dpsi = invert(DiffeoMap(dz)).displacement();
    }

    // endpoint snapshot, with w extrapolated from the endpoint geometry
    stage(1.0, dz, dpsi, zd, pd, &w_now);
    store(opt.steps, &w_now);

    ScalarField jac_end = out.zeta.back().jacobian();
    double err = 0.0;
    for (std::size_t i = 0; i < jac_end.size(); ++i)
        err = std::max(err, std::abs(jac_end[i] - sqrt_target[i] * sqrt_target[i]));
    out.endpoint_error = err;
    return out;
}

Factorisation factorise(const DiffeoMap& phi, const LiftOptions& opt) {
    ScalarField s = phi.jacobian();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(s[i]);

    LiftResult lift = lift_geodesic(s, opt);

    Factorisation out;
    out.theta = lift.theta;
    out.w0 = solve_w0_from_sqrt(s);
    out.psi = lift.zeta.back();
    out.eta = compose(phi, lift.zeta_inv.back());

    ScalarField je = out.eta.jacobian();
    double vr = 0.0;
    for (std::size_t i = 0; i < je.size(); ++i) vr = std::max(vr, std::abs(je[i] - 1.0));
    out.vol_residual = vr;
    out.compose_residual = map_distance(phi, compose(out.eta, out.psi));
    out.mean_corrections = std::move(lift.mean_corrections);
    return out;
}

TransportResult density_transport(const Density& target, const LiftOptions& opt) {
    LiftResult lift = lift_geodesic(sqrt_lift(target), opt);
    TransportResult out{lift.zeta.back(), lift.theta, lift.endpoint_error,
                        std::move(lift.mean_corrections)};
    return out;
}

double horizontality_check(const LiftResult& lift) {
    std::size_t n = lift.zeta.size();
    if (n < 3) throw ValidationError("horizontality check needs at least three stored times");
    const Grid& g = lift.zeta.front().grid();
    double h = lift.times[1] - lift.times[0];

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        // velocity u = zeta' o zeta^{-1}, zeta' by central differences
        VectorField fd = lift.zeta[i + 1].displacement() - lift.zeta[i - 1].displacement();
        const VectorField& psi = lift.zeta_inv[i].displacement();
        VectorField u(g);
        for (int c = 0; c < g.dim; ++c) {
            SplineInterpolant interp(fd[c]);
            parallel_for(g.points(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t p = lo; p < hi; ++p) {
                    Point x = grid_point(g, p);
                    u[c][p] = interp(x[0] + psi[0][p], g.dim == 2 ? x[1] + psi[1][p] : 0.0) /
                              (2.0 * h);
                }
            });
        }
        HodgeComponents hc = hodge_decompose(u);
        double harm2 = 0.0;
        for (int c = 0; c < g.dim; ++c) harm2 += hc.harmonic[c] * hc.harmonic[c];
        double df = l2_norm(hc.divfree);
        double total = l2_norm(u);
        if (total > 0.0) worst = std::max(worst, std::sqrt(harm2 + df * df) / total);
    }
    return worst;
}

} // namespace infotrans
