#include "infotrans/euler_arnold.hpp"

#include <cmath>
#include <string>

#include "infotrans/interpolate.hpp"
#include "infotrans/parallel.hpp"

namespace infotrans {
namespace {

void check_blowup(const VectorField& m, double threshold, double t) {
    if (!all_finite(m))
        throw BlowUp("momentum became non-finite at t = " + std::to_string(t));
    double m_inf = max_abs(m);
    if (m_inf > threshold)
        throw BlowUp("momentum max-norm " + std::to_string(m_inf) + " exceeded the blow-up fuse at t = " + std::to_string(t));
}

} // namespace

VectorField momentum_rhs(const VectorField& u, const VectorField& m) {
    check_same_grid(u.grid(), m.grid());
    const Grid& g = u.grid();
    int dim = g.dim;

    // all first derivatives of both fields
    std::vector<ScalarField> du(dim * dim), dm(dim * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            du[i * dim + j] = spectral_derivative(u[i], j, 1);
            dm[i * dim + j] = spectral_derivative(m[i], j, 1);
        }

    ScalarField div_u = du[0];
    if (dim == 2) div_u = du[0] + du[3];

    VectorField rhs(g);
    for (int i = 0; i < dim; ++i) {
        ScalarField& out = rhs[i];
        for (std::size_t p = 0; p < out.size(); ++p) {
            double acc = 0.0;
            for (int j = 0; j < dim; ++j) {
                acc -= u[j][p] * dm[i * dim + j][p]; // transport of m_i
                acc -= m[j][p] * du[j * dim + i][p]; // momentum stretching
            }
            acc -= m[i][p] * div_u[p];
            out[p] = acc;
        }
    }
    // single truncation after assembly = Galerkin projection of the whole RHS
    return dealias(rhs);
}

Trajectory evolve(const VectorField& u0, const MetricParams& p, const EvolveOptions& opt) {
    validate(p);
    validate_grid(u0.grid());
    if (!(opt.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(opt.T > 0.0)) throw ValidationError("T must be positive");
    if (opt.store_every < 1) throw ValidationError("store_every must be >= 1");
    if (!(opt.blowup_threshold > 0.0)) throw ValidationError("blow-up threshold must be positive");

    long long steps = std::llround(opt.T / opt.dt);
    if (steps < 1 || std::abs(double(steps) * opt.dt - opt.T) > 1e-9 * std::max(1.0, opt.T))
        throw ValidationError("T must be a whole number of dt steps");
    if (steps % opt.store_every != 0)
        throw ValidationError("store_every must divide the step count so the endpoint is stored");

    Trajectory traj;
    traj.grid = u0.grid();
    traj.params = p;
    traj.dt = opt.dt * opt.store_every;

    // band-limit once up front; the flow preserves the truncated space
    VectorField m = apply_inertia(dealias(u0), p);
    double dt = opt.dt;

    auto velocity = [&](const VectorField& mom) { return apply_inertia_inverse(mom, p); };

    auto store = [&](long long step, const VectorField& mom) {
        traj.times.push_back(double(step) * dt);
        traj.m.push_back(mom);
        traj.u.push_back(velocity(mom));
    };

    store(0, m);
    for (long long s = 0; s < steps; ++s) {
        VectorField k1 = momentum_rhs(velocity(m), m);

        VectorField m2 = m;
        axpy(0.5 * dt, k1, m2);
        VectorField k2 = momentum_rhs(velocity(m2), m2);

        VectorField m3 = m;
        axpy(0.5 * dt, k2, m3);
        VectorField k3 = momentum_rhs(velocity(m3), m3);

        VectorField m4 = m;
        axpy(dt, k3, m4);
        VectorField k4 = momentum_rhs(velocity(m4), m4);

        axpy(dt / 6.0, k1, m);
        axpy(dt / 3.0, k2, m);
        axpy(dt / 3.0, k3, m);
        axpy(dt / 6.0, k4, m);

        check_blowup(m, opt.blowup_threshold, double(s + 1) * dt);
        if ((s + 1) % opt.store_every == 0) store(s + 1, m);
    }
    return traj;
}

double mu_functional(const VectorField& u) {
    if (u.grid().dim != 1) throw WrongDimension("mu is the circle mean, 1-D only");
    return integrate(u[0]);
}

double muhs_residual(const Trajectory& traj) {
    if (traj.grid.dim != 1) throw WrongDimension("muHS residual is defined on the circle");
    if (traj.u.size() < 3) throw ValidationError("need at least 3 stored times");
    double h = traj.dt;
    double beta = traj.params.beta;

    std::vector<ScalarField> uxx(traj.u.size());
    for (std::size_t i = 0; i < traj.u.size(); ++i)
        uxx[i] = spectral_derivative(traj.u[i][0], 0, 2);

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.u.size(); ++i) {
        const ScalarField& u = traj.u[i][0];
        ScalarField ux = spectral_derivative(u, 0, 1);
        ScalarField uxxx = spectral_derivative(u, 0, 3);
        double mu = integrate(u);
        for (std::size_t p = 0; p < u.size(); ++p) {
            double dt_uxx = (uxx[i + 1][p] - uxx[i - 1][p]) / (2.0 * h);
            double r = dt_uxx + 2.0 * ux[p] * uxx[i][p] + u[p] * uxxx[p] -
                       2.0 * mu * ux[p] / beta;
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

DiffeoMap flow_map(const Trajectory& traj) {
    const Grid& g = traj.grid;
    std::size_t n = traj.u.size();
    if (n < 2) throw ValidationError("flow map needs at least two stored times");
    double h = traj.dt;

    // particle positions, unwrapped so the final displacement is continuous
    std::vector<Point> pos(g.points());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = grid_point(g, i);

    // cubic Lagrange weights for the half-step velocity over 4 samples
    auto midpoint_field = [&](std::size_t i) {
        VectorField mid(g);
        if (n == 2) {
            axpy(0.5, traj.u[0], mid);
            axpy(0.5, traj.u[1], mid);
            return mid;
        }
        if (n == 3) {
            // quadratic through the three samples, evaluated mid-interval
            double w[3] = {0.375, 0.75, -0.125};
            if (i == 1) {
                w[0] = -0.125;
                w[1] = 0.75;
                w[2] = 0.375;
            }
            for (int j = 0; j < 3; ++j) axpy(w[j], traj.u[j], mid);
            return mid;
        }
        std::size_t base;
        const double *w;
        static const double interior[4] = {-0.0625, 0.5625, 0.5625, -0.0625};
        static const double first[4] = {0.3125, 0.9375, -0.3125, 0.0625};
        static const double last[4] = {0.0625, -0.3125, 0.9375, 0.3125};
        if (i == 0) {
            base = 0;
            w = first;
        } else if (i + 2 >= n) {
            base = n - 4;
            w = last;
        } else {
            base = i - 1;
            w = interior;
        }
        for (int j = 0; j < 4; ++j) axpy(w[j], traj.u[base + j], mid);
        return mid;
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        VectorField mid = midpoint_field(i);

        std::vector<SplineInterpolant> s_lo, s_mid, s_hi;
        for (int c = 0; c < g.dim; ++c) {
            s_lo.emplace_back(traj.u[i][c]);
            s_mid.emplace_back(mid[c]);
            s_hi.emplace_back(traj.u[i + 1][c]);
        }

        parallel_for(pos.size(), [&](std::size_t lo, std::size_t hi_) {
            for (std::size_t p = lo; p < hi_; ++p) {
                Point x = pos[p];
                double k1[2] = {0, 0}, k2[2] = {0, 0}, k3[2] = {0, 0}, k4[2] = {0, 0};
                for (int c = 0; c < g.dim; ++c) k1[c] = s_lo[c](x[0], x[1]);
                for (int c = 0; c < g.dim; ++c)
                    k2[c] = s_mid[c](x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]);
                for (int c = 0; c < g.dim; ++c)
                    k3[c] = s_mid[c](x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]);
                for (int c = 0; c < g.dim; ++c)
                    k4[c] = s_hi[c](x[0] + h * k3[0], x[1] + h * k3[1]);
                for (int c = 0; c < g.dim; ++c)
                    pos[p][c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
        });
    }

    VectorField disp(g);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        Point x = grid_point(g, i);
        for (int c = 0; c < g.dim; ++c) disp[c][i] = pos[i][c] - x[c];
    }
    return DiffeoMap(std::move(disp));
}

ComponentDiagnostics component_diagnostics(const Trajectory& traj) {
    ComponentDiagnostics d;
    for (std::size_t i = 0; i < traj.u.size(); ++i) {
        const VectorField& u = traj.u[i];
        HodgeComponents h = hodge_decompose(u);
        double hn = 0.0;
        for (int c = 0; c < traj.grid.dim; ++c) hn += h.harmonic[c] * h.harmonic[c];
        d.times.push_back(traj.times[i]);
        d.harmonic_norm.push_back(std::sqrt(hn));
        d.divfree_norm.push_back(l2_norm(h.divfree));
        d.gradient_norm.push_back(l2_norm(gradient(h.potential)));
        d.energy.push_back(energy(u, traj.params));
    }
    return d;
}

} // namespace infotrans
