#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "infotrans/diffeo.hpp"
#include "infotrans/euler_arnold.hpp"
#include "infotrans/field_io.hpp"
#include "infotrans/fisher.hpp"
#include "infotrans/inertia.hpp"
#include "infotrans/interpolate.hpp"
#include "infotrans/matrix_transport.hpp"
#include "infotrans/rng.hpp"
#include "infotrans/spectral.hpp"
#include "infotrans/transport.hpp"

namespace infotrans::cli {
namespace {

constexpr double tau = 2.0 * std::numbers::pi;

struct Checker {
    const Emit& emit;
    int failures = 0;

    // value <= threshold
    void le(const std::string& name, double value, double threshold) {
        record(name, value, threshold, value <= threshold);
    }
    // strict upper bound (open diameter-type bounds)
    void lt(const std::string& name, double value, double threshold) {
        record(name, value, threshold, value < threshold);
    }
    // lower bound (positivity)
    void ge(const std::string& name, double value, double threshold) {
        record(name, value, threshold, value >= threshold);
    }

private:
    void record(const std::string& name, double value, double threshold, bool pass) {
        emit({{"event", "check"},
              {"name", name},
              {"value", value},
              {"threshold", threshold},
              {"pass", pass}});
        if (!pass) ++failures;
    }
};

double rel(double num, double den) { return num / (den + 1e-300); }

Mat near_identity_gl(int n, Rng& rng, double scale = 0.15) {
    return mat_add(mat_identity(n), random_matrix(n, rng, scale / std::sqrt(double(n))));
}

Mat random_symmetric(int n, Rng& rng) {
    Mat G = random_matrix(n, rng);
    return mat_scale(0.5, mat_add(G, mat_transpose(G)));
}

void spectral_checks(Checker& ck, Rng& rng) {
    {
        Grid g = make_grid(256);
        ScalarField f = random_smooth_scalar(g, rng, 8);
        ScalarField r = synthesize(analyze(f));
        ck.le("spectral.roundtrip_1d", rel(max_abs(r - f), max_abs(f)), 1e-12);
    }
    {
        Grid g = make_grid(32, 32);
        ScalarField f = random_smooth_scalar(g, rng, 8);
        ScalarField r = synthesize(analyze(f));
        ck.le("spectral.roundtrip_2d", rel(max_abs(r - f), max_abs(f)), 1e-12);
    }
    {
        Grid g = make_grid(64);
        ScalarField f = sample(g, [](double x, double) { return std::sin(tau * x); });
        ScalarField d = spectral_derivative(f, 0);
        ScalarField want = sample(g, [](double x, double) { return tau * std::cos(tau * x); });
        ck.le("spectral.derivative", max_abs(d - want), 1e-9);
    }
    {
        Grid g = make_grid(64);
        ScalarField f = random_smooth_scalar(g, rng, 6, 1.0, /*zero_mean=*/true);
        ScalarField r = laplacian(inverse_laplacian(f));
        ck.le("spectral.inverse_laplacian", rel(max_abs(r - f), max_abs(f)), 1e-10);
    }
    {
        Grid g = make_grid(32, 32);
        VectorField v = random_smooth_vector(g, rng, 6);
        HodgeComponents h = hodge_decompose(v);
        ck.le("spectral.hodge_recompose", max_abs(recompose(h) - v), 1e-12);
        VectorField gp = gradient(h.potential);
        double ip = std::abs(inner(gp, h.divfree));
        ck.le("spectral.hodge_orthogonal", rel(ip, l2_norm(gp) * l2_norm(h.divfree)), 1e-10);
    }
}

void inertia_checks(Checker& ck, Rng& rng) {
    MetricParams p{1.3, 0.7, 0.4};
    {
        double worst = 0.0;
        for (const Grid& g : {make_grid(128), make_grid(32, 32)}) {
            VectorField u = random_smooth_vector(g, rng, 6);
            VectorField r = apply_inertia_inverse(apply_inertia(u, p), p);
            worst = std::max(worst, rel(max_abs(r - u), max_abs(u)));
        }
        ck.le("inertia.roundtrip", worst, 1e-10);
    }
    {
        Grid g = make_grid(32, 32);
        VectorField u = random_smooth_vector(g, rng, 6);
        VectorField v = random_smooth_vector(g, rng, 6);
        double a = inner(apply_inertia(u, p), v);
        double b = inner(u, apply_inertia(v, p));
        ck.le("inertia.symmetric", rel(std::abs(a - b), std::abs(a) + std::abs(b)), 1e-12);
    }
    {
        double worst = 2.0;
        for (int c = 0; c < 5; ++c) {
            Grid g = c % 2 ? make_grid(64) : make_grid(16, 16);
            VectorField u = random_smooth_vector(g, rng, 4);
            double n2 = inner(u, u);
            worst = std::min(worst, energy(u, p) / n2);
        }
        ck.ge("inertia.positive", worst, 1e-12);
    }
    {
        Grid g = make_grid(32, 32);
        VectorField u = random_smooth_vector(g, rng, 6);
        EnergySplit s = split_energy(u, p);
        double e = energy(u, p);
        ck.le("inertia.split_energy", rel(std::abs(s.h_part + s.fisher_part - e), e), 1e-10);
    }
}

void evolve_checks(Checker& ck, Rng& rng) {
    (void)rng;
    {
        Grid g = make_grid(128);
        VectorField u0 = sample_vector(g, [](double x, double) {
            return std::array<double, 2>{0.1 * tau * std::cos(tau * x), 0.0};
        });
        Trajectory traj = evolve(u0, MetricParams{}, {1e-3, 0.2, 20, 1e6});
        double e0 = energy(traj.u.front(), traj.params);
        double drift = 0.0;
        for (const VectorField& u : traj.u)
            drift = std::max(drift, std::abs(energy(u, traj.params) - e0) / e0);
        ck.le("evolve.energy_drift", drift, 5e-9);

        ComponentDiagnostics diag = component_diagnostics(traj);
        double worst = 0.0;
        for (std::size_t i = 0; i < diag.times.size(); ++i)
            worst = std::max(worst, diag.divfree_norm[i]);
        ck.le("evolve.gradient_invariant_1d", rel(worst, diag.gradient_norm.front()), 1e-8);
    }
    {
        Grid g = make_grid(128);
        VectorField u0 = sample_vector(g, [](double x, double) {
            return std::array<double, 2>{0.05 + 0.1 * std::sin(tau * x), 0.0};
        });
        Trajectory traj = evolve(u0, MetricParams{}, {1e-3, 0.2, 1, 1e6});
        double mu0 = mu_functional(traj.u.front());
        double drift = 0.0;
        for (const VectorField& u : traj.u)
            drift = std::max(drift, std::abs(mu_functional(u) - mu0));
        ck.le("evolve.mu_conserved", drift, 1e-12);
        ck.le("evolve.muhs_residual", muhs_residual(traj), 1e-4);
    }
    {
        Grid g = make_grid(32, 32);
        ScalarField w = sample(g, [](double x0, double x1) {
            return 0.1 * std::sin(tau * x0) * std::sin(tau * x1) / tau;
        });
        Trajectory traj = evolve(gradient(w), MetricParams{}, {2e-3, 0.1, 10, 1e6});
        ComponentDiagnostics diag = component_diagnostics(traj);
        double worst = 0.0;
        for (double d : diag.divfree_norm) worst = std::max(worst, d);
        ck.le("evolve.gradient_invariant_2d", rel(worst, diag.gradient_norm.front()), 1e-8);
    }
    {
        // gradient initial data: the geodesic's particle flow must land on the
        // transport lift's endpoint, with no free parameters anywhere
        Grid g = make_grid(64);
        Density target = normalise_density(
            sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(tau * x); }));
        ScalarField s = sqrt_lift(target);
        ScalarField w0 = solve_w0_from_sqrt(s);
        Trajectory traj = evolve(gradient(w0), MetricParams{}, {2e-3, 1.0, 5, 1e6});
        DiffeoMap flow = flow_map(traj);
        LiftOptions lo;
        lo.steps = 100;
        lo.store_every = 100;
        LiftResult lift = lift_geodesic(s, lo);
        ck.le("evolve.flow_matches_lift", map_distance(flow, lift.zeta.back()), 5e-3);
    }
}

void fisher_checks(Checker& ck, Rng& rng) {
    {
        Grid g = make_grid(256);
        Density nu = normalise_density(
            sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(tau * x); }));
        double theta = fisher_distance(Density::uniform(g), nu);
        // quadrature oracle for arccos of the sine-density overlap integral
        ck.le("fisher.distance_oracle", std::abs(theta - 0.18277746193028786), 1e-8);
    }
    {
        Grid g = make_grid(64);
        double violation = 0.0;
        double diameter = 0.0;
        for (int c = 0; c < 10; ++c) {
            Density a = random_density(g, rng);
            Density b = random_density(g, rng);
            Density d = random_density(g, rng);
            double ab = fisher_distance(a, b);
            double bd = fisher_distance(b, d);
            double ad = fisher_distance(a, d);
            violation = std::max(violation, ad - ab - bd);
            diameter = std::max({diameter, ab, bd, ad});
        }
        ck.le("fisher.triangle", std::max(violation, 0.0), 1e-11);
        ck.lt("fisher.diameter", diameter, std::numbers::pi / 2.0);
    }
    {
        Grid g = make_grid(64);
        Density nu0 = random_density(g, rng);
        Density nu1 = random_density(g, rng);
        double end0 = max_abs(fisher_geodesic(nu0, nu1, 0.0).ratio() - nu0.ratio());
        double end1 = max_abs(fisher_geodesic(nu0, nu1, 1.0).ratio() - nu1.ratio());
        ck.le("fisher.geodesic_endpoint", std::max(end0, end1), 0.0);

        double mass = 0.0;
        for (double t : {0.25, 0.5, 0.75})
            mass = std::max(mass,
                            std::abs(integrate(fisher_geodesic(nu0, nu1, t).ratio()) - 1.0));
        ck.le("fisher.geodesic_mass", mass, 1e-12);
    }
    {
        Grid g = make_grid(128);
        Density nu0 = Density::uniform(g);
        Density nu1 = normalise_density(
            sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(tau * x); }));
        double theta = fisher_distance(nu0, nu1);
        int segs = 32;
        double length = 0.0;
        Density prev = nu0;
        for (int i = 1; i <= segs; ++i) {
            Density cur = fisher_geodesic(nu0, nu1, double(i) / segs);
            length += fisher_distance(prev, cur);
            prev = cur;
        }
        ck.le("fisher.geodesic_length", std::abs(length - theta), 1e-4);
    }
    {
        Grid g = make_grid(128);
        Density nu0 = random_density(g, rng);
        Density nu1 = random_density(g, rng);
        DiffeoMap phi = random_diffeo(g, rng);
        double before = fisher_distance(nu0, nu1);
        double after = fisher_distance(pullback_density(nu0, phi), pullback_density(nu1, phi));
        ck.le("fisher.pullback_invariance", std::abs(after - before), 1e-5);
    }
}

void transport_checks(Checker& ck, Rng& rng) {
    (void)rng;
    {
        Grid g = make_grid(64);
        Density target = normalise_density(
            sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(tau * x); }));
        LiftOptions lo;
        lo.steps = 100;
        LiftResult lift = lift_geodesic(sqrt_lift(target), lo);
        ck.le("transport.lift_endpoint", lift.endpoint_error, 5e-4);
        ck.le("transport.horizontality", horizontality_check(lift), 1e-4);
    }
    {
        Grid g = make_grid(32, 32);
        VectorField d = sample_vector(g, [](double, double x1) {
            return std::array<double, 2>{0.05 * std::sin(tau * x1), 0.0};
        });
        LiftOptions lo;
        lo.steps = 20;
        lo.store_every = 20;
        Factorisation f = factorise(DiffeoMap(d), lo);
        double worst = std::max({f.vol_residual, f.compose_residual,
                                 max_abs(f.psi.displacement())});
        ck.le("transport.volume_preserving", worst, 1e-10);
    }
    {
        Grid g = make_grid(48, 48);
        VectorField d = sample_vector(g, [](double x0, double x1) {
            return std::array<double, 2>{0.07 * std::sin(tau * x0),
                                         0.07 * std::sin(tau * x1 + std::numbers::pi / 3)};
        });
        LiftOptions lo;
        lo.steps = 100;
        lo.store_every = 100;
        Factorisation f = factorise(DiffeoMap(d), lo);
        ck.le("transport.factorise_generic", std::max(f.vol_residual, f.compose_residual), 5e-3);
    }
    {
        Grid g = make_grid(48, 48);
        Density target = normalise_density(sample(g, [](double x0, double x1) {
            return 1.0 + 0.3 * std::cos(tau * x0) * std::cos(tau * x1);
        }));
        LiftOptions lo;
        lo.steps = 100;
        lo.store_every = 100;
        TransportResult tr = density_transport(target, lo);
        PullbackStats stats;
        pullback_density(Density::uniform(g), tr.psi, &stats);
        ck.le("transport.pullback_mass", stats.mass_defect, 1e-6);
    }
}

void matrix_extra_checks(Checker& ck, Rng& rng) {
    {
        double worst = 0.0;
        for (int c = 0; c < 200; ++c) {
            int n = 2 + int(rng.next() % 5);
            Mat xi = random_skew(n, rng);
            Mat v = random_upper(n, rng);
            worst = std::max(worst,
                             rel(std::abs(gl_metric_identity(xi, v)),
                                 frobenius(xi) * frobenius(v)));
        }
        ck.le("matrix.orthogonal_complement", worst, 1e-14);
    }
    {
        Rng local(rng.next());
        Mat u0 = mat_scale(0.3, random_upper(3, local));
        UppTrajectory traj = euler_arnold_upp(u0, 1.0, 1e-3);
        ck.le("matrix.upp_energy_drift", traj.energy_drift, 1e-8);
        double low = 0.0;
        for (const Mat& R : traj.R)
            for (int i = 1; i < R.n; ++i)
                for (int j = 0; j < i; ++j) low = std::max(low, std::abs(R(i, j)));
        ck.le("matrix.upp_stays_upper", low, 1e-12);
    }
    {
        double worst = 0.0;
        for (int n : {2, 3}) {
            Mat A = near_identity_gl(n, rng, 0.15);
            Mat M = mat_mul(mat_transpose(A), A);
            ShootResult shot = geodesic_shoot_qr(M);
            QrResult qr = qr_polar_factorise(A);
            worst = std::max(worst, frobenius(mat_add(shot.R1, mat_scale(-1.0, qr.R))));
        }
        ck.le("matrix.shoot_matches_qr", worst, 1e-8);
    }
}

void io_checks(Checker& ck, Rng& rng) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "infotrans-selftest";
    fs::create_directories(dir);

    {
        Grid g = make_grid(64);
        ScalarField f = random_smooth_scalar(g, rng, 5);
        write_csv(dir / "f.csv", f);
        ScalarField r = read_csv_field(dir / "f.csv");
        ck.le("io.csv_roundtrip", max_abs(r - f), 0.0);
    }
    {
        Grid g = make_grid(16, 16);
        VectorField v = random_smooth_vector(g, rng, 4);
        write_binary(dir / "v.bin", v);
        VectorField r = as_vector(read_binary(dir / "v.bin"));
        ck.le("io.binary_roundtrip", max_abs(r - v), 0.0);
    }
    {
        Grid g = make_grid(32, 32);
        ScalarField f = random_smooth_scalar(g, rng, 4);
        write_pgm(dir / "f.pgm", f, 16);
        ScalarField r = read_pgm(dir / "f.pgm");
        double range = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) range = std::max(range, std::abs(f[i]));
        ck.le("io.pgm_roundtrip", max_abs(r - f), 2.0 * range / 65535.0);
    }
    {
        Grid g = make_grid(128);
        ScalarField f = sample(g, [](double x, double) { return std::sin(tau * x); });
        SplineInterpolant s(f);
        double node = 0.0;
        for (int i = 0; i < 128; ++i)
            node = std::max(node, std::abs(s(double(i) / 128) - f[std::size_t(i)]));
        ck.le("interp.spline_nodes", node, 1e-13);
        double off = 0.0;
        Rng local(rng.next());
        for (int c = 0; c < 1000; ++c) {
            double x = local.uniform();
            off = std::max(off, std::abs(s(x) - std::sin(tau * x)));
        }
        ck.le("interp.spline_offgrid", off, 1e-6);
    }
    {
        Grid g = make_grid(64);
        DiffeoMap phi = random_diffeo(g, rng);
        DiffeoMap inv = invert(phi);
        ck.le("diffeo.inverse_residual",
              map_distance(compose(phi, inv), DiffeoMap::identity(g)), 1e-5);
    }
    {
        Rng a(12345), b(12345);
        double diff = 0.0;
        for (int c = 0; c < 100; ++c) diff = std::max(diff, std::abs(a.normal() - b.normal()));
        ck.le("rng.reproducible", diff, 0.0);
    }
}

} // namespace

int run_matrix_check(std::uint64_t seed, int cases, const Emit& emit) {
    if (cases < 1) throw ValidationError("case count must be positive");
    Checker ck{emit};
    Rng rng(seed);

    {
        double worst = 0.0;
        for (int c = 0; c < cases; ++c) {
            int n = 2 + int(rng.next() % 5);
            Mat U = random_matrix(n, rng);
            Mat V = random_matrix(n, rng);
            Mat A = near_identity_gl(n, rng);
            Mat B = near_identity_gl(n, rng);
            double lhs = gl_metric(mat_mul(A, B), mat_mul(U, B), mat_mul(V, B));
            double rhs = gl_metric(A, U, V);
            double scale = std::sqrt(gl_metric(A, U, U) * gl_metric(A, V, V));
            worst = std::max(worst, rel(std::abs(lhs - rhs), scale));
        }
        ck.le("matrix.gl_right_invariance", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int c = 0; c < cases; ++c) {
            int n = 4;
            Mat M = random_spd(n, rng);
            Mat U = random_symmetric(n, rng);
            Mat V = random_symmetric(n, rng);
            Mat A = near_identity_gl(n, rng);
            Mat At = mat_transpose(A);
            double lhs = sym_metric(mat_mul(At, mat_mul(M, A)), mat_mul(At, mat_mul(U, A)),
                                    mat_mul(At, mat_mul(V, A)));
            double rhs = sym_metric(M, U, V);
            double scale = std::sqrt(sym_metric(M, U, U) * sym_metric(M, V, V));
            worst = std::max(worst, rel(std::abs(lhs - rhs), scale));
        }
        ck.le("matrix.sym_invariance", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int c = 0; c < cases; ++c) {
            int n = 2 + int(rng.next() % 5);
            Mat u = random_upper(n, rng);
            Mat v = random_upper(n, rng);
            Mat xi = random_skew(n, rng);
            double scale = frobenius(u) * frobenius(v) * frobenius(xi);
            worst = std::max(worst, rel(check_descending(u, v, xi), scale));
        }
        ck.le("matrix.descending", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int c = 0; c < cases; ++c) {
            int n = 2 + int(rng.next() % 5);
            Mat A = random_matrix(n, rng);
            QrResult qr = qr_polar_factorise(A);
            Mat qtq = mat_mul(mat_transpose(qr.Q), qr.Q);
            double ortho = frobenius(mat_add(qtq, mat_scale(-1.0, mat_identity(n))));
            double recon = frobenius(mat_add(A, mat_scale(-1.0, mat_mul(qr.Q, qr.R)))) /
                           frobenius(A);
            double bad = 0.0;
            for (int i = 0; i < n; ++i) {
                if (!(qr.R(i, i) > 0.0)) bad = 1.0;
                for (int j = 0; j < i; ++j) bad = std::max(bad, std::abs(qr.R(i, j)));
            }
            if (mat_det(A) > 0.0 && mat_det(qr.Q) < 0.0) bad = 1.0;
            double m = mat_det(A) == 0.0 ? 1.0 : 0.0;
            worst = std::max({worst, ortho, recon, bad, m});
        }
        ck.le("matrix.qr_invariants", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int c = 0; c < cases; ++c) {
            Mat A = near_identity_gl(5, rng, 0.5);
            Mat M = mat_mul(mat_transpose(A), A);
            Mat L = cholesky(M);
            Mat Rt = mat_transpose(qr_polar_factorise(A).R);
            worst = std::max(worst,
                             frobenius(mat_add(L, mat_scale(-1.0, Rt))) / frobenius(L));
        }
        ck.le("matrix.cholesky_qr", worst, 1e-10);
    }
    return ck.failures;
}

int run_selftest(std::uint64_t seed, const Emit& emit) {
    Checker ck{emit};
    Rng rng(seed);

    spectral_checks(ck, rng);
    inertia_checks(ck, rng);
    evolve_checks(ck, rng);
    fisher_checks(ck, rng);
    transport_checks(ck, rng);
    ck.failures += run_matrix_check(rng.next(), 200, emit);
    matrix_extra_checks(ck, rng);
    io_checks(ck, rng);

    emit({{"event", "summary"},
          {"checks_failed", ck.failures},
          {"pass", ck.failures == 0}});
    return ck.failures;
}

} // namespace infotrans::cli
