#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "infotrans/euler_arnold.hpp"
#include "infotrans/field_io.hpp"
#include "infotrans/fisher.hpp"
#include "infotrans/transport.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace infotrans::cli {
namespace {

constexpr double tau = 2.0 * std::numbers::pi;

void emit(const json& j) { std::cout << j.dump() << "\n"; }

Grid parse_grid(const std::string& s) {
    try {
        auto comma = s.find(',');
        if (comma == std::string::npos) return make_grid(std::stoi(s));
        return make_grid(std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1)));
    } catch (const std::invalid_argument&) {
        throw ValidationError("cannot parse grid size '" + s + "' (expected N or N0,N1)");
    } catch (const std::out_of_range&) {
        throw ValidationError("grid size out of range: " + s);
    }
}

// Inputs name either an existing file or a built-in preset. Presets need an
// explicit --grid; files carry their own grid, which --grid may only confirm.
void check_grid_hint(const Grid& from_file, const std::string& grid_flag) {
    if (grid_flag.empty()) return;
    if (!(parse_grid(grid_flag) == from_file))
        throw ValidationError("--grid disagrees with the grid stored in the input file");
}

Grid require_grid(const std::string& grid_flag, const std::string& what) {
    if (grid_flag.empty())
        throw ValidationError("--grid is required when " + what + " names a preset");
    return parse_grid(grid_flag);
}

ScalarField density_preset(const std::string& name, const Grid& g) {
    if (name == "uniform") return ScalarField(g, 1.0);
    if (name == "sine05")
        return sample(g, [](double x0, double) { return 1.0 + 0.5 * std::sin(tau * x0); });
    if (name == "bump") {
        if (g.dim == 1)
            return sample(g, [](double x0, double) { return 1.0 + 0.3 * std::cos(tau * x0); });
        return sample(g, [](double x0, double x1) {
            return 1.0 + 0.3 * std::cos(tau * x0) * std::cos(tau * x1);
        });
    }
    throw ValidationError("unknown density preset '" + name +
                          "' (uniform, sine05, bump) and no such file exists");
}

VectorField velocity_preset(const std::string& name, const Grid& g) {
    if (name == "gradsin")
        return sample_vector(g, [](double x0, double) {
            return std::array<double, 2>{0.1 * tau * std::cos(tau * x0), 0.0};
        });
    if (name == "meansine") {
        if (g.dim != 1) throw ValidationError("preset meansine is 1-D only");
        return sample_vector(g, [](double x0, double) {
            return std::array<double, 2>{0.05 + 0.1 * std::sin(tau * x0), 0.0};
        });
    }
    if (name == "swirl") {
        if (g.dim != 2) throw ValidationError("preset swirl is 2-D only");
        return sample_vector(g, [](double x0, double x1) {
            return std::array<double, 2>{0.1 * std::sin(tau * x0) * std::cos(tau * x1),
                                         -0.1 * std::cos(tau * x0) * std::sin(tau * x1)};
        });
    }
    throw ValidationError("unknown velocity preset '" + name +
                          "' (gradsin, meansine, swirl) and no such file exists");
}

VectorField displacement_preset(const std::string& name, const Grid& g) {
    if (name == "identity") return VectorField(g);
    if (name == "wave")
        return sample_vector(g, [&](double x0, double x1) {
            return std::array<double, 2>{
                0.07 * std::sin(tau * x0),
                g.dim == 2 ? 0.07 * std::sin(tau * x1 + std::numbers::pi / 3) : 0.0};
        });
    if (name == "shear") {
        if (g.dim != 2) throw ValidationError("preset shear is 2-D only");
        return sample_vector(g, [](double, double x1) {
            return std::array<double, 2>{0.05 * std::sin(tau * x1), 0.0};
        });
    }
    throw ValidationError("unknown displacement preset '" + name +
                          "' (identity, wave, shear) and no such file exists");
}

Density load_density(const std::string& spec, const std::string& grid_flag, double floor) {
    ScalarField raw;
    json ingest{{"event", "ingest"}, {"source", spec}};
    if (fs::exists(spec)) {
        if (fs::path(spec).extension() == ".pgm") {
            raw = read_pgm(spec);
            for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += floor;
            ingest["floor"] = floor;
        } else {
            raw = read_scalar_any(spec);
        }
        check_grid_hint(raw.grid(), grid_flag);
    } else {
        raw = density_preset(spec, require_grid(grid_flag, "a density input"));
    }
    ingest["mass_defect"] = std::abs(integrate(raw) - 1.0);
    emit(ingest);
    return normalise_density(raw);
}

VectorField load_velocity(const std::string& spec, const std::string& grid_flag) {
    if (fs::exists(spec)) {
        VectorField u;
        if (fs::path(spec).extension() == ".csv") {
            ScalarField f = read_csv_field(spec);
            u = VectorField(f.grid());
            u[0] = f;
        } else {
            u = as_vector(read_binary(spec));
        }
        check_grid_hint(u.grid(), grid_flag);
        return u;
    }
    return velocity_preset(spec, require_grid(grid_flag, "a velocity input"));
}

DiffeoMap load_displacement(const std::string& spec, const std::string& grid_flag) {
    if (fs::exists(spec)) {
        VectorField d;
        if (fs::path(spec).extension() == ".csv") {
            ScalarField f = read_csv_field(spec);
            d = VectorField(f.grid());
            d[0] = f;
        } else {
            d = as_vector(read_binary(spec));
        }
        check_grid_hint(d.grid(), grid_flag);
        return DiffeoMap(std::move(d));
    }
    return DiffeoMap(displacement_preset(spec, require_grid(grid_flag, "a map input")));
}

void write_density(const fs::path& path, const Density& nu) {
    if (nu.grid().dim == 1)
        write_csv(path, nu.ratio());
    else
        write_binary(path, nu.ratio());
    emit({{"event", "write"}, {"path", path.string()}});
}

void write_displacement(const fs::path& path, const DiffeoMap& map) {
    write_binary(path, map.displacement(), "displacement");
    emit({{"event", "write"}, {"path", path.string()}});
}

// Snapshot stride when the user leaves it to us: the smallest divisor of the
// step count that keeps at most 21 snapshots.
int auto_store_every(long long steps) {
    for (int k = 1; k <= steps; ++k)
        if (steps % k == 0 && steps / k <= 20) return k;
    return int(steps);
}

struct Options {
    std::string grid, a = "uniform", b, u0, target, phi, in, out, out_dir = ".";
    double alpha = 1.0, beta = 1.0, gamma = 0.0;
    double T = 1.0, dt = 1e-3, t = 0.5, floor = 1e-3, tol = 1e-8;
    int steps = 200, store_every = 0, cases = 1000;
    std::uint64_t seed = 7;
};

int cmd_fisher_dist(const Options& o) {
    Density a = load_density(o.a, o.grid, o.floor);
    Density b = load_density(o.b, o.grid, o.floor);
    emit({{"event", "fisher_dist"}, {"theta", fisher_distance(a, b)}});
    return 0;
}

int cmd_fisher_geodesic(const Options& o) {
    Density a = load_density(o.a, o.grid, o.floor);
    Density b = load_density(o.b, o.grid, o.floor);
    Density mid = fisher_geodesic(a, b, o.t);
    emit({{"event", "fisher_geodesic"},
          {"t", o.t},
          {"theta", fisher_distance(a, b)},
          {"mass_defect", std::abs(integrate(mid.ratio()) - 1.0)}});
    if (!o.out.empty()) write_density(o.out, mid);
    return 0;
}

int cmd_evolve(const Options& o) {
    VectorField u0 = load_velocity(o.u0, o.grid);
    MetricParams p{o.alpha, o.beta, o.gamma};
    validate(p);

    EvolveOptions eo;
    eo.dt = o.dt;
    eo.T = o.T;
    if (!(o.dt > 0.0) || !(o.T > 0.0)) throw ValidationError("T and dt must be positive");
    eo.store_every = o.store_every > 0 ? o.store_every
                                       : auto_store_every(std::llround(o.T / o.dt));

    Trajectory traj = evolve(u0, p, eo);
    ComponentDiagnostics diag = component_diagnostics(traj);
    for (std::size_t i = 0; i < diag.times.size(); ++i)
        emit({{"event", "step"},
              {"time", diag.times[i]},
              {"energy", diag.energy[i]},
              {"harmonic", diag.harmonic_norm[i]},
              {"divfree", diag.divfree_norm[i]},
              {"gradient", diag.gradient_norm[i]}});

    if (traj.grid.dim == 1) {
        double mu0 = mu_functional(traj.u.front());
        double drift = 0.0;
        for (const VectorField& u : traj.u)
            drift = std::max(drift, std::abs(mu_functional(u) - mu0));
        json mu{{"event", "mu"}, {"initial", mu0}, {"drift", drift}};
        if (traj.u.size() >= 3) mu["pde_residual"] = muhs_residual(traj);
        emit(mu);
    }

    if (!o.out.empty()) {
        fs::create_directories(o.out);
        char name[32];
        for (std::size_t i = 0; i < traj.u.size(); ++i) {
            std::snprintf(name, sizeof name, "u_%06zu.bin", i);
            write_binary(fs::path(o.out) / name, traj.u[i]);
        }
        emit({{"event", "done"}, {"snapshots", traj.u.size()}, {"dir", o.out}});
    } else {
        emit({{"event", "done"}, {"snapshots", traj.u.size()}});
    }
    return 0;
}

LiftOptions lift_options(const Options& o) {
    if (o.steps < 10) throw ValidationError("--steps must be at least 10");
    LiftOptions lo;
    lo.steps = o.steps;
    lo.store_every = o.steps; // endpoints only; intermediate maps are not reused
    return lo;
}

int cmd_transport(const Options& o) {
    Density target = load_density(o.target, o.grid, o.floor);
    TransportResult tr = density_transport(target, lift_options(o));
    emit({{"event", "transport"},
          {"theta", tr.distance},
          {"density_residual", tr.density_residual}});
    for (std::size_t i = 0; i < tr.mean_corrections.size(); ++i)
        emit({{"event", "step"}, {"index", i}, {"mean_correction", tr.mean_corrections[i]}});
    write_displacement(o.out.empty() ? "psi.bin" : o.out, tr.psi);
    return 0;
}

int cmd_factorise(const Options& o) {
    DiffeoMap phi = load_displacement(o.phi, o.grid);
    Factorisation f = factorise(phi, lift_options(o));
    emit({{"event", "factorise"},
          {"theta", f.theta},
          {"vol_residual", f.vol_residual},
          {"compose_residual", f.compose_residual}});
    for (std::size_t i = 0; i < f.mean_corrections.size(); ++i)
        emit({{"event", "step"}, {"index", i}, {"mean_correction", f.mean_corrections[i]}});

    fs::path dir = o.out_dir;
    fs::create_directories(dir);
    write_displacement(dir / "eta.bin", f.eta);
    write_displacement(dir / "psi.bin", f.psi);
    if (f.w0.grid().dim == 1)
        write_csv(dir / "w0.csv", f.w0);
    else
        write_binary(dir / "w0.bin", f.w0);
    emit({{"event", "write"}, {"path", (dir / (f.w0.grid().dim == 1 ? "w0.csv" : "w0.bin")).string()}});
    return 0;
}

int cmd_matrix_qr(const Options& o) {
    Mat A = read_matrix_csv(o.in);
    QrResult qr = qr_polar_factorise(A);
    fs::path dir = o.out_dir;
    fs::create_directories(dir);
    write_matrix_csv(dir / "Q.csv", qr.Q);
    write_matrix_csv(dir / "R.csv", qr.R);
    Mat qtq = mat_mul(mat_transpose(qr.Q), qr.Q);
    emit({{"event", "qr"},
          {"orthogonality", frobenius(mat_add(qtq, mat_scale(-1.0, mat_identity(A.n))))},
          {"reconstruction",
           frobenius(mat_add(A, mat_scale(-1.0, mat_mul(qr.Q, qr.R)))) / frobenius(A)},
          {"det_q", mat_det(qr.Q)}});
    return 0;
}

int cmd_matrix_cholesky(const Options& o) {
    Mat M = read_matrix_csv(o.in);
    Mat L = cholesky(M);
    fs::path dir = o.out_dir;
    fs::create_directories(dir);
    write_matrix_csv(dir / "L.csv", L);
    Mat llt = mat_mul(L, mat_transpose(L));
    emit({{"event", "cholesky"},
          {"residual", frobenius(mat_add(llt, mat_scale(-1.0, M))) / frobenius(M)}});
    return 0;
}

int cmd_matrix_shoot(const Options& o) {
    Mat M = read_matrix_csv(o.in);
    ShootResult shot = geodesic_shoot_qr(M, o.tol);
    fs::path dir = o.out_dir;
    fs::create_directories(dir);
    write_matrix_csv(dir / "u0.csv", shot.u0);
    write_matrix_csv(dir / "R1.csv", shot.R1);
    Mat chol_r = mat_transpose(cholesky(M));
    emit({{"event", "shoot"},
          {"newton_iters", shot.newton_iters},
          {"residual", shot.residual},
          {"cholesky_mismatch",
           frobenius(mat_add(shot.R1, mat_scale(-1.0, chol_r)))}});
    return 0;
}

int cmd_matrix_check(const Options& o) {
    int failures = run_matrix_check(o.seed, o.cases, emit);
    emit({{"event", "summary"}, {"checks_failed", failures}, {"pass", failures == 0}});
    return failures == 0 ? 0 : 1;
}

int cmd_selftest(const Options& o) { return run_selftest(o.seed, emit) == 0 ? 0 : 1; }

} // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"Spectral geodesics on torus diffeomorphism groups, Fisher-Rao "
                 "geometry, optimal information transport, and the matrix-group "
                 "QR/Cholesky analogue",
                 "infotrans"};
    app.require_subcommand(1);

    Options o;
    std::function<int()> action;

    app.add_option("--alpha", o.alpha, "inertia: curl term weight (> 0)");
    app.add_option("--beta", o.beta, "inertia: divergence term weight (> 0)");
    app.add_option("--gamma", o.gamma, "inertia: harmonic-to-L2 blend (in [0,1])");

    auto add_grid = [&](CLI::App* cmd) {
        cmd->add_option("--grid", o.grid, "grid size N or N0,N1 (needed for presets)");
        cmd->fallthrough();
    };

    CLI::App* fisher = app.add_subcommand("fisher", "Fisher-Rao distances and geodesics");
    fisher->require_subcommand(1);
    fisher->fallthrough();

    CLI::App* fdist = fisher->add_subcommand("dist", "distance between two densities");
    add_grid(fdist);
    fdist->add_option("--a", o.a, "density: file or preset (uniform, sine05, bump)");
    fdist->add_option("--b", o.b, "density: file or preset")->required();
    fdist->add_option("--floor", o.floor, "offset added to PGM grey values");
    fdist->callback([&] { action = [&] { return cmd_fisher_dist(o); }; });

    CLI::App* fgeo = fisher->add_subcommand("geodesic", "point on the geodesic at time t");
    add_grid(fgeo);
    fgeo->add_option("--a", o.a, "density: file or preset");
    fgeo->add_option("--b", o.b, "density: file or preset")->required();
    fgeo->add_option("--t", o.t, "geodesic parameter in [0,1]");
    fgeo->add_option("--floor", o.floor, "offset added to PGM grey values");
    fgeo->add_option("--out", o.out, "write the density here (.csv 1-D, .bin 2-D)");
    fgeo->callback([&] { action = [&] { return cmd_fisher_geodesic(o); }; });

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "integrate the geodesic equation");
    add_grid(evolve_cmd);
    evolve_cmd->add_option("--u0", o.u0, "velocity: file or preset (gradsin, meansine, swirl)")
        ->required();
    evolve_cmd->add_option("--T", o.T, "final time");
    evolve_cmd->add_option("--dt", o.dt, "time step");
    evolve_cmd->add_option("--store-every", o.store_every,
                           "snapshot stride in steps (default: auto, at most 21 snapshots)");
    evolve_cmd->add_option("--out", o.out, "directory for snapshot files");
    evolve_cmd->callback([&] { action = [&] { return cmd_evolve(o); }; });

    CLI::App* transport_cmd =
        app.add_subcommand("transport", "diffeomorphism realising a target density");
    add_grid(transport_cmd);
    transport_cmd->add_option("--target", o.target, "density: file or preset")->required();
    transport_cmd->add_option("--steps", o.steps, "lift steps (>= 10)");
    transport_cmd->add_option("--floor", o.floor, "offset added to PGM grey values");
    transport_cmd->add_option("--out", o.out, "output displacement file (default psi.bin)");
    transport_cmd->callback([&] { action = [&] { return cmd_transport(o); }; });

    CLI::App* fact_cmd =
        app.add_subcommand("factorise", "split a map into volume-preserving and transport parts");
    add_grid(fact_cmd);
    fact_cmd->add_option("--phi", o.phi, "map displacement: file or preset (identity, wave, shear)")
        ->required();
    fact_cmd->add_option("--steps", o.steps, "lift steps (>= 10)");
    fact_cmd->add_option("--out-dir", o.out_dir, "directory for eta/psi/w0 outputs");
    fact_cmd->callback([&] { action = [&] { return cmd_factorise(o); }; });

    CLI::App* matrix = app.add_subcommand("matrix", "matrix-group geometry tools");
    matrix->require_subcommand(1);
    matrix->fallthrough();

    CLI::App* mqr = matrix->add_subcommand("qr", "QR with positive diagonal");
    mqr->add_option("--in", o.in, "matrix CSV")->required();
    mqr->add_option("--out-dir", o.out_dir, "where Q.csv and R.csv go");
    mqr->fallthrough();
    mqr->callback([&] { action = [&] { return cmd_matrix_qr(o); }; });

    CLI::App* mchol = matrix->add_subcommand("cholesky", "lower Cholesky factor");
    mchol->add_option("--in", o.in, "matrix CSV")->required();
    mchol->add_option("--out-dir", o.out_dir, "where L.csv goes");
    mchol->fallthrough();
    mchol->callback([&] { action = [&] { return cmd_matrix_cholesky(o); }; });

    CLI::App* mshoot = matrix->add_subcommand("shoot", "geodesic shooting to a target metric");
    mshoot->add_option("--in", o.in, "SPD matrix CSV")->required();
    mshoot->add_option("--tol", o.tol, "endpoint residual tolerance");
    mshoot->add_option("--out-dir", o.out_dir, "where u0.csv and R1.csv go");
    mshoot->fallthrough();
    mshoot->callback([&] { action = [&] { return cmd_matrix_shoot(o); }; });

    CLI::App* mcheck = matrix->add_subcommand("check", "seeded invariance and descent suites");
    mcheck->add_option("--seed", o.seed, "random seed")->default_val(std::uint64_t(42));
    mcheck->add_option("--cases", o.cases, "cases per suite");
    mcheck->fallthrough();
    mcheck->callback([&] { action = [&] { return cmd_matrix_check(o); }; });

    CLI::App* selftest = app.add_subcommand("selftest", "run every module's invariant suite");
    selftest->add_option("--seed", o.seed, "random seed");
    selftest->fallthrough();
    selftest->callback([&] { action = [&] { return cmd_selftest(o); }; });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
        return action ? action() : 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        std::cerr << json{{"event", "error"}, {"kind", "validation"}, {"message", e.what()}}.dump()
                  << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << json{{"event", "error"}, {"kind", "numerical"}, {"message", e.what()}}.dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"event", "error"}, {"kind", "internal"}, {"message", e.what()}}.dump()
                  << "\n";
        return 1;
    }
}

} // namespace infotrans::cli
