#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>

#include <cstring>
#include <vector>

#include "infotrans/diffeo.hpp"
#include "infotrans/errors.hpp"
#include "infotrans/euler_arnold.hpp"
#include "infotrans/fisher.hpp"
#include "infotrans/inertia.hpp"
#include "infotrans/matrix_transport.hpp"
#include "infotrans/spectral.hpp"
#include "infotrans/transport.hpp"

namespace py = pybind11;
using namespace infotrans;

namespace {

// Everything crosses the boundary as float64 C-order; forcecast lets plain
// lists and integer arrays through.
using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Scalar fields are (n,) or (n0, n1); velocity and displacement fields are
// (n,) on the circle and (2, n0, n1) on the torus, component first.
ScalarField to_scalar(const DArray& arr) {
    auto info = arr.request();
    Grid g;
    if (info.ndim == 1)
        g = make_grid(int(info.shape[0]));
    else if (info.ndim == 2)
        g = make_grid(int(info.shape[0]), int(info.shape[1]));
    else
        throw ValidationError("expected a (n,) or (n0, n1) scalar array");
    ScalarField f(g);
    std::memcpy(f.data(), info.ptr, sizeof(double) * f.size());
    return f;
}

VectorField to_vector(const DArray& arr) {
    auto info = arr.request();
    if (info.ndim == 1) {
        Grid g = make_grid(int(info.shape[0]));
        VectorField v(g);
        std::memcpy(v[0].data(), info.ptr, sizeof(double) * g.points());
        return v;
    }
    if (info.ndim == 3 && info.shape[0] == 2) {
        Grid g = make_grid(int(info.shape[1]), int(info.shape[2]));
        VectorField v(g);
        const double* src = static_cast<const double*>(info.ptr);
        for (int c = 0; c < 2; ++c)
            std::memcpy(v[c].data(), src + std::size_t(c) * g.points(),
                        sizeof(double) * g.points());
        return v;
    }
    throw ValidationError("expected (n,) for circle fields or (2, n0, n1) for torus fields");
}

std::vector<py::ssize_t> scalar_shape(const Grid& g) {
    if (g.dim == 1) return {py::ssize_t(g.sizes[0])};
    return {py::ssize_t(g.sizes[0]), py::ssize_t(g.sizes[1])};
}

py::array_t<double> from_scalar(const ScalarField& f) {
    py::array_t<double> out(scalar_shape(f.grid()));
    std::memcpy(out.mutable_data(), f.data(), sizeof(double) * f.size());
    return out;
}

py::array_t<double> from_vector(const VectorField& v) {
    const Grid& g = v.grid();
    if (g.dim == 1) return from_scalar(v[0]);
    py::array_t<double> out(
        std::vector<py::ssize_t>{2, py::ssize_t(g.sizes[0]), py::ssize_t(g.sizes[1])});
    double* dst = out.mutable_data();
    for (int c = 0; c < 2; ++c)
        std::memcpy(dst + std::size_t(c) * g.points(), v[c].data(),
                    sizeof(double) * g.points());
    return out;
}

Mat to_mat(const DArray& arr) {
    auto info = arr.request();
    if (info.ndim != 2 || info.shape[0] != info.shape[1])
        throw ValidationError("expected a square matrix");
    Mat M(int(info.shape[0]));
    std::memcpy(M.a.data(), info.ptr, sizeof(double) * M.a.size());
    return M;
}

py::array_t<double> from_mat(const Mat& M) {
    py::array_t<double> out(std::vector<py::ssize_t>{M.n, M.n});
    std::memcpy(out.mutable_data(), M.a.data(), sizeof(double) * M.a.size());
    return out;
}

py::array_t<double> from_doubles(const std::vector<double>& v) {
    return py::array_t<double>(py::ssize_t(v.size()), v.data());
}

MetricParams params_of(double alpha, double beta, double gamma) {
    MetricParams p{alpha, beta, gamma};
    validate(p);
    return p;
}

// Rebuild a trajectory from stacked samples (nt, n) or (nt, 2, n0, n1) so the
// time-series diagnostics work on arrays produced in python.
Trajectory traj_of(const DArray& u_stack, double dt, double beta) {
    auto info = u_stack.request();
    Trajectory t;
    if (info.ndim == 2)
        t.grid = make_grid(int(info.shape[1]));
    else if (info.ndim == 4 && info.shape[1] == 2)
        t.grid = make_grid(int(info.shape[2]), int(info.shape[3]));
    else
        throw ValidationError("expected samples stacked as (nt, n) or (nt, 2, n0, n1)");
    if (!(dt > 0.0)) throw ValidationError("sample spacing dt must be positive");
    t.params = params_of(1.0, beta, 0.0);
    t.dt = dt;
    const double* src = static_cast<const double*>(info.ptr);
    std::size_t per = t.grid.points() * std::size_t(t.grid.dim);
    for (py::ssize_t i = 0; i < info.shape[0]; ++i) {
        VectorField u(t.grid);
        for (int c = 0; c < t.grid.dim; ++c)
            std::memcpy(u[c].data(), src + std::size_t(i) * per + std::size_t(c) * t.grid.points(),
                        sizeof(double) * t.grid.points());
        t.times.push_back(double(i) * dt);
        t.u.push_back(std::move(u));
    }
    return t;
}

LiftOptions lift_options(int steps) {
    LiftOptions opt;
    opt.steps = steps;
    opt.store_every = steps; // endpoints only; python callers get the final map
    return opt;
}

} // namespace

PYBIND11_MODULE(_infotrans, m) {
    m.doc() = "Geodesic flows of the alpha-beta-gamma metric on torus "
              "diffeomorphisms, the spherical geometry of densities they "
              "project to, and the matching factorisations (fields and "
              "small matrices alike).";

    auto err = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", err);
    py::register_exception<NumericalError>(m, "NumericalError", err);

    // metric and operator layer
    m.def(
        "apply_inertia",
        [](const DArray& u, double alpha, double beta, double gamma) {
            return from_vector(apply_inertia(to_vector(u), params_of(alpha, beta, gamma)));
        },
        py::arg("u"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 0.0,
        "Momentum m = A u of a velocity field.");
    m.def(
        "apply_inertia_inverse",
        [](const DArray& mfield, double alpha, double beta, double gamma) {
            return from_vector(
                apply_inertia_inverse(to_vector(mfield), params_of(alpha, beta, gamma)));
        },
        py::arg("m"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 0.0,
        "Velocity u = A^-1 m of a momentum field.");
    m.def(
        "energy",
        [](const DArray& u, double alpha, double beta, double gamma) {
            return energy(to_vector(u), params_of(alpha, beta, gamma));
        },
        py::arg("u"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 0.0,
        "Metric energy <A u, u>.");
    m.def(
        "energy_split",
        [](const DArray& u, double alpha, double beta, double gamma) {
            EnergySplit s = split_energy(to_vector(u), params_of(alpha, beta, gamma));
            return py::make_tuple(s.h_part, s.fisher_part);
        },
        py::arg("u"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 0.0,
        "(h_part, fisher_part) with fisher_part = beta * ||div u||^2.");
    m.def(
        "gradient", [](const DArray& f) { return from_vector(gradient(to_scalar(f))); },
        py::arg("f"));
    m.def(
        "divergence", [](const DArray& u) { return from_scalar(divergence(to_vector(u))); },
        py::arg("u"));
    m.def(
        "hodge",
        [](const DArray& u) {
            HodgeComponents h = hodge_decompose(to_vector(u));
            Grid g = h.potential.grid();
            py::array_t<double> harm(py::ssize_t(g.dim));
            for (int c = 0; c < g.dim; ++c) harm.mutable_data()[c] = h.harmonic[c];
            py::dict out;
            out["harmonic"] = harm;
            out["divfree"] = from_vector(h.divfree);
            out["potential"] = from_scalar(h.potential);
            return out;
        },
        py::arg("u"),
        "Orthogonal split u = harmonic + divfree + grad(potential); the "
        "harmonic part is the pair of constant components.");

    // geodesic flow of the metric
    m.def(
        "evolve",
        [](const DArray& u0, double T, double dt, double alpha, double beta, double gamma,
           int store_every) {
            Trajectory t = evolve(to_vector(u0), params_of(alpha, beta, gamma),
                                  EvolveOptions{dt, T, store_every, 1e6});
            const Grid& g = t.grid;
            std::vector<py::ssize_t> shape{py::ssize_t(t.u.size())};
            if (g.dim == 2) shape.push_back(2);
            shape.push_back(g.sizes[0]);
            if (g.dim == 2) shape.push_back(g.sizes[1]);
            py::array_t<double> stack(shape);
            double* dst = stack.mutable_data();
            std::size_t per = g.points() * std::size_t(g.dim);
            for (std::size_t i = 0; i < t.u.size(); ++i)
                for (int c = 0; c < g.dim; ++c)
                    std::memcpy(dst + i * per + std::size_t(c) * g.points(), t.u[i][c].data(),
                                sizeof(double) * g.points());
            ComponentDiagnostics d = component_diagnostics(t);
            py::dict out;
            out["times"] = from_doubles(t.times);
            out["u"] = stack;
            out["energy"] = from_doubles(d.energy);
            out["divfree_norm"] = from_doubles(d.divfree_norm);
            return out;
        },
        py::arg("u0"), py::arg("T"), py::arg("dt") = 1e-3, py::arg("alpha") = 1.0,
        py::arg("beta") = 1.0, py::arg("gamma") = 0.0, py::arg("store_every") = 1,
        "RK4 geodesic flow from u0; returns stored times, velocities and "
        "per-sample diagnostics.");
    m.def(
        "mu", [](const DArray& u) { return mu_functional(to_vector(u)); }, py::arg("u"),
        "Mean of the velocity over the torus; conserved along 1-D solutions.");
    m.def(
        "muhs_residual",
        [](const DArray& u, double dt, double beta) { return muhs_residual(traj_of(u, dt, beta)); },
        py::arg("u"), py::arg("dt"), py::arg("beta") = 1.0,
        "Max-norm PDE residual of a stored 1-D trajectory, d/dt by central "
        "differences.");
    m.def(
        "flow_map",
        [](const DArray& u, double dt) {
            return from_vector(flow_map(traj_of(u, dt, 1.0)).displacement());
        },
        py::arg("u"), py::arg("dt"),
        "Displacement of the particle map fed by the stored velocity samples.");

    // sphere geometry of densities
    m.def(
        "normalise_density",
        [](const DArray& f) { return from_scalar(normalise_density(to_scalar(f)).ratio()); },
        py::arg("f"), "Rescale a positive field to unit mass.");
    m.def(
        "fisher_inner",
        [](const DArray& a, const DArray& b, const DArray& nu) {
            return fisher_inner(to_scalar(a), to_scalar(b), Density(to_scalar(nu)));
        },
        py::arg("a"), py::arg("b"), py::arg("nu"));
    m.def(
        "fisher_distance",
        [](const DArray& a, const DArray& b) {
            return fisher_distance(Density(to_scalar(a)), Density(to_scalar(b)));
        },
        py::arg("nu0"), py::arg("nu1"),
        "Spherical distance arccos(integral of sqrt(nu0 nu1)).");
    m.def(
        "fisher_geodesic",
        [](const DArray& a, const DArray& b, double t) {
            return from_scalar(
                fisher_geodesic(Density(to_scalar(a)), Density(to_scalar(b)), t).ratio());
        },
        py::arg("nu0"), py::arg("nu1"), py::arg("t"),
        "Density at parameter t on the great-circle path between nu0 and nu1.");

    // lifted transport and factorisation
    m.def(
        "transport",
        [](const DArray& target, int steps) {
            TransportResult r =
                density_transport(Density(to_scalar(target)), lift_options(steps));
            py::dict out;
            out["psi"] = from_vector(r.psi.displacement());
            out["distance"] = r.distance;
            out["density_residual"] = r.density_residual;
            return out;
        },
        py::arg("target"), py::arg("steps") = 200,
        "Map psi with Jac(psi) = target ratio, reached along the lifted "
        "sphere geodesic from the uniform density.");
    m.def(
        "factorise",
        [](const DArray& phi, int steps) {
            Factorisation f = factorise(DiffeoMap(to_vector(phi)), lift_options(steps));
            py::dict out;
            out["eta"] = from_vector(f.eta.displacement());
            out["psi"] = from_vector(f.psi.displacement());
            out["w0"] = from_scalar(f.w0);
            out["theta"] = f.theta;
            out["vol_residual"] = f.vol_residual;
            out["compose_residual"] = f.compose_residual;
            return out;
        },
        py::arg("phi"), py::arg("steps") = 200,
        "Split the displacement phi into volume-preserving eta composed with "
        "the density-realising psi.");

    // diffeomorphism utilities (displacement arrays throughout)
    m.def(
        "compose",
        [](const DArray& f, const DArray& g) {
            return from_vector(
                compose(DiffeoMap(to_vector(f)), DiffeoMap(to_vector(g))).displacement());
        },
        py::arg("f"), py::arg("g"), "Displacement of x -> f(g(x)).");
    m.def(
        "invert",
        [](const DArray& phi) {
            return from_vector(invert(DiffeoMap(to_vector(phi))).displacement());
        },
        py::arg("phi"));
    m.def(
        "jacobian",
        [](const DArray& phi) { return from_scalar(DiffeoMap(to_vector(phi)).jacobian()); },
        py::arg("phi"));

    // matrix-group counterpart
    m.def(
        "qr",
        [](const DArray& A) {
            QrResult r = qr_polar_factorise(to_mat(A));
            return py::make_tuple(from_mat(r.Q), from_mat(r.R));
        },
        py::arg("A"), "(Q, R) with R having a positive diagonal.");
    m.def(
        "cholesky", [](const DArray& M) { return from_mat(cholesky(to_mat(M))); }, py::arg("M"));
    m.def(
        "matrix_geodesic",
        [](const DArray& M, double tol) {
            ShootResult r = geodesic_shoot_qr(to_mat(M), tol);
            py::dict out;
            out["u0"] = from_mat(r.u0);
            out["R1"] = from_mat(r.R1);
            out["iters"] = r.newton_iters;
            out["residual"] = r.residual;
            return out;
        },
        py::arg("M"), py::arg("tol") = 1e-8,
        "Shoot the upper-triangular geodesic from the identity to R1^T R1 = M.");
    m.def(
        "sym_metric",
        [](const DArray& M, const DArray& U, const DArray& V) {
            return sym_metric(to_mat(M), to_mat(U), to_mat(V));
        },
        py::arg("M"), py::arg("U"), py::arg("V"));
    m.def(
        "gl_metric",
        [](const DArray& A, const DArray& U, const DArray& V) {
            return gl_metric(to_mat(A), to_mat(U), to_mat(V));
        },
        py::arg("A"), py::arg("U"), py::arg("V"));
}
