#include "infotrans/rng.hpp"

#include <cmath>
#include <numbers>

#include "infotrans/parallel.hpp"

namespace infotrans {

std::uint64_t Rng::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    // top 53 bits -> [0,1)
    return double(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {

struct Mode {
    double k0, k1, a, b;
};

// Enumerate one representative per conjugate pair in a fixed order so the
// draw sequence is part of the field's definition.
std::vector<Mode> draw_modes(const Grid& g, Rng& rng, int kmax, double amplitude) {
    std::vector<Mode> modes;
    if (g.dim == 1) {
        for (int k = 1; k <= kmax; ++k) {
            double fall = amplitude / (1.0 + double(k) * k);
            double a = fall * rng.normal();
            double b = fall * rng.normal();
            modes.push_back({double(k), 0.0, a, b});
        }
    } else {
        for (int k0 = 0; k0 <= kmax; ++k0)
            for (int k1 = -kmax; k1 <= kmax; ++k1) {
                if (k0 == 0 && k1 <= 0) continue;
                double fall = amplitude / (1.0 + double(k0) * k0 + double(k1) * k1);
                double a = fall * rng.normal();
                double b = fall * rng.normal();
                modes.push_back({double(k0), double(k1), a, b});
            }
    }
    return modes;
}

ScalarField synthesise(const Grid& g, const std::vector<Mode>& modes, double mean_term) {
    ScalarField f(g);
    const int n0 = g.sizes[0];
    const int n1 = g.sizes[1];
    parallel_for(g.points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            int i0 = int(i / std::size_t(n1));
            int i1 = int(i % std::size_t(n1));
            double x0 = double(i0) / n0;
            double x1 = double(i1) / n1;
            double v = mean_term;
            for (const Mode& m : modes) {
                double ph = 2.0 * std::numbers::pi * (m.k0 * x0 + m.k1 * x1);
                v += m.a * std::cos(ph) + m.b * std::sin(ph);
            }
            f[i] = v;
        }
    });
    return f;
}

} // namespace

ScalarField random_smooth_scalar(const Grid& g, Rng& rng, int kmax, double amplitude,
                                 bool zero_mean) {
    validate_grid(g);
    if (kmax < 1) throw ValidationError("kmax must be at least 1");
    if (2 * kmax >= g.sizes[0] || (g.dim == 2 && 2 * kmax >= g.sizes[1]))
        throw ValidationError("kmax exceeds what the grid can represent");
    double mean_term = zero_mean ? 0.0 : amplitude * rng.normal();
    return synthesise(g, draw_modes(g, rng, kmax, amplitude), mean_term);
}

VectorField random_smooth_vector(const Grid& g, Rng& rng, int kmax, double amplitude) {
    validate_grid(g);
    VectorField v(g);
    for (int c = 0; c < g.dim; ++c)
        v[c] = random_smooth_scalar(g, rng, kmax, amplitude, /*zero_mean=*/false);
    return v;
}

DiffeoMap random_diffeo(const Grid& g, Rng& rng, int kmax, double scale) {
    validate_grid(g);
    if (!(scale > 0.0)) throw ValidationError("displacement scale must be positive");
    VectorField d(g);
    for (int c = 0; c < g.dim; ++c)
        d[c] = random_smooth_scalar(g, rng, kmax, 1.0, /*zero_mean=*/true);
    double m = max_abs(d);
    if (m > 0.0) d = (scale / m) * d;

    for (int attempt = 0; attempt < 60; ++attempt) {
        DiffeoMap candidate(d, /*validate=*/false);
        if (candidate.min_jacobian() > 0.2) return DiffeoMap(std::move(d));
        d = 0.5 * d;
    }
    throw NumericalError("random displacement never reached a safe Jacobian margin");
}

Density random_density(const Grid& g, Rng& rng, int kmax, double contrast) {
    validate_grid(g);
    if (!(contrast > 0.0) || contrast >= 1.0)
        throw ValidationError("density contrast must lie in (0, 1)");
    ScalarField s = random_smooth_scalar(g, rng, kmax, 1.0, /*zero_mean=*/true);
    double m = max_abs(s);
    ScalarField r(g, 1.0);
    if (m > 0.0) axpy(contrast / m, s, r);
    return normalise_density(r);
}

Mat random_matrix(int n, Rng& rng, double scale) {
    if (n < 1) throw ValidationError("matrix size must be positive");
    Mat A(n);
    for (double& x : A.a) x = scale * rng.normal();
    return A;
}

Mat random_spd(int n, Rng& rng) {
    Mat B = random_matrix(n, rng, 1.0 / std::sqrt(double(n)));
    return mat_add(mat_identity(n), mat_mul(mat_transpose(B), B));
}

Mat random_upper(int n, Rng& rng) {
    if (n < 1) throw ValidationError("matrix size must be positive");
    Mat U(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) U(i, j) = rng.normal();
    return U;
}

Mat random_skew(int n, Rng& rng) {
    if (n < 1) throw ValidationError("matrix size must be positive");
    Mat X(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = rng.normal();
            X(i, j) = v;
            X(j, i) = -v;
        }
    return X;
}

Mat random_near_identity(int n, Rng& rng, double scale) {
    // symmetric perturbation of I, pulled back towards I until SPD with margin
    Mat S(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = scale * rng.normal();
            S(i, j) = v;
            S(j, i) = v;
        }
    for (int attempt = 0; attempt < 60; ++attempt) {
        Mat M = mat_add(mat_identity(n), S);
        if (frobenius(S) <= 0.5) {
            try {
                cholesky(M);
                return M;
            } catch (const NotPositiveDefinite&) {
                // shrink and retry
            }
        }
        S = mat_scale(0.5, S);
    }
    return mat_identity(n);
}

} // namespace infotrans
