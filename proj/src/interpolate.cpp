#include "infotrans/interpolate.hpp"

#include <cmath>

#include "infotrans/parallel.hpp"

namespace infotrans {
namespace {

// Periodic interpolation by cubic B-splines: solve the cyclic tridiagonal
// system (c[i-1] + 4 c[i] + c[i+1]) / 6 = f[i] along each axis. Constant
// diagonals allow Sherman-Morrison on top of a plain Thomas sweep.
void cyclic_spline_solve(const double* f, double* c, int n, int stride) {
    // system: a c[i-1] + b c[i] + a c[i+1] = f[i], cyclic
    constexpr double a = 1.0 / 6.0;
    constexpr double b = 4.0 / 6.0;

    // Sherman-Morrison correction vector u = (gamma, 0, ..., 0, a*?/...)
    // following the standard cyclic reduction: modify first/last diagonal.
    const double gamma = -b;
    std::vector<double> bb(n, b);
    bb[0] = b - gamma;
    bb[n - 1] = b - a * a / gamma;

    auto thomas = [&](const std::vector<double>& rhs, std::vector<double>& x) {
        std::vector<double> cp(n);
        x.resize(n);
        cp[0] = a / bb[0];
        x[0] = rhs[0] / bb[0];
        for (int i = 1; i < n; ++i) {
            double m = bb[i] - a * cp[i - 1];
            cp[i] = a / m;
            x[i] = (rhs[i] - a * x[i - 1]) / m;
        }
        for (int i = n - 2; i >= 0; --i) x[i] -= cp[i] * x[i + 1];
    };

    std::vector<double> rhs(n), y, z;
    for (int i = 0; i < n; ++i) rhs[i] = f[std::size_t(i) * stride];
    thomas(rhs, y);

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = a;
    thomas(u, z);

    double fact = (y[0] + a * y[n - 1] / gamma) / (1.0 + z[0] + a * z[n - 1] / gamma);
    for (int i = 0; i < n; ++i) c[std::size_t(i) * stride] = y[i] - fact * z[i];
}

// cubic B-spline basis on the unit interval, local offsets -1..2
inline void bspline_weights(double u, double w[4]) {
    double u2 = u * u, u3 = u2 * u;
    w[0] = (1.0 - 3.0 * u + 3.0 * u2 - u3) / 6.0;
    w[1] = (4.0 - 6.0 * u2 + 3.0 * u3) / 6.0;
    w[2] = (1.0 + 3.0 * u + 3.0 * u2 - 3.0 * u3) / 6.0;
    w[3] = u3 / 6.0;
}

inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

} // namespace

SplineInterpolant::SplineInterpolant(const ScalarField& f) : grid_(f.grid()) {
    validate_grid(grid_);
    int n0 = grid_.sizes[0], n1 = grid_.sizes[1];
    coef_.resize(f.size());

    if (grid_.dim == 1) {
        cyclic_spline_solve(f.data(), coef_.data(), n0, 1);
        return;
    }
    // tensor product: rows (axis 1) first, then columns (axis 0)
    std::vector<double> stage(f.size());
    parallel_for(std::size_t(n0), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i0 = lo; i0 < hi; ++i0)
            cyclic_spline_solve(f.data() + i0 * n1, stage.data() + i0 * n1, n1, 1);
    });
    parallel_for(std::size_t(n1), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i1 = lo; i1 < hi; ++i1)
            cyclic_spline_solve(stage.data() + i1, coef_.data() + i1, n0, n1);
    });
}

double SplineInterpolant::operator()(double x0, double x1) const {
    int n0 = grid_.sizes[0];
    double t0 = x0 * n0;
    double f0 = std::floor(t0);
    int i0 = int(f0);
    double w0[4];
    bspline_weights(t0 - f0, w0);

    if (grid_.dim == 1) {
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) acc += w0[m] * coef_[wrap_index(i0 - 1 + m, n0)];
        return acc;
    }

    int n1 = grid_.sizes[1];
    double t1 = x1 * n1;
    double f1 = std::floor(t1);
    int i1 = int(f1);
    double w1[4];
    bspline_weights(t1 - f1, w1);

    int idx0[4], idx1[4];
    for (int m = 0; m < 4; ++m) {
        idx0[m] = wrap_index(i0 - 1 + m, n0);
        idx1[m] = wrap_index(i1 - 1 + m, n1);
    }
    double acc = 0.0;
    for (int m = 0; m < 4; ++m) {
        const double* row = coef_.data() + std::size_t(idx0[m]) * n1;
        double r = w1[0] * row[idx1[0]] + w1[1] * row[idx1[1]] + w1[2] * row[idx1[2]] +
                   w1[3] * row[idx1[3]];
        acc += w0[m] * r;
    }
    return acc;
}

double SplineInterpolant::operator()(const Point& p) const { return (*this)(p[0], p[1]); }

std::vector<double> interpolate(const ScalarField& f, const std::vector<Point>& points) {
    SplineInterpolant s(f);
    std::vector<double> out(points.size());
    parallel_for(points.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = s(points[i]);
    });
    return out;
}

} // namespace infotrans
