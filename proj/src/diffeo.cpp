#include "infotrans/diffeo.hpp"

#include <cmath>
#include <string>

#include "infotrans/interpolate.hpp"
#include "infotrans/parallel.hpp"

namespace infotrans {
namespace {

inline double wrap_half(double d) {
    // reduce to [-0.5, 0.5): periodic representative closest to zero
    return d - std::floor(d + 0.5);
}

} // namespace

DiffeoMap::DiffeoMap(VectorField displacement, bool validate)
    : grid_(displacement.grid()), disp_(std::move(displacement)) {
    validate_grid(grid_);
    if (validate) {
        if (!all_finite(disp_)) throw NotDiffeo("displacement has non-finite entries");
        double mj = min_jacobian();
        if (!(mj > 0.0))
            throw NotDiffeo("map is not orientation-preserving: min Jacobian " +
                            std::to_string(mj));
    }
}

DiffeoMap DiffeoMap::identity(const Grid& g) { return DiffeoMap(VectorField(g), false); }

std::vector<Point> DiffeoMap::forward_grid() const {
    std::vector<Point> pts(grid_.points());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Point x = grid_point(grid_, i);
        pts[i] = {x[0] + disp_[0][i], grid_.dim == 2 ? x[1] + disp_[1][i] : 0.0};
    }
    return pts;
}

ScalarField DiffeoMap::jacobian() const {
    if (grid_.dim == 1) {
        ScalarField j = spectral_derivative(disp_[0], 0, 1);
        for (std::size_t i = 0; i < j.size(); ++i) j[i] += 1.0;
        return j;
    }
    ScalarField d00 = spectral_derivative(disp_[0], 0, 1);
    ScalarField d01 = spectral_derivative(disp_[0], 1, 1);
    ScalarField d10 = spectral_derivative(disp_[1], 0, 1);
    ScalarField d11 = spectral_derivative(disp_[1], 1, 1);
    ScalarField j(grid_);
    for (std::size_t i = 0; i < j.size(); ++i)
        j[i] = (1.0 + d00[i]) * (1.0 + d11[i]) - d01[i] * d10[i];
    return j;
}

double DiffeoMap::min_jacobian() const {
    ScalarField j = jacobian();
    double m = j[0];
    for (std::size_t i = 0; i < j.size(); ++i) m = std::min(m, j[i]);
    return m;
}

ScalarField jacobian(const DiffeoMap& phi) { return phi.jacobian(); }

DiffeoMap compose(const DiffeoMap& f, const DiffeoMap& g) {
    check_same_grid(f.grid(), g.grid());
    const Grid& gr = f.grid();
    std::vector<Point> pts = g.forward_grid();

    VectorField d(gr);
    for (int c = 0; c < gr.dim; ++c) {
        SplineInterpolant interp(f.displacement()[c]);
        const ScalarField& dg = g.displacement()[c];
        parallel_for(gr.points(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) d[c][i] = dg[i] + interp(pts[i]);
        });
    }
    return DiffeoMap(std::move(d));
}

DiffeoMap invert(const DiffeoMap& phi, double tol, int max_iter) {
    const Grid& g = phi.grid();
    const VectorField& d = phi.displacement();

    // interpolants of the displacement and its first derivatives
    std::vector<SplineInterpolant> di, dd; // dd: row-major Jacobian entries of d
    for (int c = 0; c < g.dim; ++c) {
        di.emplace_back(d[c]);
        for (int ax = 0; ax < g.dim; ++ax) dd.emplace_back(spectral_derivative(d[c], ax, 1));
    }

    VectorField inv_disp(g);
    std::vector<int> failures(g.points(), 0);

    parallel_for(g.points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Point x = grid_point(g, i);
            // initial guess y = x - d(x)
            double y0 = x[0] - d[0][i];
            double y1 = g.dim == 2 ? x[1] - d[1][i] : 0.0;

            double r0 = 0.0, r1 = 0.0, rn = 0.0;
            auto residual = [&](double a, double b, double& o0, double& o1) {
                o0 = wrap_half(x[0] - a - di[0](a, b));
                o1 = g.dim == 2 ? wrap_half(x[1] - b - di[1](a, b)) : 0.0;
                return std::max(std::abs(o0), std::abs(o1));
            };
            rn = residual(y0, y1, r0, r1);

            bool ok = false;
            for (int it = 0; it < max_iter; ++it) {
                if (rn < tol) {
                    ok = true;
                    break;
                }
                // solve (I + Dd(y)) step = r
                double s0, s1;
                if (g.dim == 1) {
                    s0 = r0 / (1.0 + dd[0](y0, y1));
                    s1 = 0.0;
                } else {
                    double j00 = 1.0 + dd[0](y0, y1);
                    double j01 = dd[1](y0, y1);
                    double j10 = dd[2](y0, y1);
                    double j11 = 1.0 + dd[3](y0, y1);
                    double det = j00 * j11 - j01 * j10;
                    if (det == 0.0) break;
                    s0 = (j11 * r0 - j01 * r1) / det;
                    s1 = (-j10 * r0 + j00 * r1) / det;
                }
                // damped update: halve until the residual actually drops
                double lambda = 1.0;
                double n0 = y0, n1 = y1, q0, q1, qn = rn;
                for (int h = 0; h < 8; ++h) {
                    double t0 = y0 + lambda * s0, t1 = y1 + lambda * s1;
                    qn = residual(t0, t1, q0, q1);
                    if (qn < rn) {
                        n0 = t0;
                        n1 = t1;
                        break;
                    }
                    lambda *= 0.5;
                }
                if (!(qn < rn)) break; // line search stalled
                y0 = n0;
                y1 = n1;
                r0 = q0;
                r1 = q1;
                rn = qn;
            }
            if (rn < tol) ok = true;
            if (!ok) {
                failures[i] = 1;
                continue;
            }
            inv_disp[0][i] = y0 - x[0];
            if (g.dim == 2) inv_disp[1][i] = y1 - x[1];
        }
    });

    for (std::size_t i = 0; i < g.points(); ++i)
        if (failures[i])
            throw NewtonDiverged("map inversion failed to converge at a grid node");

    return DiffeoMap(std::move(inv_disp));
}

double map_distance(const DiffeoMap& phi, const DiffeoMap& psi) {
    check_same_grid(phi.grid(), psi.grid());
    double m = 0.0;
    for (int c = 0; c < phi.grid().dim; ++c)
        for (std::size_t i = 0; i < phi.grid().points(); ++i)
            m = std::max(m, std::abs(wrap_half(phi.displacement()[c][i] -
                                               psi.displacement()[c][i])));
    return m;
}

} // namespace infotrans
