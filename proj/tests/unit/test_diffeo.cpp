#include <doctest.h>

#include <cmath>
#include <numbers>

#include <infotrans/diffeo.hpp>
#include <infotrans/rng.hpp>
#include <infotrans/spectral.hpp>

using namespace infotrans;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;

DiffeoMap translation(const Grid& g, double a0, double a1) {
    VectorField d(g);
    for (double& x : d[0].values()) x = a0;
    if (g.dim == 2)
        for (double& x : d[1].values()) x = a1;
    return DiffeoMap(d);
}
} // namespace

TEST_SUITE("diffeo") {

TEST_CASE("identity basics") {
    Grid g = make_grid(32, 32);
    DiffeoMap id = DiffeoMap::identity(g);
    CHECK(max_abs(id.displacement()) == 0.0);
    CHECK(max_abs(id.jacobian() - ScalarField(g, 1.0)) < 1e-14);
    CHECK(id.min_jacobian() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("jacobian of explicit maps") {
    Grid g1 = make_grid(128);
    VectorField d1(g1);
    d1[0] = sample(g1, [](double x, double) { return 0.1 * std::sin(tau * x); });
    ScalarField j1 = DiffeoMap(d1).jacobian();
    ScalarField want1 = sample(g1, [](double x, double) {
        return 1.0 + 0.1 * tau * std::cos(tau * x);
    });
    CHECK(max_abs(j1 - want1) < 1e-11);

    // shear in x0 driven by x1: triangular derivative, det is still 1
    Grid g2 = make_grid(32, 32);
    VectorField d2(g2);
    d2[0] = sample(g2, [](double, double x1) { return 0.2 * std::sin(tau * x1); });
    CHECK(max_abs(DiffeoMap(d2).jacobian() - ScalarField(g2, 1.0)) < 1e-12);
}

TEST_CASE("orientation is enforced at construction") {
    Grid g = make_grid(64);
    VectorField bad(g);
    // slope drops below -1, so the jacobian changes sign
    bad[0] = sample(g, [](double x, double) { return 0.3 * std::sin(tau * x); });
    CHECK_THROWS_AS(DiffeoMap{bad}, NotDiffeo);
    CHECK_NOTHROW(DiffeoMap(bad, false));
}

TEST_CASE("composition with the identity changes nothing") {
    Rng rng(41);
    Grid g = make_grid(64, 64);
    DiffeoMap phi = random_diffeo(g, rng);
    DiffeoMap id = DiffeoMap::identity(g);
    CHECK(max_abs(compose(phi, id).displacement() - phi.displacement()) < 1e-15);
    CHECK(max_abs(compose(id, phi).displacement() - phi.displacement()) == 0.0);
}

TEST_CASE("translations compose exactly and invert exactly") {
    Grid g = make_grid(32, 32);
    DiffeoMap ta = translation(g, 0.3, 0.1);
    DiffeoMap tb = translation(g, 0.5, 0.7);
    DiffeoMap tc = compose(ta, tb);
    // displacements add; the wrap only matters for the map, not the offset
    CHECK(max_abs(tc.displacement()[0] - ScalarField(g, 0.8)) < 1e-14);
    CHECK(max_abs(tc.displacement()[1] - ScalarField(g, 0.8)) < 1e-14);

    DiffeoMap back = invert(ta);
    CHECK(max_abs(back.displacement()[0] + ScalarField(g, 0.3)) < 1e-12);
    CHECK(max_abs(back.displacement()[1] + ScalarField(g, 0.1)) < 1e-12);
}

TEST_CASE("inverse composes to the identity") {
    Rng rng(42);
    Grid g = make_grid(128, 128);
    DiffeoMap phi = random_diffeo(g, rng);
    DiffeoMap phi_inv = invert(phi);
    CHECK(map_distance(compose(phi, phi_inv), DiffeoMap::identity(g)) < 1e-6);
    CHECK(map_distance(compose(phi_inv, phi), DiffeoMap::identity(g)) < 1e-6);
}

TEST_CASE("1-D sine map round-trips tightly") {
    Grid g = make_grid(128);
    VectorField d(g);
    d[0] = sample(g, [](double x, double) { return 0.1 * std::sin(tau * x); });
    DiffeoMap phi(d);
    DiffeoMap phi_inv = invert(phi);
    CHECK(map_distance(compose(phi, phi_inv), DiffeoMap::identity(g)) < 1e-8);
}

TEST_CASE("composition is associative within interpolation error") {
    Rng rng(43);
    Grid g = make_grid(96, 96);
    DiffeoMap f = random_diffeo(g, rng);
    DiffeoMap h = random_diffeo(g, rng);
    DiffeoMap k = random_diffeo(g, rng);
    double gap = map_distance(compose(compose(f, h), k), compose(f, compose(h, k)));
    CHECK(gap < 1e-6);
}

TEST_CASE("map distance sees the largest displacement gap") {
    Grid g = make_grid(32);
    DiffeoMap id = DiffeoMap::identity(g);
    VectorField d(g);
    d[0] = sample(g, [](double x, double) { return 0.05 * std::cos(tau * x); });
    CHECK(map_distance(DiffeoMap(d), id) == doctest::Approx(0.05).epsilon(1e-12));
    // distance is measured on the torus: a full turn is no distance at all
    DiffeoMap turn = translation(g, 1.0, 0.0);
    CHECK(map_distance(turn, id) < 1e-14);
}

}
