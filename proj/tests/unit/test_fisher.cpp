#include <doctest.h>

#include <cmath>
#include <numbers>

#include <infotrans/fisher.hpp>
#include <infotrans/interpolate.hpp>
#include <infotrans/rng.hpp>
#include <infotrans/spectral.hpp>

using namespace infotrans;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;

// arccos of int_0^1 sqrt(1 + 0.5 sin(2 pi x)) dx, fixed by adaptive quadrature
// before the implementation existed
constexpr double kSineHalfAngle = 0.182777461930287861764644;
// same for the 2-D density 1 + 0.3 cos(2 pi x0) cos(2 pi x1)
constexpr double kBumpAngle = 0.07562916432218226791823392;

Density sine_half(const Grid& g) {
    return normalise_density(sample(g, [](double x, double) {
        return 1.0 + 0.5 * std::sin(tau * x);
    }));
}
} // namespace

TEST_SUITE("fisher") {

TEST_CASE("densities must be positive with unit mass") {
    Grid g = make_grid(32);
    CHECK_THROWS_AS(Density(sample(g, [](double x, double) {
        return std::sin(tau * x); // changes sign
    })), ValidationError);
    CHECK_THROWS_AS(Density(ScalarField(g, 2.0)), ValidationError); // mass 2
    CHECK_NOTHROW(Density(ScalarField(g, 1.0)));
    // normalisation fixes mass but never sign
    CHECK_THROWS_AS(normalise_density(sample(g, [](double x, double) {
        return 0.2 + std::cos(tau * x);
    })), ValidationError);
    CHECK(max_abs(normalise_density(ScalarField(g, 5.0)).ratio() -
                  ScalarField(g, 1.0)) < 1e-15);
}

TEST_CASE("distances match the quadrature oracle") {
    CHECK(std::abs(fisher_distance(Density::uniform(make_grid(256)),
                                   sine_half(make_grid(256))) -
                   kSineHalfAngle) < 1e-8);

    Grid g2 = make_grid(64, 64);
    Density bump = normalise_density(sample(g2, [](double x0, double x1) {
        return 1.0 + 0.3 * std::cos(tau * x0) * std::cos(tau * x1);
    }));
    CHECK(std::abs(fisher_distance(Density::uniform(g2), bump) - kBumpAngle) < 1e-8);
}

TEST_CASE("distance is a metric below the diameter bound") {
    Rng rng(61);
    Grid g = make_grid(64);
    for (int trial = 0; trial < 8; ++trial) {
        Density a = random_density(g, rng);
        Density b = random_density(g, rng);
        Density c = random_density(g, rng);
        double ab = fisher_distance(a, b);
        double bc = fisher_distance(b, c);
        double ac = fisher_distance(a, c);
        CHECK(ab == doctest::Approx(fisher_distance(b, a)).epsilon(1e-15));
        CHECK(ac <= ab + bc + 1e-12);
        CHECK(ab < std::numbers::pi / 2);
        CHECK(fisher_distance(a, a) == 0.0);
    }

    // extreme contrast still sits strictly inside the quarter circle
    Grid gx = make_grid(128);
    Density spike = normalise_density(sample(gx, [](double x, double) {
        return 0.001 + std::exp(-200.0 * (x - 0.5) * (x - 0.5));
    }));
    double d = fisher_distance(Density::uniform(gx), spike);
    CHECK(d < std::numbers::pi / 2);
    CHECK(d > 0.5); // far pair, sanity that the bound is doing work
}

TEST_CASE("inner product reduces to L2 on the uniform density") {
    Grid g = make_grid(256);
    ScalarField s = sample(g, [](double x, double) { return std::sin(tau * x); });
    CHECK(fisher_inner(s, s, Density::uniform(g)) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(fisher_inner(ScalarField(g, 0.0), s, Density::uniform(g)) == 0.0);
}

TEST_CASE("inner product against a tilted density matches the closed form") {
    // int sin^2/(1 + a sin) = (1/a^2)(1/sqrt(1-a^2) - 1) ... with a = 0.5:
    double want = 4.0 * (1.0 / std::sqrt(0.75) - 1.0);
    Grid g = make_grid(512);
    ScalarField s = sample(g, [](double x, double) { return std::sin(tau * x); });
    CHECK(fisher_inner(s, s, sine_half(g)) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("tangents must have zero mean") {
    Grid g = make_grid(64);
    CHECK_THROWS_AS(fisher_inner(ScalarField(g, 0.5), ScalarField(g, 0.0),
                                 Density::uniform(g)),
                    NotTangent);
}

TEST_CASE("square-root lift lands on the unit sphere") {
    Rng rng(62);
    for (int trial = 0; trial < 5; ++trial) {
        Density nu = random_density(make_grid(128), rng);
        ScalarField f = sqrt_lift(nu);
        CHECK(integrate(pointwise_mul(f, f)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(max_abs(pointwise_mul(f, f) - nu.ratio()) < 1e-15);
    }
}

TEST_CASE("geodesic endpoints are returned bit-exactly") {
    Grid g = make_grid(64);
    Density a = Density::uniform(g);
    Density b = sine_half(g);
    Density at0 = fisher_geodesic(a, b, 0.0);
    Density at1 = fisher_geodesic(a, b, 1.0);
    for (size_t i = 0; i < a.ratio().size(); ++i) {
        CHECK(at0.ratio()[i] == a.ratio()[i]);
        CHECK(at1.ratio()[i] == b.ratio()[i]);
    }
    CHECK_THROWS_AS(fisher_geodesic(a, b, 1.5), ValidationError);
}

TEST_CASE("geodesic stays on the sphere of densities") {
    Grid g = make_grid(128);
    Density a = Density::uniform(g);
    Density b = sine_half(g);
    for (double t : {0.25, 0.5, 0.75}) {
        Density mid = fisher_geodesic(a, b, t);
        CHECK(std::abs(integrate(mid.ratio()) - 1.0) < 1e-10);
        double lo = 1e9;
        for (size_t i = 0; i < mid.ratio().size(); ++i) lo = std::min(lo, mid.ratio()[i]);
        CHECK(lo > 0.0);
    }

    // identical endpoints: the zero-angle branch returns the common density
    Density same = fisher_geodesic(b, b, 0.37);
    CHECK(max_abs(same.ratio() - b.ratio()) < 1e-12);
}

TEST_CASE("sampling the geodesic reproduces the distance as a length") {
    Grid g = make_grid(128);
    Density a = Density::uniform(g);
    Density b = sine_half(g);
    double theta = fisher_distance(a, b);
    double length = 0.0;
    Density prev = a;
    for (int k = 1; k <= 64; ++k) {
        Density next = fisher_geodesic(a, b, double(k) / 64.0);
        length += fisher_distance(prev, next);
        prev = next;
    }
    CHECK(std::abs(length - theta) < 1e-4);
}

TEST_CASE("the lift is an isometry") {
    // fisher_inner(dr, dr, nu(t)) = 4 * int (d/dt sqrt(ratio))^2 along a path
    Grid g = make_grid(256);
    auto ratio_at = [&](double t) {
        return sample(g, [=](double x, double) {
            return 1.0 + 0.3 * t * std::sin(tau * x);
        });
    };
    double t0 = 0.6, h = 1e-5;
    ScalarField rdot = sample(g, [](double x, double) { return 0.3 * std::sin(tau * x); });
    double lhs = fisher_inner(rdot, rdot, Density(ratio_at(t0)));

    ScalarField fp = ratio_at(t0 + h), fm = ratio_at(t0 - h);
    double rhs = 0.0;
    ScalarField sq(g);
    for (size_t i = 0; i < sq.size(); ++i) {
        double d = (std::sqrt(fp[i]) - std::sqrt(fm[i])) / (2.0 * h);
        sq[i] = d * d;
    }
    rhs = 4.0 * integrate(sq);
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(lhs));
}

TEST_CASE("pullback by the identity and by translations") {
    Grid g = make_grid(64);
    Density nu = sine_half(g);
    PullbackStats st;
    Density same = pullback_density(nu, DiffeoMap::identity(g), &st);
    CHECK(max_abs(same.ratio() - nu.ratio()) < 1e-13);
    CHECK(st.mass_defect < 1e-13);

    // pulling back vol gives the jacobian as the ratio
    Rng rng(63);
    DiffeoMap phi = random_diffeo(g, rng);
    Density vol_pb = pullback_density(Density::uniform(g), phi, &st);
    CHECK(max_abs(vol_pb.ratio() - phi.jacobian()) < 1e-10);
}

TEST_CASE("pullback conserves mass before the logged renormalisation") {
    Rng rng(64);
    Grid g = make_grid(128);
    for (int trial = 0; trial < 5; ++trial) {
        DiffeoMap phi = random_diffeo(g, rng);
        Density nu = random_density(g, rng);
        PullbackStats st;
        pullback_density(nu, phi, &st);
        CHECK(st.mass_defect < 2e-6);
    }
    CHECK_THROWS_AS(pullback_density(Density::uniform(g),
                                     DiffeoMap::identity(make_grid(64))),
                    ValidationError);
}

TEST_CASE("the metric is invariant under pullback") {
    Grid g = make_grid(128);
    Rng rng(65);
    DiffeoMap phi = random_diffeo(g, rng);
    Density nu = random_density(g, rng);
    ScalarField a = random_smooth_scalar(g, rng, 3, 0.3, true);
    ScalarField b = random_smooth_scalar(g, rng, 3, 0.3, true);

    // tangents pull back like densities: (a o phi) Jac(phi)
    ScalarField jac = phi.jacobian();
    auto pull = [&](const ScalarField& f) {
        SplineInterpolant s(f);
        ScalarField out(g);
        for (size_t i = 0; i < out.size(); ++i) {
            Point p = grid_point(g, i);
            out[i] = s(p[0] + phi.displacement()[0][i]) * jac[i];
        }
        return out;
    };

    double lhs = fisher_inner(pull(a), pull(b), pullback_density(nu, phi), 1e-5);
    double rhs = fisher_inner(a, b, nu);
    CHECK(std::abs(lhs - rhs) < 5e-4 * std::max(1.0, std::abs(rhs)));

    // and so is the distance
    Density mu = random_density(g, rng);
    double d1 = fisher_distance(pullback_density(nu, phi), pullback_density(mu, phi));
    double d2 = fisher_distance(nu, mu);
    CHECK(std::abs(d1 - d2) < 1e-5);
}

}
