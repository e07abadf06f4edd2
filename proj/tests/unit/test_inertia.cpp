#include <doctest.h>

#include <cmath>
#include <numbers>

#include <infotrans/inertia.hpp>
#include <infotrans/rng.hpp>

using namespace infotrans;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;
} // namespace

TEST_SUITE("inertia") {

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate(MetricParams{1.0, 1.0, 0.0}));
    CHECK_NOTHROW(validate(MetricParams{0.5, 2.0, 1.0}));
    CHECK_THROWS_AS(validate(MetricParams{0.0, 1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(validate(MetricParams{1.0, 0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(validate(MetricParams{1.0, 1.0, -0.1}), ValidationError);
    CHECK_THROWS_AS(validate(MetricParams{1.0, 1.0, 1.1}), ValidationError);
}

TEST_CASE("constant fields pass through unchanged") {
    Grid g = make_grid(16, 16);
    VectorField c(g);
    for (double& x : c[0].values()) x = 0.4;
    for (double& x : c[1].values()) x = -1.1;
    MetricParams p{0.3, 2.5, 0.8};
    CHECK(max_abs(apply_inertia(c, p) - c) < 1e-14);
    CHECK(max_abs(apply_inertia_inverse(c, p) - c) < 1e-14);
    // harmonic weight 1: energy is the squared magnitude
    CHECK(energy(c, p) == doctest::Approx(0.4 * 0.4 + 1.1 * 1.1).epsilon(1e-13));
}

TEST_CASE("gradient modes scale with beta times the Laplacian eigenvalue") {
    Grid g = make_grid(64);
    VectorField u(g);
    u[0] = sample(g, [](double x, double) { return tau * std::cos(tau * x); }); // grad(sin)
    MetricParams p{1.0, 1.0, 0.0};

    VectorField m = apply_inertia(u, p);
    CHECK(max_abs(m - tau * tau * u) < 1e-9);
    CHECK(energy(u, p) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi *
                                          tau * tau).epsilon(1e-12));

    MetricParams p2{1.0, 2.0, 0.0};
    VectorField back = apply_inertia_inverse(u, p2);
    CHECK(max_abs(back - (1.0 / (2.0 * tau * tau)) * u) < 1e-12);
}

TEST_CASE("rotational modes scale with (1-gamma) + alpha times the eigenvalue") {
    Grid g = make_grid(48, 48);
    ScalarField psi = sample(g, [](double x0, double x1) {
        return std::sin(tau * x0) * std::sin(tau * x1);
    });
    VectorField u(g);
    u[0] = -1.0 * spectral_derivative(psi, 1);
    u[1] = spectral_derivative(psi, 0);

    MetricParams p{0.5, 1.0, 0.25};
    double mult = (1.0 - p.gamma) + p.alpha * 2.0 * tau * tau;
    CHECK(max_abs(apply_inertia(u, p) - mult * u) < 1e-8);
}

TEST_CASE("inverse undoes the operator on random fields") {
    Rng rng(31);
    MetricParams p{1.3, 0.7, 0.4};
    for (Grid g : {make_grid(64), make_grid(32, 32)}) {
        VectorField u = random_smooth_vector(g, rng);
        CHECK(max_abs(apply_inertia(apply_inertia_inverse(u, p), p) - u) <
              1e-9 * max_abs(u));
        CHECK(max_abs(apply_inertia_inverse(apply_inertia(u, p), p) - u) <
              1e-9 * max_abs(u));
    }
}

TEST_CASE("the energy pairing is symmetric and positive") {
    Rng rng(32);
    MetricParams p{0.9, 1.7, 0.6};
    Grid g = make_grid(32, 32);
    for (int trial = 0; trial < 20; ++trial) {
        VectorField u = random_smooth_vector(g, rng);
        VectorField v = random_smooth_vector(g, rng);
        double uv = inner(apply_inertia(u, p), v);
        double vu = inner(apply_inertia(v, p), u);
        double scale = std::sqrt(energy(u, p) * energy(v, p));
        CHECK(std::abs(uv - vu) < 1e-12 * scale);
        CHECK(energy(u, p) > 0.0);
    }
}

TEST_CASE("distinct Hodge components are orthogonal under the pairing") {
    Rng rng(33);
    MetricParams p{1.1, 0.8, 0.3};
    Grid g = make_grid(32, 32);
    HodgeComponents h = hodge_decompose(random_smooth_vector(g, rng));
    VectorField hm(g);
    for (int c = 0; c < 2; ++c)
        for (double& x : hm[c].values()) x = h.harmonic[size_t(c)];
    VectorField gr = gradient(h.potential);

    double scale = energy(recompose(h), p);
    CHECK(std::abs(inner(apply_inertia(h.divfree, p), gr)) < 1e-10 * scale);
    CHECK(std::abs(inner(apply_inertia(hm, p), gr)) < 1e-12 * scale);
    CHECK(std::abs(inner(apply_inertia(hm, p), h.divfree)) < 1e-12 * scale);
}

TEST_CASE("1-D reduction is the mean-plus-slope inner product") {
    // on the circle with beta = 1: <u,v> = (int u)(int v) + int u_x v_x
    Rng rng(34);
    Grid g = make_grid(128);
    MetricParams p{1.0, 1.0, 0.0};
    for (int trial = 0; trial < 10; ++trial) {
        VectorField u = random_smooth_vector(g, rng);
        VectorField v = random_smooth_vector(g, rng);
        double lhs = inner(apply_inertia(u, p), v);
        double rhs = integrate(u[0]) * integrate(v[0]) +
                     inner(spectral_derivative(u[0], 0), spectral_derivative(v[0], 0));
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("split energy separates the divergence part") {
    Rng rng(35);
    Grid g = make_grid(32, 32);
    MetricParams p{1.2, 2.0, 0.5};

    ScalarField w = random_smooth_scalar(g, rng, 3, 1.0, true);
    EnergySplit grad_split = split_energy(gradient(w), p);
    CHECK(grad_split.h_part < 1e-10 * grad_split.fisher_part);

    VectorField v = random_smooth_vector(g, rng);
    HodgeComponents h = hodge_decompose(v);
    VectorField solenoidal = recompose(HodgeComponents{h.harmonic, h.divfree,
                                                       ScalarField(g, 0.0)});
    EnergySplit div_split = split_energy(solenoidal, p);
    CHECK(div_split.fisher_part < 1e-10 * div_split.h_part);

    EnergySplit mixed = split_energy(v, p);
    CHECK(mixed.h_part + mixed.fisher_part ==
          doctest::Approx(energy(v, p)).epsilon(1e-10));
    // the part that descends to the density side is beta * ||div u||^2
    ScalarField d = divergence(v);
    CHECK(mixed.fisher_part == doctest::Approx(p.beta * inner(d, d)).epsilon(1e-10));
}

}
