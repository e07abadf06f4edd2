#include "infotrans/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace infotrans {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// One forward (r2c) and one backward (c2r) plan per grid shape. Plans are
// created once under a lock with FFTW_ESTIMATE (deterministic choice) and
// FFTW_UNALIGNED (safe for std::vector storage); execution via the new-array
// interface is thread-safe.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const Grid& g) {
    static std::map<std::tuple<int, int, int>, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(g.dim, g.sizes[0], g.sizes[1]);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PlanPair p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (g.dim == 1) {
        int n = g.sizes[0];
        std::vector<double> re(n);
        std::vector<std::complex<double>> cx(n / 2 + 1);
        p.fwd = fftw_plan_dft_r2c_1d(n, re.data(), reinterpret_cast<fftw_complex*>(cx.data()), flags);
        p.bwd = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cx.data()), re.data(), flags);
    } else {
        int n0 = g.sizes[0], n1 = g.sizes[1];
        std::vector<double> re(std::size_t(n0) * n1);
        std::vector<std::complex<double>> cx(std::size_t(n0) * (n1 / 2 + 1));
        p.fwd = fftw_plan_dft_r2c_2d(n0, n1, re.data(), reinterpret_cast<fftw_complex*>(cx.data()), flags);
        p.bwd = fftw_plan_dft_c2r_2d(n0, n1, reinterpret_cast<fftw_complex*>(cx.data()), re.data(), flags);
    }
    return cache.emplace(key, p).first->second;
}

std::size_t spectrum_size(const Grid& g) {
    if (g.dim == 1) return std::size_t(g.sizes[0] / 2 + 1);
    return std::size_t(g.sizes[0]) * (g.sizes[1] / 2 + 1);
}

} // namespace

int wavenumber(int index, int n) { return index <= n / 2 ? index : index - n; }

Spectrum analyze(const ScalarField& f) {
    validate_grid(f.grid());
    Spectrum s{f.grid(), std::vector<std::complex<double>>(spectrum_size(f.grid()))};
    std::vector<double> in(f.data(), f.data() + f.size());
    fftw_execute_dft_r2c(plans_for(f.grid()).fwd, in.data(),
                         reinterpret_cast<fftw_complex*>(s.c.data()));
    double norm = 1.0 / double(f.grid().points());
    for (auto& z : s.c) z *= norm;
    return s;
}

ScalarField synthesize(const Spectrum& s) {
    ScalarField out(s.grid);
    std::vector<std::complex<double>> scratch(s.c); // c2r destroys its input
    fftw_execute_dft_c2r(plans_for(s.grid).bwd,
                         reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    return out;
}

namespace {

// Applies a per-mode multiplier; fn receives integer wavenumbers (k0, k1).
template <typename Fn>
void apply_multiplier(Spectrum& s, Fn&& fn) {
    const Grid& g = s.grid;
    if (g.dim == 1) {
        int half = g.sizes[0] / 2;
        for (int k = 0; k <= half; ++k) s.c[k] *= fn(k, 0);
    } else {
        int n0 = g.sizes[0], half1 = g.sizes[1] / 2;
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n0; ++i0) {
            int k0 = wavenumber(i0, n0);
            for (int k1 = 0; k1 <= half1; ++k1, ++idx) s.c[idx] *= fn(k0, k1);
        }
    }
}

} // namespace

ScalarField spectral_derivative(const ScalarField& f, int axis, int order) {
    const Grid& g = f.grid();
    if (axis < 0 || axis >= g.dim)
        throw WrongDimension("derivative axis out of range for this grid");
    if (order < 1) throw ValidationError("derivative order must be positive");

    Spectrum s = analyze(f);
    int nyq0 = g.sizes[0] / 2;
    int nyq1 = g.sizes[1] / 2;
    bool odd = order % 2 != 0;
    apply_multiplier(s, [&](int k0, int k1) -> std::complex<double> {
        int k = axis == 0 ? k0 : k1;
        // the unpaired Nyquist mode has no well-defined odd derivative
        if (odd && ((axis == 0 && std::abs(k0) == nyq0) || (axis == 1 && k1 == nyq1)))
            return 0.0;
        return std::pow(std::complex<double>(0.0, kTwoPi * k), order);
    });
    return synthesize(s);
}

ScalarField laplacian(const ScalarField& f) {
    Spectrum s = analyze(f);
    apply_multiplier(s, [](int k0, int k1) {
        return -kTwoPi * kTwoPi * (double(k0) * k0 + double(k1) * k1);
    });
    return synthesize(s);
}

ScalarField inverse_laplacian(const ScalarField& f, double mean_tol) {
    double mean = integrate(f);
    if (std::abs(mean) > mean_tol * std::max(1.0, max_abs(f)))
        throw MeanNotZero("inverse_laplacian needs a mean-zero source, got mean " +
                          std::to_string(mean));
    Spectrum s = analyze(f);
    apply_multiplier(s, [](int k0, int k1) {
        double k2 = double(k0) * k0 + double(k1) * k1;
        if (k2 == 0.0) return 0.0; // pin the free constant to zero mean
        return -1.0 / (kTwoPi * kTwoPi * k2);
    });
    return synthesize(s);
}

int dealias_cutoff(int n) { return (n - 1) / 3; }

ScalarField dealias(const ScalarField& f) {
    const Grid& g = f.grid();
    int c0 = dealias_cutoff(g.sizes[0]);
    int c1 = dealias_cutoff(g.sizes[1]);
    Spectrum s = analyze(f);
    apply_multiplier(s, [&](int k0, int k1) -> double {
        if (std::abs(k0) > c0) return 0.0;
        if (g.dim == 2 && std::abs(k1) > c1) return 0.0;
        return 1.0;
    });
    return synthesize(s);
}

VectorField dealias(const VectorField& f) {
    VectorField out(f.grid());
    for (int c = 0; c < f.components(); ++c) out[c] = dealias(f[c]);
    return out;
}

double integrate(const ScalarField& f) {
    // mean of samples: exact periodic quadrature for resolved trig polynomials
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i];
    return acc / double(f.size());
}

double inner(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid(), b.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc / double(a.size());
}

double inner(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid(), b.grid());
    double acc = 0.0;
    for (int c = 0; c < a.components(); ++c) acc += inner(a[c], b[c]);
    return acc;
}

double l2_norm(const ScalarField& a) { return std::sqrt(std::max(0.0, inner(a, a))); }
double l2_norm(const VectorField& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid());
    for (int c = 0; c < f.grid().dim; ++c) out[c] = spectral_derivative(f, c, 1);
    return out;
}

ScalarField divergence(const VectorField& v) {
    ScalarField out = spectral_derivative(v[0], 0, 1);
    if (v.grid().dim == 2) out = out + spectral_derivative(v[1], 1, 1);
    return out;
}

ScalarField curl2d(const VectorField& v) {
    if (v.grid().dim != 2) throw WrongDimension("curl2d needs a 2-D field");
    return spectral_derivative(v[1], 0, 1) - spectral_derivative(v[0], 1, 1);
}

HodgeComponents hodge_decompose(const VectorField& v) {
    const Grid& g = v.grid();
    HodgeComponents out;
    for (int c = 0; c < g.dim; ++c) out.harmonic[c] = integrate(v[c]);

    // potential solves laplacian(f) = div v; divergence is mean-zero by
    // construction so the Poisson solve is safe
    out.potential = inverse_laplacian(divergence(v), 1e-6);

    if (g.dim == 1) {
        // on the circle mean + gradient is everything; the remainder is
        // round-off, not a divergence-free field
        out.divfree = VectorField(g);
        return out;
    }

    out.divfree = v - gradient(out.potential);
    for (int c = 0; c < g.dim; ++c)
        for (std::size_t i = 0; i < out.divfree[c].size(); ++i)
            out.divfree[c][i] -= out.harmonic[c];
    return out;
}

VectorField recompose(const HodgeComponents& h) {
    VectorField out = h.divfree + gradient(h.potential);
    for (int c = 0; c < out.grid().dim; ++c)
        for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] += h.harmonic[c];
    return out;
}

} // namespace infotrans
