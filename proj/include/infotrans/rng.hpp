#pragma once

#include <cstdint>

#include "infotrans/diffeo.hpp"
#include "infotrans/fisher.hpp"
#include "infotrans/grid.hpp"
#include "infotrans/matrix_transport.hpp"

namespace infotrans {

// splitmix64: tiny, seedable, identical on every platform. Distribution
// transforms are written out here so streams never depend on the standard
// library's implementation-defined choices.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform();                    // [0, 1)
    double uniform(double lo, double hi);
    double normal();                     // Box-Muller, one value per call pair

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Band-limited random fields: Gaussian coefficients on modes |k_j| <= kmax
// with 1/(1+|k|^2) falloff, synthesised spectrally. Deterministic per seed.
ScalarField random_smooth_scalar(const Grid& g, Rng& rng, int kmax = 4,
                                 double amplitude = 1.0, bool zero_mean = false);
VectorField random_smooth_vector(const Grid& g, Rng& rng, int kmax = 4,
                                 double amplitude = 1.0);

// id + displacement with the displacement rescaled until the Jacobian keeps
// a safe positive margin.
DiffeoMap random_diffeo(const Grid& g, Rng& rng, int kmax = 3, double scale = 0.05);

Density random_density(const Grid& g, Rng& rng, int kmax = 3, double contrast = 0.3);

Mat random_matrix(int n, Rng& rng, double scale = 1.0);
Mat random_spd(int n, Rng& rng);          // I + B^T B, well-conditioned
Mat random_upper(int n, Rng& rng);        // free diagonal
Mat random_skew(int n, Rng& rng);
Mat random_near_identity(int n, Rng& rng, double scale = 0.3);

} // namespace infotrans
