#pragma once

#include <vector>

#include "infotrans/errors.hpp"

namespace infotrans {

// Small dense square matrix, row-major. Sizes stay single-digit here, so all
// factorisations are written out directly instead of delegating to a BLAS.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int size) : n(size), a(std::size_t(size) * size, 0.0) {}

    double& operator()(int i, int j) { return a[std::size_t(i) * n + j]; }
    double operator()(int i, int j) const { return a[std::size_t(i) * n + j]; }
};

Mat mat_identity(int n);
Mat mat_mul(const Mat& A, const Mat& B);
Mat mat_transpose(const Mat& A);
Mat mat_add(const Mat& A, const Mat& B);
Mat mat_scale(double s, const Mat& A);
Mat mat_commutator(const Mat& A, const Mat& B); // AB - BA
double mat_trace(const Mat& A);
double frobenius(const Mat& A);
double mat_det(const Mat& A);
// LU solve with partial pivoting; SingularMatrix on (numerical) rank loss.
Mat mat_inverse(const Mat& A);

// Strictly lower-triangular part. Keeping the diagonal out is what makes the
// right-invariant metric below descend through R -> R^T R: with the diagonal
// included the descent identity fails on free-diagonal directions.
Mat strict_lower(const Mat& A);
Mat upper_part(const Mat& A); // upper triangle incl. diagonal

void validate_symmetric(const Mat& M, double tol = 1e-12);
void validate_upper_positive(const Mat& R);
void validate_skew(const Mat& X, double tol = 1e-12);

// Metric on symmetric positive-definite matrices: tr(M^-1 U M^-1 V),
// invariant under congruence M -> A^T M A, U -> A^T U A.
double sym_metric(const Mat& M, const Mat& U, const Mat& V);

// Right-invariant metric on GL(n), at identity
//   g(u,v) = tr(strict_lower(u)^T strict_lower(v)) + tr((u+u^T)(v+v^T)),
// translated by g_A(U,V) = g(U A^-1, V A^-1).
double gl_metric_identity(const Mat& u, const Mat& v);
double gl_metric(const Mat& A, const Mat& U, const Mat& V);

// |g([xi,u],v) + g(u,[xi,v])| at identity; zero for u,v upper triangular and
// xi skew is what lets the metric drop to the quotient.
double check_descending(const Mat& u, const Mat& v, const Mat& xi);

// Householder QR with R forced to positive diagonal. det(A) > 0 gives
// Q in SO(n); det(A) < 0 is accepted and lands in the other component.
struct QrResult {
    Mat Q;
    Mat R;
};

QrResult qr_polar_factorise(const Mat& A);

// Lower Cholesky factor of an SPD matrix; NotPositiveDefinite otherwise.
// Coincides with R^T from qr_polar_factorise of any A with A^T A = M.
Mat cholesky(const Mat& M);

// Euler-Arnold flow on the Lie algebra of upper-triangular matrices with
// positive diagonal, inner product as in gl_metric_identity (the strict-lower
// term vanishes there). The inertia operator is the Gram matrix on the
// n(n+1)/2 elementary basis. R is reconstructed via R' = u(t) R.
struct UppTrajectory {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Mat> u;
    std::vector<Mat> R;
    double energy_drift = 0.0; // max relative |g(u,u) - g(u0,u0)|
};

UppTrajectory euler_arnold_upp(const Mat& u0, double T, double dt);

// Newton shooting for the geodesic with R(0) = I, R(1)^T R(1) = M.
// Initial guess u0 = upper_part((M - I)/2); finite-difference Jacobian.
struct ShootResult {
    Mat u0;
    Mat R1;
    int newton_iters = 0;
    double residual = 0.0; // ||R(1)^T R(1) - M||_F at the solution
};

ShootResult geodesic_shoot_qr(const Mat& M, double tol = 1e-8, int max_iter = 100);

} // namespace infotrans
