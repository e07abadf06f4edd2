#include "infotrans/matrix_transport.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace infotrans {
namespace {

void check_square(const Mat& A) {
    if (A.n < 1 || A.a.size() != std::size_t(A.n) * A.n)
        throw ValidationError("matrix storage does not match its size");
}

void check_same_size(const Mat& A, const Mat& B) {
    if (A.n != B.n) throw ValidationError("matrix sizes differ");
}

double max_abs_entry(const Mat& A) {
    double m = 0.0;
    for (double x : A.a) m = std::max(m, std::abs(x));
    return m;
}

// LU with partial pivoting; returns false on numerical singularity.
bool lu_factor(Mat& A, std::vector<int>& piv, int& sign) {
    int n = A.n;
    piv.resize(n);
    sign = 1;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
        if (A(p, k) == 0.0) return false;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(p, j), A(k, j));
            sign = -sign;
        }
        piv[k] = p;
        for (int i = k + 1; i < n; ++i) {
            A(i, k) /= A(k, k);
            for (int j = k + 1; j < n; ++j) A(i, j) -= A(i, k) * A(k, j);
        }
    }
    return true;
}

} // namespace

Mat mat_identity(int n) {
    Mat I(n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Mat mat_mul(const Mat& A, const Mat& B) {
    check_same_size(A, B);
    int n = A.n;
    Mat C(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

Mat mat_transpose(const Mat& A) {
    Mat T(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) T(j, i) = A(i, j);
    return T;
}

Mat mat_add(const Mat& A, const Mat& B) {
    check_same_size(A, B);
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] += B.a[i];
    return C;
}

Mat mat_scale(double s, const Mat& A) {
    Mat C = A;
    for (double& x : C.a) x *= s;
    return C;
}

Mat mat_commutator(const Mat& A, const Mat& B) {
    return mat_add(mat_mul(A, B), mat_scale(-1.0, mat_mul(B, A)));
}

double mat_trace(const Mat& A) {
    double t = 0.0;
    for (int i = 0; i < A.n; ++i) t += A(i, i);
    return t;
}

double frobenius(const Mat& A) {
    double t = 0.0;
    for (double x : A.a) t += x * x;
    return std::sqrt(t);
}

double mat_det(const Mat& A) {
    check_square(A);
    Mat LU = A;
    std::vector<int> piv;
    int sign;
    if (!lu_factor(LU, piv, sign)) return 0.0;
    double d = sign;
    for (int i = 0; i < A.n; ++i) d *= LU(i, i);
    return d;
}

Mat mat_inverse(const Mat& A) {
    check_square(A);
    int n = A.n;
    Mat LU = A;
    std::vector<int> piv;
    int sign;
    if (!lu_factor(LU, piv, sign))
        throw SingularMatrix("matrix is numerically singular");
    Mat X(n);
    // solve A x = e_j column by column
    for (int j = 0; j < n; ++j) {
        std::vector<double> b(n, 0.0);
        b[j] = 1.0;
        for (int k = 0; k < n; ++k) std::swap(b[k], b[piv[k]]);
        for (int i = 1; i < n; ++i)
            for (int k = 0; k < i; ++k) b[i] -= LU(i, k) * b[k];
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) b[i] -= LU(i, k) * b[k];
            b[i] /= LU(i, i);
        }
        for (int i = 0; i < n; ++i) X(i, j) = b[i];
    }
    return X;
}

Mat strict_lower(const Mat& A) {
    Mat L(A.n);
    for (int i = 1; i < A.n; ++i)
        for (int j = 0; j < i; ++j) L(i, j) = A(i, j);
    return L;
}

Mat upper_part(const Mat& A) {
    Mat U(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = i; j < A.n; ++j) U(i, j) = A(i, j);
    return U;
}

void validate_symmetric(const Mat& M, double tol) {
    check_square(M);
    double scale = std::max(1.0, max_abs_entry(M));
    for (int i = 0; i < M.n; ++i)
        for (int j = i + 1; j < M.n; ++j)
            if (std::abs(M(i, j) - M(j, i)) > tol * scale)
                throw NotSymmetric("matrix is not symmetric within tolerance");
}

void validate_upper_positive(const Mat& R) {
    check_square(R);
    for (int i = 0; i < R.n; ++i) {
        if (!(R(i, i) > 0.0))
            throw ValidationError("triangular factor needs a positive diagonal");
        for (int j = 0; j < i; ++j)
            if (R(i, j) != 0.0)
                throw ValidationError("matrix is not upper triangular");
    }
}

void validate_skew(const Mat& X, double tol) {
    check_square(X);
    double scale = std::max(1.0, max_abs_entry(X));
    for (int i = 0; i < X.n; ++i)
        for (int j = i; j < X.n; ++j)
            if (std::abs(X(i, j) + X(j, i)) > tol * scale)
                throw ValidationError("matrix is not skew-symmetric within tolerance");
}

double sym_metric(const Mat& M, const Mat& U, const Mat& V) {
    validate_symmetric(M);
    validate_symmetric(U);
    validate_symmetric(V);
    Mat Minv = mat_inverse(M);
    // tr(M^-1 U M^-1 V): the form the horizontal lift of the triangular
    // factorisation produces, and the one invariant under M -> A^T M A.
    Mat t = mat_mul(Minv, mat_mul(U, mat_mul(Minv, V)));
    return mat_trace(t);
}

double gl_metric_identity(const Mat& u, const Mat& v) {
    check_same_size(u, v);
    int n = u.n;
    double low = 0.0;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) low += u(i, j) * v(i, j);
    double sym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sym += (u(i, j) + u(j, i)) * (v(i, j) + v(j, i));
    return low + sym;
}

double gl_metric(const Mat& A, const Mat& U, const Mat& V) {
    check_same_size(A, U);
    check_same_size(A, V);
    Mat Ainv = mat_inverse(A);
    return gl_metric_identity(mat_mul(U, Ainv), mat_mul(V, Ainv));
}

double check_descending(const Mat& u, const Mat& v, const Mat& xi) {
    check_same_size(u, v);
    check_same_size(u, xi);
    validate_skew(xi);
    for (int i = 1; i < u.n; ++i)
        for (int j = 0; j < i; ++j)
            if (u(i, j) != 0.0 || v(i, j) != 0.0)
                throw ValidationError("descent defect is defined for upper-triangular arguments");
    double d = gl_metric_identity(mat_commutator(xi, u), v) +
               gl_metric_identity(u, mat_commutator(xi, v));
    return std::abs(d);
}

QrResult qr_polar_factorise(const Mat& A) {
    check_square(A);
    int n = A.n;
    double scale = max_abs_entry(A);
    if (scale == 0.0) throw SingularMatrix("zero matrix has no QR polar factorisation");

    Mat R = A;
    Mat Q = mat_identity(n);

    // Householder sweeps: R <- H_k R, Q <- Q H_k
    std::vector<double> v(n);
    for (int k = 0; k < n - 1; ++k) {
        double norm = 0.0;
        for (int i = k; i < n; ++i) norm += R(i, k) * R(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        double head = R(k, k);
        double sign = head >= 0.0 ? 1.0 : -1.0;
        for (int i = k; i < n; ++i) v[i] = R(i, k);
        v[k] += sign * norm;
        double vv = 0.0;
        for (int i = k; i < n; ++i) vv += v[i] * v[i];
        if (vv == 0.0) continue;

        for (int j = k; j < n; ++j) {
            double dot = 0.0;
            for (int i = k; i < n; ++i) dot += v[i] * R(i, j);
            double f = 2.0 * dot / vv;
            for (int i = k; i < n; ++i) R(i, j) -= f * v[i];
        }
        for (int i = 0; i < n; ++i) {
            double dot = 0.0;
            for (int j = k; j < n; ++j) dot += Q(i, j) * v[j];
            double f = 2.0 * dot / vv;
            for (int j = k; j < n; ++j) Q(i, j) -= f * v[j];
        }
    }

    // clear round-off below the diagonal, then force the diagonal positive
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) R(i, j) = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(R(i, i)) <= 1e-12 * scale)
            throw SingularMatrix("input is numerically singular: tiny pivot in R");
        if (R(i, i) < 0.0) {
            for (int j = i; j < n; ++j) R(i, j) = -R(i, j);
            for (int k = 0; k < n; ++k) Q(k, i) = -Q(k, i);
        }
    }
    return {Q, R};
}

Mat cholesky(const Mat& M) {
    validate_symmetric(M);
    int n = M.n;
    Mat L(n);
    for (int j = 0; j < n; ++j) {
        double d = M(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0))
            throw NotPositiveDefinite("matrix is not positive definite: pivot " +
                                      std::to_string(d) + " at index " + std::to_string(j));
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = M(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

namespace {

// Elementary basis of the upper-triangular algebra, (i,j) with i <= j.
struct UppBasis {
    int n;
    std::vector<std::pair<int, int>> idx;

    explicit UppBasis(int size) : n(size) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) idx.emplace_back(i, j);
    }
    int dim() const { return int(idx.size()); }
    Mat element(int a) const {
        Mat E(n);
        E(idx[a].first, idx[a].second) = 1.0;
        return E;
    }
    std::vector<double> coords(const Mat& u) const {
        std::vector<double> x(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) x[a] = u(idx[a].first, idx[a].second);
        return x;
    }
    Mat assemble(const std::vector<double>& x) const {
        Mat u(n);
        for (std::size_t a = 0; a < idx.size(); ++a) u(idx[a].first, idx[a].second) = x[a];
        return u;
    }
};

// dense symmetric solve via LU (sizes <= n(n+1)/2, tiny)
std::vector<double> solve_dense(Mat A, std::vector<double> b) {
    std::vector<int> piv;
    int sign;
    if (!lu_factor(A, piv, sign)) throw SingularMatrix("singular system in algebra solve");
    int n = A.n;
    for (int k = 0; k < n; ++k) std::swap(b[k], b[piv[k]]);
    for (int i = 1; i < n; ++i)
        for (int k = 0; k < i; ++k) b[i] -= A(i, k) * b[k];
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) b[i] -= A(i, k) * b[k];
        b[i] /= A(i, i);
    }
    return b;
}

void validate_upper(const Mat& u) {
    for (int i = 1; i < u.n; ++i)
        for (int j = 0; j < i; ++j)
            if (u(i, j) != 0.0)
                throw ValidationError("velocity must lie in the upper-triangular algebra");
}

} // namespace

UppTrajectory euler_arnold_upp(const Mat& u0, double T, double dt) {
    check_square(u0);
    validate_upper(u0);
    if (!(dt > 0.0) || !(T > 0.0)) throw ValidationError("T and dt must be positive");
    long long steps = std::llround(T / dt);
    if (steps < 1 || std::abs(double(steps) * dt - T) > 1e-9 * std::max(1.0, T))
        throw ValidationError("T must be a whole number of dt steps");

    UppBasis basis(u0.n);
    int d = basis.dim();

    // Gram matrix of the inner product on the elementary basis
    Mat gram(d);
    for (int a = 0; a < d; ++a) {
        Mat Ea = basis.element(a);
        for (int b = 0; b < d; ++b) gram(a, b) = gl_metric_identity(Ea, basis.element(b));
    }

    // coordinate velocity: G x' = -c(u), c_b = g(u, [u, E_b])
    auto u_dot = [&](const Mat& u) {
        std::vector<double> c(d);
        for (int b = 0; b < d; ++b)
            c[b] = -gl_metric_identity(u, mat_commutator(u, basis.element(b)));
        return basis.assemble(solve_dense(gram, c));
    };

    UppTrajectory traj;
    traj.dt = dt;
    Mat u = u0;
    Mat R = mat_identity(u0.n);
    double e0 = gl_metric_identity(u0, u0);

    auto push = [&](long long s) {
        traj.times.push_back(double(s) * dt);
        traj.u.push_back(u);
        traj.R.push_back(R);
        if (e0 > 0.0)
            traj.energy_drift = std::max(traj.energy_drift,
                                         std::abs(gl_metric_identity(u, u) - e0) / e0);
    };

    push(0);
    for (long long s = 0; s < steps; ++s) {
        // coupled RK4 on (u, R): u' as above, R' = u R
        Mat ku1 = u_dot(u);
        Mat kR1 = mat_mul(u, R);

        Mat u2 = mat_add(u, mat_scale(0.5 * dt, ku1));
        Mat R2 = mat_add(R, mat_scale(0.5 * dt, kR1));
        Mat ku2 = u_dot(u2);
        Mat kR2 = mat_mul(u2, R2);

        Mat u3 = mat_add(u, mat_scale(0.5 * dt, ku2));
        Mat R3 = mat_add(R, mat_scale(0.5 * dt, kR2));
        Mat ku3 = u_dot(u3);
        Mat kR3 = mat_mul(u3, R3);

        Mat u4 = mat_add(u, mat_scale(dt, ku3));
        Mat R4 = mat_add(R, mat_scale(dt, kR3));
        Mat ku4 = u_dot(u4);
        Mat kR4 = mat_mul(u4, R4);

        u = mat_add(u, mat_scale(dt / 6.0,
                                 mat_add(mat_add(ku1, mat_scale(2.0, ku2)),
                                         mat_add(mat_scale(2.0, ku3), ku4))));
        R = mat_add(R, mat_scale(dt / 6.0,
                                 mat_add(mat_add(kR1, mat_scale(2.0, kR2)),
                                         mat_add(mat_scale(2.0, kR3), kR4))));
        push(s + 1);
    }
    return traj;
}

ShootResult geodesic_shoot_qr(const Mat& M, double tol, int max_iter) {
    validate_symmetric(M);
    cholesky(M); // positive definiteness gate
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");

    int n = M.n;
    UppBasis basis(n);
    int d = basis.dim();

    const double dt = 2e-3; // integration error ~1e-11, far below the shot tolerance

    auto endpoint = [&](const Mat& u0) {
        UppTrajectory t = euler_arnold_upp(u0, 1.0, dt);
        return t.R.back();
    };

    auto residual_vec = [&](const Mat& u0) {
        Mat R1 = endpoint(u0);
        Mat F = mat_add(mat_mul(mat_transpose(R1), R1), mat_scale(-1.0, M));
        return basis.coords(upper_part(F)); // symmetric defect: upper half carries it all
    };

    auto norm_inf = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) {
            if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
            m = std::max(m, std::abs(x));
        }
        return m;
    };

    // start from the linearisation of R^T R = M around the identity
    Mat half = mat_scale(0.5, mat_add(M, mat_scale(-1.0, mat_identity(n))));
    Mat u = upper_part(half);

    std::vector<double> F = residual_vec(u);
    double fn = norm_inf(F);
    double target = std::min(tol * 1e-2, 1e-9);
    int iters = 0;

    while (fn > target && iters < max_iter) {
        if (!std::isfinite(fn))
            throw ShootingDiverged("endpoint integration overflowed; target too far from identity");
        // finite-difference Jacobian, column by column
        Mat J(d);
        std::vector<double> x = basis.coords(u);
        for (int c = 0; c < d; ++c) {
            double eps = 1e-6 * std::max(1.0, std::abs(x[c]));
            std::vector<double> xp = x;
            xp[c] += eps;
            std::vector<double> Fp = residual_vec(basis.assemble(xp));
            for (int r = 0; r < d; ++r) J(r, c) = (Fp[r] - F[r]) / eps;
        }
        std::vector<double> rhs(d);
        for (int r = 0; r < d; ++r) rhs[r] = -F[r];
        std::vector<double> step = solve_dense(J, rhs);

        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h < 8; ++h) {
            std::vector<double> xt = x;
            for (int c = 0; c < d; ++c) xt[c] += lambda * step[c];
            Mat ut = basis.assemble(xt);
            std::vector<double> Ft = residual_vec(ut);
            double ft = norm_inf(Ft);
            if (ft < fn) {
                u = ut;
                F = Ft;
                fn = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        ++iters;
        if (!accepted)
            throw ShootingDiverged("shooting stalled at residual " + std::to_string(fn));
    }
    if (fn > target)
        throw ShootingDiverged("shooting did not reach tolerance in " +
                               std::to_string(max_iter) + " iterations");

    Mat R1 = endpoint(u);
    Mat F1 = mat_add(mat_mul(mat_transpose(R1), R1), mat_scale(-1.0, M));
    return {u, R1, iters, frobenius(F1)};
}

} // namespace infotrans
