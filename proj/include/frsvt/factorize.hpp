#ifndef FRSVT_FACTORIZE_HPP
#define FRSVT_FACTORIZE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "frsvt/matrix.hpp"

namespace frsvt {

//
// Dense factorization kernels. Householder QR, pivoted QR, the symmetric
// eigensolver and the reference SVD are backed by Eigen; the Newton polar
// iteration and the partial Gram-Schmidt step are implemented here.
//

struct QrFactors
{
    Matrix Q;                  // orthonormal columns
    Matrix R;                  // upper triangular
    std::vector<Index> perm;   // QR-CP only: A.col(perm[j]) is column j of A*Pi
    Index revealed_rank = 0;   // QR-CP only
};

struct EigSymFactors
{
    Matrix V;   // orthonormal eigenvectors, column i pairs with d[i]
    Vector d;   // non-increasing
};

struct PolarFactors
{
    Matrix W;            // orthogonal factor
    Matrix P;            // symmetric positive semi-definite factor
    int iterations = 0;
};

struct ThinFactorization
{
    Matrix U;       // m x s, orthonormal columns
    Vector sigma;   // s values, non-negative and non-increasing
    Matrix V;       // n x s, orthonormal columns

    Index size() const noexcept { return sigma.size(); }
};

inline double default_rank_tol(Index m, Index n)
{
    return static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
}

namespace detail {

// flip signs so that diag(R) >= 0; keeps Q*R unchanged
inline void normalize_signs(Matrix& Q, Matrix& R)
{
    const Index k = std::min(Q.cols(), R.rows());
    for (Index j = 0; j < k; ++j)
    {
        if (R(j, j) < 0.0)
        {
            Q.col(j) *= -1.0;
            R.row(j) *= -1.0;
        }
    }
}

} // namespace detail

// Thin Householder QR. Requires rows >= cols; diag(R) is made non-negative.
inline QrFactors qr_thin(const Matrix& A)
{
    require(A.rows() >= A.cols(), "qr_thin: rows must be >= cols");
    const Index m = A.rows();
    const Index n = A.cols();

    QrFactors f;
    if (n == 0)
    {
        f.Q = Matrix(m, 0);
        f.R = Matrix(0, 0);
        return f;
    }

    Eigen::HouseholderQR<Matrix> qr(A);
    f.Q = qr.householderQ() * Matrix::Identity(m, n);
    f.R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    detail::normalize_signs(f.Q, f.R);
    return f;
}

//
// QR with column pivoting, truncated at the numerical rank: R(i,i) counts
// when |R(i,i)| > rank_tol * |R(0,0)|. Q and R keep only revealed_rank
// columns / rows, so A*Pi ~= Q*R up to the discarded trailing block.
//
inline QrFactors qr_cp(const Matrix& A, double rank_tol)
{
    require(A.rows() >= 1 && A.cols() >= 1, "qr_cp: matrix must be nonempty");
    require(rank_tol > 0.0 && rank_tol < 1.0, "qr_cp: rank_tol must lie in (0, 1)");

    const Index m = A.rows();
    const Index n = A.cols();
    const Index k = std::min(m, n);

    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    const Matrix& packed = qr.matrixQR();

    QrFactors f;
    f.perm.resize(static_cast<std::size_t>(n));
    const auto& idx = qr.colsPermutation().indices();
    for (Index j = 0; j < n; ++j)
        f.perm[static_cast<std::size_t>(j)] = idx(j);

    const double lead = std::abs(packed(0, 0));
    Index rank = 0;
    if (lead > 0.0)
    {
        while (rank < k && std::abs(packed(rank, rank)) > rank_tol * lead)
            ++rank;
    }
    f.revealed_rank = rank;

    f.Q = qr.householderQ() * Matrix::Identity(m, rank);
    f.R = packed.topRows(rank).triangularView<Eigen::Upper>();
    detail::normalize_signs(f.Q, f.R);
    return f;
}

inline QrFactors qr_cp(const Matrix& A)
{
    return qr_cp(A, default_rank_tol(A.rows(), A.cols()));
}

struct PartialOrthoResult
{
    Matrix Q;                              // [Q, accepted new directions]
    std::vector<double> residual_norms;    // one per column of Ynew, before normalization
};

//
// Modified Gram-Schmidt of the new columns against Q (and against the new
// columns already accepted), with one re-orthogonalization pass. The
// residual norm of each column is recorded before it is normalized; a
// column whose residual falls to 1e-12 of its original norm is dropped.
//
inline PartialOrthoResult partial_orthonormalize(const Matrix& Q, const Matrix& Ynew)
{
    require(Q.rows() == Ynew.rows() || Q.cols() == 0,
            "partial_orthonormalize: row count mismatch");
    const Index m = Ynew.rows();
    const Index base = Q.cols();

    Matrix out(m, base + Ynew.cols());
    if (base > 0)
        out.leftCols(base) = Q;

    PartialOrthoResult res;
    res.residual_norms.reserve(static_cast<std::size_t>(Ynew.cols()));

    Index cur = base;
    for (Index j = 0; j < Ynew.cols(); ++j)
    {
        Vector y = Ynew.col(j);
        const double orig = y.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (Index c = 0; c < cur; ++c)
                y -= out.col(c).dot(y) * out.col(c);

        const double r = y.norm();
        res.residual_norms.push_back(r);
        if (orig == 0.0 || r <= 1e-12 * orig)
            continue;
        out.col(cur++) = y / r;
    }
    res.Q = out.leftCols(cur);
    return res;
}

// Symmetric eigendecomposition with eigenvalues sorted non-increasing.
// Input is symmetrized first; roundoff negatives (>= -1e-10 |P|_2) clamp to 0.
inline EigSymFactors eig_sym(const Matrix& P)
{
    require(P.rows() == P.cols(), "eig_sym: matrix must be square");
    const Index n = P.rows();
    EigSymFactors f;
    if (n == 0)
    {
        f.V = Matrix(0, 0);
        f.d = Vector(0);
        return f;
    }

    const Matrix S = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success)
        throw NonConvergenceError("eig_sym: eigensolver failed", 0, 0.0);

    // Eigen returns ascending order
    f.d = es.eigenvalues().reverse();
    f.V = es.eigenvectors().rowwise().reverse();

    const double scale = f.d.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i)
        if (f.d(i) < 0.0 && f.d(i) >= -1e-10 * scale)
            f.d(i) = 0.0;
    return f;
}

struct PolarOptions
{
    double tol = 1e-12;
    int max_iter = 30;
    // Frobenius-norm scaling while far from convergence
    bool scaled = true;
};

//
// Orthogonal polar factor by Newton's iteration X <- (X + X^-T) / 2 from
// X = C, then P = sym(W^T C). Scaling multiplies X by
// zeta = sqrt(|X^-1|_F / |X|_F) each step until the update is small.
//
inline PolarFactors polar_newton(const Matrix& C, const PolarOptions& opt)
{
    require(C.rows() == C.cols(), "polar_newton: matrix must be square");
    require(opt.tol > 0.0 && opt.max_iter >= 1, "polar_newton: invalid options");
    const Index n = C.rows();

    PolarFactors f;
    if (n == 0)
    {
        f.W = Matrix(0, 0);
        f.P = Matrix(0, 0);
        return f;
    }

    constexpr double singular_rcond = 1e-14;
    // switch scaling off once the iterate is this close to orthogonal
    constexpr double unscaled_after = 1e-2;

    Matrix X = C;
    double last = std::numeric_limits<double>::infinity();
    bool scaling = opt.scaled;
    for (int it = 1; it <= opt.max_iter; ++it)
    {
        Eigen::PartialPivLU<Matrix> lu(X);
        const double rc = lu.rcond();
        if (!(rc > singular_rcond))
            throw SingularMatrixError("polar_newton: core matrix is numerically singular");

        const Matrix Xinv = lu.inverse();
        Matrix next;
        if (scaling)
        {
            const double zeta = std::sqrt(Xinv.norm() / X.norm());
            next = 0.5 * (zeta * X + Xinv.transpose() / zeta);
        }
        else
        {
            next = 0.5 * (X + Xinv.transpose());
        }

        const double step = (next - X).norm();
        const double rel = step / X.norm();
        X = std::move(next);
        last = rel;
        if (scaling && rel < unscaled_after)
            scaling = false;
        if (rel <= opt.tol)
        {
            f.iterations = it;
            f.W = std::move(X);
            const Matrix WtC = f.W.transpose() * C;
            f.P = 0.5 * (WtC + WtC.transpose());
            return f;
        }
    }
    throw NonConvergenceError("polar_newton: iteration limit reached", opt.max_iter, last);
}

inline PolarFactors polar_newton(const Matrix& C, double tol = 1e-12, int max_iter = 30)
{
    PolarOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return polar_newton(C, opt);
}

// Reference thin SVD (divide and conquer). s = min(m, n).
inline ThinFactorization svd_exact(const Matrix& A)
{
    require(A.rows() >= 1 && A.cols() >= 1, "svd_exact: matrix must be nonempty");
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NonConvergenceError("svd_exact: SVD failed", 0, 0.0);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Vector singular_values(const Matrix& A)
{
    require(A.rows() >= 1 && A.cols() >= 1, "singular_values: matrix must be nonempty");
    Eigen::BDCSVD<Matrix> svd(A);
    return svd.singularValues();
}

//
// norms
//

enum class NormKind { frobenius, spectral, linf, l1_entrywise, l0_count };

inline double frobenius_norm(const Matrix& A) { return A.norm(); }

inline double spectral_norm(const Matrix& A)
{
    if (A.size() == 0)
        return 0.0;
    return singular_values(A)(0);
}

// largest absolute entry
inline double max_abs(const Matrix& A)
{
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

inline double l1_entrywise(const Matrix& A) { return A.cwiseAbs().sum(); }

inline Index l0_count(const Matrix& A, double eps = 0.0)
{
    require(eps >= 0.0, "l0_count: eps must be non-negative");
    return (A.array().abs() > eps).count();
}

inline double norm(const Matrix& A, NormKind kind, double eps = 0.0)
{
    switch (kind)
    {
    case NormKind::frobenius: return frobenius_norm(A);
    case NormKind::spectral: return spectral_norm(A);
    case NormKind::linf: return max_abs(A);
    case NormKind::l1_entrywise: return l1_entrywise(A);
    case NormKind::l0_count: return static_cast<double>(l0_count(A, eps));
    }
    return 0.0;
}

} // namespace frsvt

#endif // FRSVT_FACTORIZE_HPP
