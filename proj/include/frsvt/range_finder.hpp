#ifndef FRSVT_RANGE_FINDER_HPP
#define FRSVT_RANGE_FINDER_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "frsvt/factorize.hpp"
#include "frsvt/random.hpp"

namespace frsvt {

struct RangeConfig
{
    Index l = 1;                              // sampling rate k + p
    int eta = 2;                              // power iterations
    double rank_tol = 0.0;                    // 0 selects max(m, n) * eps of the sketch
    bool reorthonormalize_each_step = true;
};

struct RangeBasis
{
    Matrix Q;                                 // m x s, orthonormal columns
    Index s = 0;
    // propagate_range only: |y_i - Q Q^T y_i| for each fresh sample
    std::vector<double> residual_norms;
};

namespace detail {

inline double rank_tol_for(const RangeConfig& cfg, const Matrix& Y)
{
    return cfg.rank_tol > 0.0 ? cfg.rank_tol : default_rank_tol(Y.rows(), Y.cols());
}

} // namespace detail

//
// Y = A * Omega with Omega Gaussian (cols x l), then Q from pivoted QR of Y
// truncated at its numerical rank.
//
inline RangeBasis find_range(const Matrix& A, const RangeConfig& cfg, RngStream& rng)
{
    require(cfg.l >= 1, "find_range: sampling rate l must be >= 1");
    require(cfg.l <= std::min(A.rows(), A.cols()), "find_range: l exceeds min(rows, cols)");

    const Matrix omega = gaussian_matrix(rng, A.cols(), cfg.l);
    const Matrix Y = A * omega;
    QrFactors qr = qr_cp(Y, detail::rank_tol_for(cfg, Y));

    RangeBasis b;
    b.Q = std::move(qr.Q);
    b.s = b.Q.cols();
    return b;
}

//
// Reuse the previous basis and append p fresh samples A * omega,
// orthonormalized against it by partial Gram-Schmidt.
//
inline RangeBasis propagate_range(const Matrix& A, const Matrix& Qprev, Index p, RngStream& rng)
{
    require(p >= 0, "propagate_range: p must be non-negative");
    require(Qprev.cols() == 0 || Qprev.rows() == A.rows(),
            "propagate_range: basis row count differs from matrix");
    require(Qprev.cols() + p <= A.rows(), "propagate_range: basis would exceed row dimension");

    RangeBasis b;
    if (p == 0)
    {
        b.Q = Qprev.cols() == 0 ? Matrix(A.rows(), 0) : Qprev;
        b.s = b.Q.cols();
        return b;
    }

    const Matrix omega = gaussian_matrix(rng, A.cols(), p);
    const Matrix Y = A * omega;
    PartialOrthoResult po = partial_orthonormalize(Qprev.cols() == 0 ? Matrix(A.rows(), 0) : Qprev, Y);
    b.Q = std::move(po.Q);
    b.s = b.Q.cols();
    b.residual_norms = std::move(po.residual_norms);
    return b;
}

//
// Q <- orth(A A^T Q), eta times. With reorth off, intermediate products are
// only rescaled and orthonormalization happens at the last step. A positive
// reveal_rank_tol makes the first step a pivoted QR truncated at that
// relative tolerance (rank re-check after propagation).
//
inline Matrix power_iterate(const Matrix& A, const Matrix& Q, int eta, bool reorth,
                            double reveal_rank_tol = 0.0)
{
    require(eta >= 0, "power_iterate: eta must be non-negative");
    require(Q.cols() == 0 || Q.rows() == A.rows(), "power_iterate: basis row count differs");
    if (eta == 0 || Q.cols() == 0)
        return Q;

    Matrix cur = Q;
    for (int step = 0; step < eta; ++step)
    {
        Matrix Z = A * (A.transpose() * cur);
        const bool last = step + 1 == eta;
        if (step == 0 && reveal_rank_tol > 0.0)
        {
            if (Z.cols() == 0 || Z.norm() == 0.0)
                return Matrix(A.rows(), 0);
            cur = qr_cp(Z, reveal_rank_tol).Q;
            if (cur.cols() == 0)
                return cur;
        }
        else if (reorth || last)
        {
            cur = qr_thin(Z).Q;
        }
        else
        {
            const double scale = Z.cwiseAbs().maxCoeff();
            cur = scale > 0.0 ? Matrix(Z / scale) : Z;
        }
    }
    return cur;
}

// Probabilistic upper estimate of sigma_{k+1} from one residual sample:
// alpha * sqrt(2 / pi) * |y - Q Q^T y|, valid with probability >= 1 - 1/alpha.
inline double residual_sv_estimate(double residual_norm, double alpha)
{
    require(alpha > 1.0, "residual_sv_estimate: alpha must exceed 1");
    require(residual_norm >= 0.0, "residual_sv_estimate: residual norm must be non-negative");
    return alpha * std::sqrt(2.0 / std::numbers::pi) * residual_norm;
}

} // namespace frsvt

#endif // FRSVT_RANGE_FINDER_HPP
