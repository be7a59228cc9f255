#ifndef FRSVT_SVT_HPP
#define FRSVT_SVT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "frsvt/factorize.hpp"
#include "frsvt/random.hpp"
#include "frsvt/range_finder.hpp"

namespace frsvt {

inline double soft_shrink(double x, double tau)
{
    const double mag = std::abs(x) - tau;
    if (mag <= 0.0)
        return 0.0;
    return x > 0.0 ? mag : -mag;
}

//
// Per-index threshold sequence t_0, t_1, ... applied to singular values
// sorted non-increasing. Uniform is plain SVT; partial keeps the leading
// `keep` values untouched; weighted takes an explicit list whose last entry
// repeats. Shrinkage by a non-decreasing sequence is the exact proximal map
// of the weighted nuclear norm; other orders are applied mechanically.
//
class Thresholds
{
public:
    static Thresholds uniform(double tau)
    {
        require(tau >= 0.0, "threshold must be non-negative");
        return Thresholds(tau, 0, {});
    }

    static Thresholds partial(double tau, Index keep)
    {
        require(tau >= 0.0, "threshold must be non-negative");
        require(keep >= 0, "keep must be non-negative");
        return Thresholds(tau, keep, {});
    }

    static Thresholds weighted(std::vector<double> t)
    {
        require(!t.empty(), "weighted thresholds must be nonempty");
        for (double v : t)
            require(v >= 0.0 && std::isfinite(v), "weighted thresholds must be finite and >= 0");
        return Thresholds(0.0, 0, std::move(t));
    }

    double operator[](Index i) const
    {
        if (!list_.empty())
            return list_[std::min<std::size_t>(static_cast<std::size_t>(i), list_.size() - 1)];
        return i < keep_ ? 0.0 : tau_;
    }

    bool non_decreasing() const
    {
        return std::is_sorted(list_.begin(), list_.end());
    }

    Index keep() const noexcept { return keep_; }

private:
    Thresholds(double tau, Index keep, std::vector<double> list)
        : tau_(tau), keep_(keep), list_(std::move(list))
    {}

    double tau_;
    Index keep_;
    std::vector<double> list_;
};

struct FrsvtConfig
{
    double tau = 0.0;
    RangeConfig range;
    bool use_range_propagation = false;
    // confidence parameter of the residual singular value estimate
    double alpha = 20.0;
    // after propagation, add samples while the estimate exceeds the threshold
    bool residual_check = true;
    int max_extra_columns = 5;
    PolarOptions polar;
};

struct SvtResult
{
    Matrix X;
    ThinFactorization factors;   // pre-threshold approximation, input orientation
    Index rank_after = 0;
    // leading singular vectors that survived thresholding, on the short side
    // of the input (rows if rows <= cols); feeds the next call's propagation
    Matrix Q_carry;

    Index sampled = 0;           // basis size s actually used
    int polar_iterations = 0;
    double residual_estimate = std::numeric_limits<double>::quiet_NaN();
    int extra_columns = 0;
};

namespace detail {

// X = U diag(shrunk) V^T over the indices that survive
inline Matrix compose_shrunk(const Matrix& U, const Vector& sigma, const Matrix& V,
                             const Thresholds& t, Index& rank_after, std::vector<Index>& kept)
{
    kept.clear();
    std::vector<double> vals;
    for (Index i = 0; i < sigma.size(); ++i)
    {
        const double ti = t[i];
        if (sigma(i) > ti)
        {
            kept.push_back(i);
            vals.push_back(sigma(i) - ti);
        }
    }
    rank_after = static_cast<Index>(kept.size());

    Matrix X = Matrix::Zero(U.rows(), V.rows());
    if (kept.empty())
        return X;
    Matrix Us(U.rows(), rank_after);
    Matrix Vs(V.rows(), rank_after);
    for (Index c = 0; c < rank_after; ++c)
    {
        const Index i = kept[static_cast<std::size_t>(c)];
        Us.col(c) = U.col(i) * vals[static_cast<std::size_t>(c)];
        Vs.col(c) = V.col(i);
    }
    X.noalias() = Us * Vs.transpose();
    return X;
}

inline Matrix select_columns(const Matrix& M, const std::vector<Index>& cols)
{
    Matrix out(M.rows(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        out.col(static_cast<Index>(c)) = M.col(cols[c]);
    return out;
}

} // namespace detail

//
// exact operators (reference SVD)
//

inline SvtResult svt_exact(const Matrix& A, const Thresholds& t)
{
    ensure_finite(A, "svt_exact");
    SvtResult r;
    r.factors = svd_exact(A);
    std::vector<Index> kept;
    r.X = detail::compose_shrunk(r.factors.U, r.factors.sigma, r.factors.V, t, r.rank_after, kept);
    const Matrix& side = A.rows() <= A.cols() ? r.factors.U : r.factors.V;
    r.Q_carry = detail::select_columns(side, kept);
    r.sampled = r.factors.size();
    return r;
}

inline SvtResult svt_exact(const Matrix& A, double tau)
{
    return svt_exact(A, Thresholds::uniform(tau));
}

inline SvtResult partial_svt_exact(const Matrix& A, double tau, Index keep)
{
    return svt_exact(A, Thresholds::partial(tau, keep));
}

// Projection onto the spectral-norm ball of radius tau: singular values clipped at tau.
inline Matrix proj_2ball(const Matrix& A, double tau)
{
    require(tau >= 0.0, "proj_2ball: threshold must be non-negative");
    ensure_finite(A, "proj_2ball");
    const ThinFactorization f = svd_exact(A);
    const Vector clipped = f.sigma.cwiseMin(tau);
    return f.U * clipped.asDiagonal() * f.V.transpose();
}

//
// randomized operator
//

namespace detail {

inline SvtResult frsvt_impl(const Matrix& A, const Thresholds& t, const FrsvtConfig& cfg,
                            const Matrix* carry, RngStream& rng)
{
    ensure_finite(A, "frsvt");
    const bool transposed = A.rows() > A.cols();
    const Matrix At = transposed ? Matrix(A.transpose()) : Matrix();
    const Matrix& M = transposed ? At : A;
    const Index m = M.rows();
    const Index n = M.cols();

    require(cfg.range.l >= 1, "frsvt: sampling rate l must be >= 1");
    require(cfg.range.l <= m, "frsvt: sampling rate l exceeds min(rows, cols)");

    SvtResult res;
    const auto empty_result = [&] {
        res.X = Matrix::Zero(A.rows(), A.cols());
        res.factors = {Matrix(A.rows(), 0), Vector(0), Matrix(A.cols(), 0)};
        res.Q_carry = Matrix(m, 0);
        return res;
    };

    // 1. basis
    RangeBasis basis;
    const bool propagating = cfg.use_range_propagation && carry != nullptr && carry->cols() > 0;
    if (propagating)
    {
        require(carry->rows() == m, "frsvt: carried basis has wrong row count");
        const Index keep_cols = std::min(carry->cols(), cfg.range.l);
        const Index p = cfg.range.l - keep_cols;
        basis = propagate_range(M, carry->leftCols(keep_cols), p, rng);

        if (cfg.residual_check && !basis.residual_norms.empty())
        {
            res.residual_estimate = residual_sv_estimate(basis.residual_norms.back(), cfg.alpha);
            while (res.residual_estimate > t[basis.s] && res.extra_columns < cfg.max_extra_columns
                   && basis.s < m)
            {
                const Matrix y = M * gaussian_matrix(rng, n, 1);
                PartialOrthoResult po = partial_orthonormalize(basis.Q, y);
                basis.Q = std::move(po.Q);
                basis.s = basis.Q.cols();
                res.residual_estimate = residual_sv_estimate(po.residual_norms.front(), cfg.alpha);
                ++res.extra_columns;
            }
        }
    }
    else
    {
        basis = find_range(M, cfg.range, rng);
    }
    if (basis.s == 0)
        return empty_result();

    // 2. power iteration; after propagation the first step re-checks the rank
    const double reveal = propagating
        ? (cfg.range.rank_tol > 0.0 ? cfg.range.rank_tol : default_rank_tol(m, basis.s))
        : 0.0;
    Matrix Q = power_iterate(M, basis.Q, cfg.range.eta, cfg.range.reorthonormalize_each_step, reveal);
    if (Q.cols() == 0)
        return empty_result();

    // 3. M^T Q = H C, then C = W P and P = V D V^T
    QrFactors hc = qr_thin(M.transpose() * Q);
    PolarFactors wp;
    try
    {
        wp = polar_newton(hc.R, cfg.polar);
    }
    catch (const SingularMatrixError&)
    {
        // over-estimated rank: keep only the directions of Q that M actually reaches
        const Index s = Q.cols();
        const double tol = cfg.range.rank_tol > 0.0 ? cfg.range.rank_tol : default_rank_tol(s, s);
        const Matrix Cc = hc.R.transpose();
        if (Cc.norm() == 0.0)
            return empty_result();
        const QrFactors red = qr_cp(Cc, tol);
        if (red.revealed_rank == 0)
            return empty_result();
        Q = Q * red.Q;
        hc = qr_thin(M.transpose() * Q);
        try
        {
            wp = polar_newton(hc.R, cfg.polar);
        }
        catch (const SingularMatrixError&)
        {
            throw NonConvergenceError("frsvt: core matrix singular after rank reduction", 1, 0.0);
        }
    }
    res.polar_iterations = wp.iterations;
    const EigSymFactors vd = eig_sym(wp.P);

    // 4. compose (Q V) shrink(D) (H W V)^T
    const Matrix left = Q * vd.V;
    const Matrix right = hc.Q * (wp.W * vd.V);
    std::vector<Index> kept;
    Matrix X = detail::compose_shrunk(left, vd.d, right, t, res.rank_after, kept);

    res.sampled = Q.cols();
    res.Q_carry = detail::select_columns(left, kept);
    if (transposed)
    {
        res.X = X.transpose();
        res.factors = {right, vd.d, left};
    }
    else
    {
        res.X = std::move(X);
        res.factors = {left, vd.d, right};
    }
    return res;
}

} // namespace detail

inline SvtResult frsvt(const Matrix& A, const FrsvtConfig& cfg, RngStream& rng)
{
    return detail::frsvt_impl(A, Thresholds::uniform(cfg.tau), cfg, nullptr, rng);
}

inline SvtResult frsvt(const Matrix& A, const FrsvtConfig& cfg, const Matrix& carry, RngStream& rng)
{
    return detail::frsvt_impl(A, Thresholds::uniform(cfg.tau), cfg, &carry, rng);
}

// Leading `keep` singular values pass unshrunk; the rest are shrunk by tau.
inline SvtResult partial_svt(const Matrix& A, double tau, Index keep, const FrsvtConfig& cfg,
                             const Matrix* carry, RngStream& rng)
{
    require(keep >= 0, "partial_svt: keep must be non-negative");
    require(keep < cfg.range.l, "partial_svt: keep must be smaller than the sampling rate");
    return detail::frsvt_impl(A, Thresholds::partial(tau, keep), cfg, carry, rng);
}

inline SvtResult weighted_svt(const Matrix& A, const Thresholds& t, const FrsvtConfig& cfg,
                              const Matrix* carry, RngStream& rng)
{
    return detail::frsvt_impl(A, t, cfg, carry, rng);
}

} // namespace frsvt

#endif // FRSVT_SVT_HPP
