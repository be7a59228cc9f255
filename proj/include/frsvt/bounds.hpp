#ifndef FRSVT_BOUNDS_HPP
#define FRSVT_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "frsvt/matrix.hpp"

namespace frsvt {

//
// Closed-form expected-error bounds for randomized range finding, for the
// resulting approximate SVT, and for column-sampling (LTSVD) comparison.
// sigma is the singular spectrum of A, non-increasing; entries beyond its
// length up to h = min(m, n) are taken as zero.
//

struct BoundParams
{
    Index k = 2;       // target rank
    Index p = 2;       // over-sampling
    int eta = 0;       // power iterations
    Index h = 0;       // min(m, n)
    double tau = 0.0;
    std::vector<double> sigma;
};

struct LowRankBounds
{
    double frob_min = 0.0;
    std::optional<double> frob_max;   // only without power iteration
    double spec_min = 0.0;
    double spec_max = 0.0;
    double spec_loose = 0.0;
};

struct SvtBounds
{
    std::optional<double> frob_bound; // only without power iteration
    double spec_bound = 0.0;
    double spec_loose = 0.0;
};

struct LtsvdBounds
{
    double frob_bound = 0.0;
    double spec_bound = 0.0;
};

struct BoundComparison
{
    double halko_frob = 0.0;
    double ltsvd_frob = 0.0;
    bool halko_tighter = false;
};

// Constant of the spectral pseudo-contraction used for reporting (worst case).
inline constexpr double spectral_contraction_constant = 2.0;

inline double poly_frob(Index k, Index p)
{
    require(p >= 2, "poly_frob: over-sampling p must be >= 2");
    require(k >= 0, "poly_frob: k must be non-negative");
    return 1.0 + static_cast<double>(k) / static_cast<double>(p - 1);
}

namespace detail {

inline double sigma_at(std::span<const double> sigma, Index j)
{
    return j < static_cast<Index>(sigma.size()) ? sigma[static_cast<std::size_t>(j)] : 0.0;
}

// sum_{j > k} sigma_j^power, 1-based j
inline double tail_power_sum(std::span<const double> sigma, Index k, double power)
{
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(k); j < sigma.size(); ++j)
        s += std::pow(sigma[j], power);
    return s;
}

inline void validate_spectrum(std::span<const double> sigma)
{
    for (std::size_t j = 0; j < sigma.size(); ++j)
    {
        require(std::isfinite(sigma[j]) && sigma[j] >= 0.0, "spectrum entries must be finite and >= 0");
        if (j > 0)
            require(sigma[j] <= sigma[j - 1], "spectrum must be non-increasing");
    }
}

inline void validate(const BoundParams& bp)
{
    require(bp.k >= 2, "bounds: target rank k must be >= 2");
    require(bp.p >= 2, "bounds: over-sampling p must be >= 2");
    require(bp.eta >= 0, "bounds: eta must be >= 0");
    require(bp.k + bp.p <= bp.h, "bounds: k + p must not exceed min(m, n)");
    require(static_cast<Index>(bp.sigma.size()) <= bp.h, "bounds: spectrum longer than min(m, n)");
    require(bp.tau >= 0.0, "bounds: tau must be >= 0");
    validate_spectrum(bp.sigma);
}

// [(1 + sqrt(k/(p-1))) s^q + (e sqrt(k+p)/p) (sum_{j>k} sigma_j^{2q})^{1/2}]^{1/q}, q = 2 eta + 1
// evaluated with the tail scaled by sigma_{k+1} to avoid overflow
inline double power_spectral_bracket(const BoundParams& bp)
{
    const double s = sigma_at(bp.sigma, bp.k);
    if (s == 0.0)
        return 0.0;
    const double q = 2.0 * bp.eta + 1.0;
    const double k = static_cast<double>(bp.k);
    const double p = static_cast<double>(bp.p);

    double tail = 0.0;
    for (std::size_t j = static_cast<std::size_t>(bp.k); j < bp.sigma.size(); ++j)
        tail += std::pow(bp.sigma[j] / s, 2.0 * q);

    const double inner = (1.0 + std::sqrt(k / (p - 1.0)))
        + std::numbers::e * std::sqrt(k + p) / p * std::sqrt(tail);
    return s * std::pow(inner, 1.0 / q);
}

inline double loose_poly(const BoundParams& bp)
{
    const double k = static_cast<double>(bp.k);
    const double p = static_cast<double>(bp.p);
    const double h = static_cast<double>(bp.h);
    const double base = 1.0 + std::sqrt(k / (p - 1.0)) + std::numbers::e * std::sqrt(k + p) / p * std::sqrt(h - k);
    return std::pow(base, 1.0 / (2.0 * bp.eta + 1.0));
}

} // namespace detail

inline LowRankBounds lowrank_bounds(const BoundParams& bp)
{
    detail::validate(bp);
    LowRankBounds b;
    b.frob_min = detail::tail_power_sum(bp.sigma, bp.k, 2.0);
    if (bp.eta == 0)
        b.frob_max = poly_frob(bp.k, bp.p) * b.frob_min;
    b.spec_min = detail::sigma_at(bp.sigma, bp.k);
    b.spec_max = detail::power_spectral_bracket(bp);
    b.spec_loose = detail::loose_poly(bp) * b.spec_min;
    return b;
}

// Frobenius upper bound has no closed form with power iteration.
inline double lowrank_frob_max(const BoundParams& bp)
{
    const LowRankBounds b = lowrank_bounds(bp);
    if (!b.frob_max)
        throw UnsupportedError("Frobenius bound with power iteration has no closed form");
    return *b.frob_max;
}

inline SvtBounds svt_bounds(const BoundParams& bp)
{
    detail::validate(bp);
    SvtBounds b;

    double gain = 0.0;
    for (std::size_t j = static_cast<std::size_t>(bp.k); j < bp.sigma.size(); ++j)
    {
        const double c = std::min(bp.sigma[j], bp.tau);
        gain += c * c;
    }
    if (bp.eta == 0)
    {
        const double tail = detail::tail_power_sum(bp.sigma, bp.k, 2.0);
        b.frob_bound = std::max(0.0, poly_frob(bp.k, bp.p) * tail - gain);
    }

    const double s = detail::sigma_at(bp.sigma, bp.k);
    const double spectral_gain = std::min(s, bp.tau);
    const double C = spectral_contraction_constant;
    b.spec_bound = std::max(0.0, C * detail::power_spectral_bracket(bp) - spectral_gain);
    b.spec_loose = std::max(0.0, C * detail::loose_poly(bp) * s - spectral_gain);
    return b;
}

inline double svt_frob_bound(const BoundParams& bp)
{
    const SvtBounds b = svt_bounds(bp);
    if (!b.frob_bound)
        throw UnsupportedError("Frobenius bound with power iteration has no closed form");
    return *b.frob_bound;
}

// Column sampling with c = 2k columns and beta = 1, giving epsilon = sqrt(2).
inline LtsvdBounds ltsvd_bounds(std::span<const double> sigma, Index k)
{
    require(k >= 1, "ltsvd_bounds: k must be >= 1");
    detail::validate_spectrum(sigma);
    const double total = detail::tail_power_sum(sigma, 0, 2.0);
    const double tail = detail::tail_power_sum(sigma, k, 2.0);
    const double s = detail::sigma_at(sigma, k);
    return {tail + std::numbers::sqrt2 * total, std::sqrt(s * s + std::numbers::sqrt2 * total)};
}

// Gaussian range finding with p = k against column sampling with c = 2k.
inline BoundComparison bound_compare(std::span<const double> sigma, Index k)
{
    require(k >= 2, "bound_compare: k must be >= 2");
    detail::validate_spectrum(sigma);
    BoundComparison c;
    c.halko_frob = poly_frob(k, k) * detail::tail_power_sum(sigma, k, 2.0);
    c.ltsvd_frob = ltsvd_bounds(sigma, k).frob_bound;
    c.halko_tighter = c.halko_frob <= c.ltsvd_frob;
    return c;
}

} // namespace frsvt

#endif // FRSVT_BOUNDS_HPP
