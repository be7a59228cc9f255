#ifndef FRSVT_RPCA_HPP
#define FRSVT_RPCA_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frsvt/factorize.hpp"
#include "frsvt/predictor.hpp"
#include "frsvt/random.hpp"
#include "frsvt/svt.hpp"

namespace frsvt {

enum class SvtBackend { exact, frsvt, frsvt_rp };

inline std::string_view to_string(SvtBackend b)
{
    switch (b)
    {
    case SvtBackend::exact: return "exact";
    case SvtBackend::frsvt: return "frsvt";
    case SvtBackend::frsvt_rp: return "frsvt-rp";
    }
    return "?";
}

inline SvtBackend parse_backend(std::string_view s)
{
    if (s == "exact")
        return SvtBackend::exact;
    if (s == "frsvt")
        return SvtBackend::frsvt;
    if (s == "frsvt-rp" || s == "frsvt_rp")
        return SvtBackend::frsvt_rp;
    throw InvalidArgument("unknown SVT backend: " + std::string(s));
}

// Zero-valued lambda / mu0 / mu_max select the standard data-driven defaults.
struct RpcaConfig
{
    double lambda = 0.0;          // 1 / sqrt(max(m, n))
    double mu0 = 0.0;             // 1.25 / |O|_2
    double rho_mu = 1.5;
    double mu_max = 0.0;          // 1e7 * mu0
    double tol = 1e-7;
    int max_iter = 500;
    SvtBackend backend = SvtBackend::exact;

    // randomized backends
    double predictor_gamma = 0.2;
    double predictor_rho = 0.05;
    Index oversample_a = 2;
    int eta = 2;
    double alpha = 20.0;
    bool residual_check = true;
};

struct RpcaResult
{
    Matrix L;
    Matrix S;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;
    std::vector<Index> rank_history;
    std::vector<Index> sample_history;    // l per iteration (0 for the exact backend)
    std::vector<std::chrono::nanoseconds> svt_time_history;
    Matrix carry;                         // last carried basis (frsvt-rp)
};

class RpcaError : public std::runtime_error
{
public:
    RpcaError(const std::string& what, int iteration)
        : std::runtime_error("rpca iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration)
    {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

namespace detail {

inline void validate(const RpcaConfig& cfg)
{
    require(cfg.lambda >= 0.0, "rpca: lambda must be positive (or 0 for auto)");
    require(cfg.rho_mu > 1.0, "rpca: rho_mu must exceed 1");
    require(cfg.tol > 0.0, "rpca: tol must be positive");
    require(cfg.max_iter >= 1, "rpca: max_iter must be >= 1");
    require(cfg.mu0 >= 0.0 && cfg.mu_max >= 0.0, "rpca: penalties must be non-negative");
}

//
// Inexact ALM:
//   S <- shrink(O - L + Y/mu, lambda/mu)           (entrywise)
//   L <- SVT_{1/mu}(O - S + Y/mu)                  (chosen backend)
//   Y <- Y + mu (O - L - S),  mu <- min(rho mu, mu_max)
// until |O - L - S|_F / |O|_F <= tol.
//
inline RpcaResult rpca_loop(const Matrix& O, Index keep, const RpcaConfig& cfg, RngStream& rng,
                            const std::optional<Matrix>& initial_carry)
{
    ensure_finite(O, "rpca");
    validate(cfg);
    require(O.size() > 0, "rpca: observation matrix must be nonempty");
    require(keep >= 0, "rpca: keep must be non-negative");

    const Index m = O.rows();
    const Index n = O.cols();
    const Index h = std::min(m, n);
    require(keep < h, "rpca: keep must be smaller than min(rows, cols)");

    RpcaResult res;
    res.L = Matrix::Zero(m, n);
    res.S = Matrix::Zero(m, n);
    const double norm_o = O.norm();
    if (norm_o == 0.0)
    {
        res.converged = true;
        return res;
    }

    const double lambda = cfg.lambda > 0.0 ? cfg.lambda : 1.0 / std::sqrt(static_cast<double>(std::max(m, n)));
    const double spec = spectral_norm(O);
    Matrix Y = O / std::max(spec, max_abs(O) / lambda);
    double mu = cfg.mu0 > 0.0 ? cfg.mu0 : 1.25 / spec;
    const double mu_max = cfg.mu_max > 0.0 ? cfg.mu_max : 1e7 * mu;

    const bool randomized = cfg.backend != SvtBackend::exact;
    PredictorState pred;
    if (randomized)
        pred = predictor_init(h, cfg.predictor_gamma, cfg.oversample_a, cfg.predictor_rho);

    FrsvtConfig fc;
    fc.range.eta = cfg.eta;
    fc.use_range_propagation = cfg.backend == SvtBackend::frsvt_rp;
    fc.alpha = cfg.alpha;
    fc.residual_check = cfg.residual_check;

    Matrix carry = initial_carry.value_or(Matrix(0, 0));
    for (int it = 1; it <= cfg.max_iter; ++it)
    {
        const double inv_mu = 1.0 / mu;
        res.S = (O - res.L + inv_mu * Y).unaryExpr([&](double x) { return soft_shrink(x, lambda * inv_mu); });
        const Matrix T = O - res.S + inv_mu * Y;
        const Thresholds thr = Thresholds::partial(inv_mu, keep);

        const auto t0 = std::chrono::steady_clock::now();
        SvtResult svt;
        Index l_used = 0;
        try
        {
            if (!randomized)
            {
                svt = svt_exact(T, thr);
            }
            else
            {
                l_used = std::min(std::max(pred.l, keep + 1), h);
                fc.tau = inv_mu;
                fc.range.l = l_used;
                const bool has_carry = fc.use_range_propagation && carry.cols() > 0
                    && carry.rows() == std::min(m, n);
                svt = weighted_svt(T, thr, fc, has_carry ? &carry : nullptr, rng);
            }
        }
        catch (const std::exception& e)
        {
            throw RpcaError(e.what(), it);
        }
        res.svt_time_history.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0));

        res.L = std::move(svt.X);
        const Matrix Z = O - res.L - res.S;
        Y += mu * Z;
        mu = std::min(mu * cfg.rho_mu, mu_max);

        const double resid = Z.norm() / norm_o;
        res.residual_history.push_back(resid);
        res.rank_history.push_back(svt.rank_after);
        res.sample_history.push_back(l_used);
        res.iterations = it;

        if (randomized)
            predictor_next(pred, std::min(svt.rank_after, pred.l));
        if (fc.use_range_propagation)
            carry = std::move(svt.Q_carry);

        if (resid <= cfg.tol)
        {
            res.converged = true;
            break;
        }
    }
    res.carry = std::move(carry);
    return res;
}

} // namespace detail

inline RpcaResult rpca_ialm(const Matrix& O, const RpcaConfig& cfg, RngStream& rng)
{
    return detail::rpca_loop(O, 0, cfg, rng, std::nullopt);
}

//
// Truncated nuclear norm variant: the leading `keep` singular values are
// not penalized. initial_carry seeds range propagation, e.g. with the
// carry of a previous call on neighbouring data.
//
inline RpcaResult rpca_truncated(const Matrix& O, Index keep, const RpcaConfig& cfg, RngStream& rng,
                                 const std::optional<Matrix>& initial_carry = std::nullopt)
{
    return detail::rpca_loop(O, keep, cfg, rng, initial_carry);
}

} // namespace frsvt

#endif // FRSVT_RPCA_HPP
