#ifndef FRSVT_PREDICTOR_HPP
#define FRSVT_PREDICTOR_HPP

#include <algorithm>
#include <utility>

#include "frsvt/matrix.hpp"

namespace frsvt {

//
// Sampling-rate prediction across solver iterations. After observing the
// post-threshold rank r of the current step, the next over-sampling is
//
//   p = a          if r < l   (rank settled below the prediction)
//   p = ceil(rho n) otherwise (rank may still be growing)
//
// and the next rate is l = min(r + p, b) with b = ceil(gamma n).
//
struct PredictorState
{
    Index n = 1;
    Index a = 2;
    double rho = 0.05;
    double gamma = 0.2;
    Index b = 1;
    Index l = 1;
    Index r = 0;
    Index p = 0;
};

struct PredictorStep
{
    Index l_next = 1;
    Index p_next = 0;
};

inline PredictorState predictor_init(Index n, double gamma, Index a = 2, double rho = 0.05)
{
    require(n >= 1, "predictor_init: n must be >= 1");
    require(gamma > 0.0 && gamma <= 1.0, "predictor_init: gamma must lie in (0, 1]");
    require(a >= 0, "predictor_init: a must be >= 0");
    require(rho > 0.0 && rho <= 1.0, "predictor_init: rho must lie in (0, 1]");

    PredictorState s;
    s.n = n;
    s.a = a;
    s.rho = rho;
    s.gamma = gamma;
    s.b = std::clamp<Index>(ceil_count(gamma * static_cast<double>(n)), 1, n);
    s.l = std::clamp<Index>(ceil_count(0.1 * static_cast<double>(s.b)), 1, s.b);
    return s;
}

inline PredictorStep predictor_next(PredictorState& state, Index observed_rank)
{
    require(observed_rank >= 0, "predictor_next: rank must be non-negative");
    require(observed_rank <= state.l, "predictor_next: observed rank exceeds sampling rate");

    const Index p = observed_rank < state.l
        ? state.a
        : ceil_count(state.rho * static_cast<double>(state.n));
    const Index l = std::clamp<Index>(observed_rank + p, 1, state.b);

    state.r = observed_rank;
    state.p = p;
    state.l = l;
    return {l, p};
}

} // namespace frsvt

#endif // FRSVT_PREDICTOR_HPP
