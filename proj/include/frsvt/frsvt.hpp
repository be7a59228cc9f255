#ifndef FRSVT_FRSVT_HPP
#define FRSVT_FRSVT_HPP

// Umbrella header for the solver library. Benchmark utilities live in
// frsvt/bench.hpp and pull in nlohmann/json.

#include "frsvt/matrix.hpp"
#include "frsvt/random.hpp"
#include "frsvt/factorize.hpp"
#include "frsvt/range_finder.hpp"
#include "frsvt/svt.hpp"
#include "frsvt/predictor.hpp"
#include "frsvt/bounds.hpp"
#include "frsvt/rpca.hpp"
#include "frsvt/matrix_io.hpp"

#endif // FRSVT_FRSVT_HPP
