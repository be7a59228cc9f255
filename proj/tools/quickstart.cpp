// Minimal use of the library: threshold a low-rank matrix with the randomized
// operator and compare against the SVD-based one.

#include <iostream>

#include "frsvt/frsvt.hpp"

int main()
{
    using namespace frsvt;

    RngStream rng(42);
    const Matrix A = gaussian_matrix(rng, 300, 10) * gaussian_matrix(rng, 10, 200);

    FrsvtConfig cfg;
    cfg.tau = 5.0;
    cfg.range.l = 12;
    cfg.range.eta = 1;

    const SvtResult fast = frsvt::frsvt(A, cfg, rng);
    const SvtResult exact = svt_exact(A, cfg.tau);

    std::cout << "rank after thresholding: " << fast.rank_after << " (exact " << exact.rank_after << ")\n"
              << "relative difference:     " << (fast.X - exact.X).norm() / exact.X.norm() << "\n"
              << "polar iterations:        " << fast.polar_iterations << "\n";
}
