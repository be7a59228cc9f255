// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Pass criterion numbers as arguments to run a subset, e.g. `frsvt_acceptance 3 7`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "frsvt/bench.hpp"
#include "frsvt/frsvt.hpp"

using namespace frsvt;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    const char* name;
    std::function<Outcome()> run;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Matrix random_orthonormal(RngStream& rng, Index m, Index n)
{
    return qr_thin(gaussian_matrix(rng, m, n)).Q;
}

Matrix clip(const Matrix& A, double tau)
{
    return proj_2ball(A, tau);
}

std::vector<double> to_list(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

//
// 1. randomized SVT is exact when the rank fits in the sample
//
Outcome low_rank_exactness()
{
    const auto t0 = clock_type::now();
    double worst = 0.0;
    int trials = 0;
    for (Index r : {5, 20})
        for (std::uint64_t seed = 0; seed < 100; ++seed)
        {
            RngStream rng(1001, seed * 2 + (r == 20 ? 1 : 0));
            const Matrix A = gen_lowrank(rng, 300, 200, r);
            const ThinFactorization f = svd_exact(A);
            const double tau = 0.5 * f.sigma(r - 1);
            const Matrix ref = svt_exact(A, tau).X;
            for (int eta : {1, 2})
            {
                FrsvtConfig cfg;
                cfg.tau = tau;
                cfg.range.l = r + 2;
                cfg.range.eta = eta;
                RngStream sketch = rng.fork(static_cast<std::uint64_t>(eta));
                const Matrix X = frsvt::frsvt(A, cfg, sketch).X;
                worst = std::max(worst, (X - ref).norm() / ref.norm());
                ++trials;
            }
        }
    const double secs = seconds_since(t0);
    return {worst <= 1e-7 && secs < 30.0,
            fmt("%d trials, worst relative error %.3e (limit 1e-7), %.1f s (limit 30 s)", trials, worst, secs)};
}

//
// 2. Monte Carlo mean SVT error under the closed-form bound
//
Outcome bound_containment()
{
    const auto t0 = clock_type::now();
    constexpr int trials = 200;
    double err = 0.0, bound = 0.0;
    for (int t = 0; t < trials; ++t)
    {
        RngStream rng(1002, static_cast<std::uint64_t>(t));
        const Matrix A = gaussian_matrix(rng, 200, 100);
        const ThinFactorization f = svd_exact(A);
        const double tau = 1.0 / std::sqrt(f.sigma(0));

        FrsvtConfig cfg;
        cfg.tau = tau;
        cfg.range.l = 25;
        cfg.range.eta = 0;
        RngStream sketch = rng.fork(1);
        err += (svt_exact(A, tau).X - frsvt::frsvt(A, cfg, sketch).X).squaredNorm();

        BoundParams bp;
        bp.k = 20;
        bp.p = 5;
        bp.eta = 0;
        bp.h = 100;
        bp.tau = tau;
        bp.sigma = to_list(f.sigma);
        bound += svt_frob_bound(bp);
    }
    err /= trials;
    bound /= trials;
    const double secs = seconds_since(t0);
    return {err <= bound && secs < 60.0,
            fmt("mean squared error %.4f, bound %.4f (ratio %.3f), %.1f s (limit 60 s)", err, bound, err / bound, secs)};
}

//
// 3. Frobenius and spectral pseudo-contraction
//
Outcome pseudo_contraction()
{
    constexpr double slack = 1e-8;
    int violations = 0;
    double margin_f = std::numeric_limits<double>::infinity();
    double margin_s1 = margin_f, margin_s2 = margin_f;
    for (int t = 0; t < 1000; ++t)
    {
        RngStream rng(1003, static_cast<std::uint64_t>(t));
        const Index m = 1 + static_cast<Index>(rng.below(50));
        const Index n = 1 + static_cast<Index>(rng.below(40));
        const Matrix A = gaussian_matrix(rng, m, n);
        Matrix B;
        switch (t % 3)
        {
        case 0: B = gaussian_matrix(rng, m, n); break;
        case 1: B = A + rng.uniform(1e-3, 1.0) * gaussian_matrix(rng, m, n); break;
        default: B = rng.uniform(0.1, 3.0) * gaussian_matrix(rng, m, n); break;
        }
        const double tau = rng.uniform(0.0, 1.1) * std::max(spectral_norm(A), spectral_norm(B));

        const Matrix dS = svt_exact(A, tau).X - svt_exact(B, tau).X;
        const Matrix dP = clip(A, tau) - clip(B, tau);
        const Matrix dA = A - B;

        const double f = dA.squaredNorm() - dP.squaredNorm() - dS.squaredNorm();
        const double s = spectral_norm(dS), a = spectral_norm(dA), p = spectral_norm(dP);
        const double s1 = 2.0 * a - p - s;
        const double s2 = s - (a - p);
        margin_f = std::min(margin_f, f);
        margin_s1 = std::min(margin_s1, s1);
        margin_s2 = std::min(margin_s2, s2);
        if (f < -slack || s1 < -slack || s2 < -slack)
            ++violations;
    }
    return {violations == 0,
            fmt("1000 triples, %d violations; smallest margins: Frobenius %.2e, spectral upper %.2e, spectral lower %.2e",
                violations, margin_f, margin_s1, margin_s2)};
}

//
// 4. S(QB) = Q S(B) for orthonormal Q
//
Outcome orthonormal_commutation()
{
    double worst = 0.0;
    for (int t = 0; t < 200; ++t)
    {
        RngStream rng(1004, static_cast<std::uint64_t>(t));
        const Index n = 1 + static_cast<Index>(rng.below(40));
        const Index m = n + static_cast<Index>(rng.below(40));
        const Index q = 1 + static_cast<Index>(rng.below(40));
        const Matrix Q = random_orthonormal(rng, m, n);
        const Matrix B = gaussian_matrix(rng, n, q);
        const double tau = rng.uniform(0.0, 0.9) * spectral_norm(B);
        const Matrix lhs = svt_exact(Matrix(Q * B), tau).X;
        const Matrix rhs = Q * svt_exact(B, tau).X;
        worst = std::max(worst, (lhs - rhs).norm() / lhs.norm());
    }
    return {worst <= 1e-9, fmt("200 pairs, worst relative difference %.3e (limit 1e-9)", worst)};
}

//
// 5. coverage of the one-sample residual singular value estimate
//
Outcome residual_coverage()
{
    constexpr int trials = 2000;
    constexpr double alpha = 20.0;
    int covered = 0, covered_sigma = 0;
    for (int t = 0; t < trials; ++t)
    {
        RngStream rng(1005, static_cast<std::uint64_t>(t));
        const Index m = 30 + static_cast<Index>(rng.below(40));
        const Index n = 20 + static_cast<Index>(rng.below(40));
        const Index h = std::min(m, n);
        const Index k = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(h / 2)));

        // mix of decaying, flat-tailed and rank-deficient spectra
        std::vector<double> sigma;
        const double decay = rng.uniform(0.5, 0.98);
        const Index rank = t % 3 == 2 ? k + 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(h - k))) : h;
        double v = 1.0;
        for (Index i = 0; i < rank; ++i)
        {
            sigma.push_back(t % 3 == 1 && i >= k ? sigma.back() : v);
            v *= decay;
        }
        const Matrix U = random_orthonormal(rng, m, rank);
        const Matrix V = random_orthonormal(rng, n, rank);
        Vector d(rank);
        for (Index i = 0; i < rank; ++i)
            d(i) = sigma[static_cast<std::size_t>(i)];
        const Matrix A = U * d.asDiagonal() * V.transpose();

        RangeConfig cfg;
        cfg.l = k;
        cfg.eta = 0;
        const Matrix Q = find_range(A, cfg, rng).Q;
        const RangeBasis b = propagate_range(A, Q, 1, rng);
        const double est = residual_sv_estimate(b.residual_norms.at(0), alpha);
        const double resid = spectral_norm(A - Q * (Q.transpose() * A));
        if (est >= resid)
            ++covered;
        if (est >= sigma[static_cast<std::size_t>(k)])
            ++covered_sigma;
    }
    const double cov = static_cast<double>(covered) / trials;
    const double cov_sigma = static_cast<double>(covered_sigma) / trials;
    return {cov >= 0.93,
            fmt("%d trials: estimate >= |(I - QQ^T)A|_2 in %.2f%% (limit 93%%), >= sigma_{k+1}(A) in %.2f%%",
                trials, 100.0 * cov, 100.0 * cov_sigma)};
}

RpcaRunRecord solve(const RpcaInstance& inst, SvtBackend b, std::uint64_t seed)
{
    RpcaConfig cfg;
    cfg.lambda = 1.0 / std::sqrt(static_cast<double>(std::max(inst.O.rows(), inst.O.cols())));
    cfg.tol = 1e-7;
    RngStream rng(seed, static_cast<std::uint64_t>(b) + 1);
    return run_rpca_case(inst, b, cfg, rng);
}

//
// 6. desk-scale RPCA with all three backends
//
Outcome rpca_desk()
{
    const auto t0 = clock_type::now();
    RngStream rng(1006);
    const RpcaInstance inst = gen_rpca_instance(rng, 500, 500, 0.1, 0.1, 10.0);
    bool ok = inst.rank == 50;
    std::ostringstream os;
    int it_exact = -1, it_rp = -1;
    for (SvtBackend b : {SvtBackend::exact, SvtBackend::frsvt, SvtBackend::frsvt_rp})
    {
        const RpcaRunRecord r = solve(inst, b, 1006);
        ok = ok && r.converged && r.error.empty() && r.nrmse_L <= 1e-5;
        if (b == SvtBackend::exact)
            it_exact = r.iterations;
        if (b == SvtBackend::frsvt_rp)
            it_rp = r.iterations;
        os << to_string(b) << ": " << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations
           << " it, NRMSE " << fmt("%.2e", r.nrmse_L) << "; ";
    }
    ok = ok && std::abs(it_exact - it_rp) <= 2;
    const double secs = seconds_since(t0);
    ok = ok && secs < 300.0;
    os << fmt("iteration gap %d (limit 2), %.1f s (limit 300 s)", std::abs(it_exact - it_rp), secs);
    return {ok, os.str()};
}

//
// 7. ordering of the closed-form bounds over random spectra
//
Outcome bound_ordering()
{
    std::mt19937_64 gen(1007);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0, prop5_cases = 0;
    for (int t = 0; t < 10000; ++t)
    {
        const Index h = 4 + static_cast<Index>(gen() % 197);
        std::vector<double> sigma(static_cast<std::size_t>(h));
        const int shape = t % 4;
        double v = std::exp(20.0 * (u(gen) - 0.5));
        const double decay = u(gen);
        for (std::size_t j = 0; j < sigma.size(); ++j)
        {
            sigma[j] = v;
            switch (shape)
            {
            case 0: v *= decay; break;                              // geometric
            case 1: break;                                          // flat
            case 2: v = j + 1 < sigma.size() / 3 ? v : 0.0; break;  // exactly low rank
            default: v *= u(gen); break;                            // random steps
            }
        }
        const Index k = 2 + static_cast<Index>(gen() % static_cast<std::uint64_t>(h - 3));
        const Index p = 2 + static_cast<Index>(gen() % static_cast<std::uint64_t>(h - k - 1));
        BoundParams bp;
        bp.k = k;
        bp.p = p;
        bp.h = h;
        bp.tau = sigma[0] * 1.2 * u(gen);
        bp.sigma = sigma;

        bp.eta = 0;
        const LowRankBounds b0 = lowrank_bounds(bp);
        const SvtBounds s0 = svt_bounds(bp);
        bool ok = b0.frob_min <= *b0.frob_max && *s0.frob_bound <= *b0.frob_max;
        for (int eta = 0; eta <= 3; ++eta)
        {
            bp.eta = eta;
            const LowRankBounds b = lowrank_bounds(bp);
            const double rel = 1.0 + 1e-12;
            ok = ok && b.spec_min <= b.spec_max * rel && b.spec_max <= b.spec_loose * rel;
        }
        if (k >= 4)
        {
            ++prop5_cases;
            ok = ok && bound_compare(sigma, k).halko_tighter;
        }
        if (!ok)
            ++bad;
    }
    return {bad == 0, fmt("10000 spectra (%d with k >= 4), %d ordering violations", prop5_cases, bad)};
}

//
// 8. Newton polar iteration and the symmetric eigen step on random cores
//
Outcome polar_suite()
{
    int worst_iter = 0, failures = 0;
    double sum_iter = 0.0, worst_orth = 0.0, worst_rec = 0.0, worst_eig = 0.0;
    for (int t = 0; t < 500; ++t)
    {
        RngStream rng(1008, static_cast<std::uint64_t>(t));
        const Index n = 1 + static_cast<Index>(rng.below(50));
        Matrix C;
        switch (t % 3)
        {
        case 0: C = gaussian_matrix(rng, n, n); break;
        case 1: C = qr_thin(gaussian_matrix(rng, n + static_cast<Index>(rng.below(50)), n)).R; break;
        default:
        {
            // graded spectrum, condition number up to 1e8
            const double logc = rng.uniform(0.0, 8.0);
            Vector s(n);
            for (Index i = 0; i < n; ++i)
                s(i) = std::pow(10.0, -logc * static_cast<double>(i) / std::max<double>(1.0, static_cast<double>(n - 1)));
            C = random_orthonormal(rng, n, n) * s.asDiagonal() * random_orthonormal(rng, n, n).transpose();
            break;
        }
        }
        try
        {
            const PolarFactors f = polar_newton(C);
            worst_iter = std::max(worst_iter, f.iterations);
            sum_iter += f.iterations;
            const double orth = (f.W.transpose() * f.W - Matrix::Identity(n, n)).norm();
            const double rec = (C - f.W * f.P).norm() / C.norm();
            const EigSymFactors e = eig_sym(f.P);
            const double eig = (f.P - e.V * e.d.asDiagonal() * e.V.transpose()).norm() / f.P.norm();
            const bool psd = e.d.minCoeff() >= -1e-10 * e.d.maxCoeff();
            const bool sym = (f.P - f.P.transpose()).norm() == 0.0;
            worst_orth = std::max(worst_orth, orth);
            worst_rec = std::max(worst_rec, rec);
            worst_eig = std::max(worst_eig, eig);
            if (f.iterations > 20 || orth > 1e-10 || rec > 1e-10 || eig > 1e-9 || !psd || !sym)
                ++failures;
        }
        catch (const std::exception&)
        {
            ++failures;
        }
    }
    return {failures == 0,
            fmt("500 cores, %d failures; iterations max %d mean %.2f (limit 20); |W^T W - I| %.1e, "
                "|C - WP|/|C| %.1e, eig reconstruction %.1e",
                failures, worst_iter, sum_iter / 500.0, worst_orth, worst_rec, worst_eig)};
}

//
// 9. reports reproduce across runs and thread counts
//
Outcome determinism()
{
    SvtBenchSpec s;
    s.m = 200;
    s.n = 100;
    s.k = {10, 20};
    s.p = {5};
    s.eta = {0, 2};
    s.trials = 8;
    s.seed = 1009;
    s.threads = 1;
    const std::string a1 = strip_timing(to_json(run_svt_bench(s))).dump();
    const std::string a2 = strip_timing(to_json(run_svt_bench(s))).dump();
    s.threads = 4;
    const std::string a4 = strip_timing(to_json(run_svt_bench(s))).dump();

    RpcaBenchSpec r;
    r.sizes = {{100, 100}, {120, 80}};
    r.trials = 2;
    r.seed = 1009;
    r.threads = 1;
    const std::string b1 = strip_timing(to_json(run_rpca_bench(r))).dump();
    const std::string b2 = strip_timing(to_json(run_rpca_bench(r))).dump();
    r.threads = 3;
    const std::string b3 = strip_timing(to_json(run_rpca_bench(r))).dump();

    const bool svt_ok = a1 == a2 && a1 == a4;
    const bool rpca_ok = b1 == b2 && b1 == b3;
    return {svt_ok && rpca_ok,
            fmt("svt bench %s (%zu bytes), rpca bench %s (%zu bytes); threads 1/1/4 and 1/1/3",
                svt_ok ? "identical" : "DIFFERS", a1.size(), rpca_ok ? "identical" : "DIFFERS", b1.size())};
}

//
// 10. range propagation is cheaper per iteration than the exact SVD
//
Outcome relative_speed()
{
    RngStream rng(1010);
    const RpcaInstance inst = gen_rpca_instance(rng, 1000, 1000, 0.1, 0.1, 10.0);
    const RpcaRunRecord ex = solve(inst, SvtBackend::exact, 1010);
    const RpcaRunRecord rp = solve(inst, SvtBackend::frsvt_rp, 1010);
    const double ratio = rp.time_per_iteration_ns / ex.time_per_iteration_ns;
    const bool ok = ex.converged && rp.converged && ratio <= 2.0 / 3.0;
    return {ok, fmt("per-iteration time exact %.3f s, frsvt-rp %.3f s, ratio %.3f (limit 0.667); iterations %d / %d",
                    ex.time_per_iteration_ns * 1e-9, rp.time_per_iteration_ns * 1e-9, ratio, ex.iterations,
                    rp.iterations)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "low-rank exactness", low_rank_exactness},
        {2, "SVT error bound containment", bound_containment},
        {3, "pseudo-contraction", pseudo_contraction},
        {4, "orthonormal factor identity", orthonormal_commutation},
        {5, "residual estimate coverage", residual_coverage},
        {6, "RPCA desk reproduction", rpca_desk},
        {7, "bound ordering fuzz", bound_ordering},
        {8, "polar/eigen kernel suite", polar_suite},
        {9, "determinism", determinism},
        {10, "relative speed", relative_speed},
    };

    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& c : all)
    {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = clock_type::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %d: %s [%.1f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass)
            ++failed;
    }
    return failed == 0 ? 0 : 1;
}
