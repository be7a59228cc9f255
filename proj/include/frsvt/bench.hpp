#ifndef FRSVT_BENCH_HPP
#define FRSVT_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "frsvt/bounds.hpp"
#include "frsvt/factorize.hpp"
#include "frsvt/random.hpp"
#include "frsvt/rpca.hpp"
#include "frsvt/svt.hpp"

namespace frsvt {

//
// synthetic data
//

// m x r times r x n Gaussian factors, scaled by 1/sqrt(r) for unit-variance entries.
inline Matrix gen_lowrank(RngStream& rng, Index m, Index n, Index r)
{
    require(m >= 1 && n >= 1, "gen_lowrank: dimensions must be positive");
    require(r >= 0 && r <= std::min(m, n), "gen_lowrank: rank must lie in [0, min(m, n)]");
    if (r == 0)
        return Matrix::Zero(m, n);
    const Matrix X = gaussian_matrix(rng, m, r);
    const Matrix Y = gaussian_matrix(rng, r, n);
    return (X * Y) / std::sqrt(static_cast<double>(r));
}

struct RpcaInstance
{
    Matrix O;
    Matrix L0;
    Matrix S0;
    Index rank = 0;
    double corruption_fraction = 0.0;
    Index support = 0;
};

//
// O = L0 + S0: L0 low rank with rank ceil(rank_ratio * min(m, n)), S0 supported
// on ceil(fraction * m * n) cells drawn without replacement, values uniform on
// [-amplitude, amplitude].
//
inline RpcaInstance gen_rpca_instance(RngStream& rng, Index m, Index n, double rank_ratio,
                                      double corruption_fraction, double sparse_amplitude = 10.0)
{
    require(rank_ratio > 0.0 && rank_ratio <= 1.0, "gen_rpca_instance: rank_ratio must lie in (0, 1]");
    require(corruption_fraction > 0.0 && corruption_fraction <= 1.0,
            "gen_rpca_instance: corruption fraction must lie in (0, 1]");
    require(sparse_amplitude > 0.0, "gen_rpca_instance: amplitude must be positive");

    RpcaInstance inst;
    inst.rank = std::min(ceil_count(rank_ratio * static_cast<double>(std::min(m, n))), std::min(m, n));
    inst.corruption_fraction = corruption_fraction;
    inst.L0 = gen_lowrank(rng, m, n, inst.rank);

    const auto cells = static_cast<std::uint64_t>(m * n);
    const auto count = static_cast<std::uint64_t>(
        std::min<Index>(ceil_count(corruption_fraction * static_cast<double>(m * n)), m * n));
    std::vector<std::uint64_t> idx(cells);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates
    for (std::uint64_t i = 0; i < count; ++i)
        std::swap(idx[i], idx[i + rng.below(cells - i)]);

    inst.S0 = Matrix::Zero(m, n);
    double* s = inst.S0.data();
    for (std::uint64_t i = 0; i < count; ++i)
    {
        double v = 0.0;
        while (v == 0.0)
            v = rng.uniform(-sparse_amplitude, sparse_amplitude);
        s[idx[i]] = v;
    }
    inst.support = static_cast<Index>(count);
    inst.O = inst.L0 + inst.S0;
    return inst;
}

// |reference - estimate|_F / |reference|_F
inline double nrmse(const Matrix& reference, const Matrix& estimate)
{
    const double denom = reference.norm();
    const double diff = (reference - estimate).norm();
    if (denom == 0.0)
        return diff;
    return diff / denom;
}

//
// single-SVT benchmark
//

enum class MatrixKind { gaussian_full_rank, lowrank };
enum class TauRule { fixed, inv_sqrt_spectral };

struct SvtBenchSpec
{
    Index m = 200;
    Index n = 100;
    MatrixKind kind = MatrixKind::gaussian_full_rank;
    Index rank = 0;                    // lowrank only
    TauRule tau_rule = TauRule::inv_sqrt_spectral;
    double tau = 0.0;                  // fixed only
    std::vector<Index> k{20};
    std::vector<Index> p{5};
    std::vector<int> eta{2};
    int trials = 1;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct SvtTrialRecord
{
    int trial = 0;
    Index k = 0;
    Index p = 0;
    int eta = 0;
    double tau = 0.0;
    double nrmse = 0.0;
    double sq_error = 0.0;          // |S_tau(A) - X|_F^2
    double spec_error = 0.0;        // |S_tau(A) - X|_2
    Index rank_after = 0;
    Index rank_exact = 0;
    Index sampled = 0;
    std::optional<double> bound_frob;   // no-power-iteration Frobenius bound
    std::optional<double> bound_spec;
    std::int64_t wall_time_ns = 0;
};

struct SvtAggregate
{
    Index k = 0;
    Index p = 0;
    int eta = 0;
    double mean_nrmse = 0.0;
    double stddev_nrmse = 0.0;
    double mean_sq_error = 0.0;
    double mean_spec_error = 0.0;
    std::optional<double> mean_bound_frob;
    std::optional<double> mean_bound_spec;
    double mean_wall_time_ns = 0.0;
};

struct SvtBenchReport
{
    SvtBenchSpec spec;
    std::vector<SvtTrialRecord> records;   // trial-major, then sweep order
    std::vector<SvtAggregate> aggregates;  // sweep order
};

namespace detail {

struct SweepPoint
{
    Index k;
    Index p;
    int eta;
};

inline std::vector<SweepPoint> sweep(const SvtBenchSpec& s)
{
    std::vector<SweepPoint> out;
    for (Index k : s.k)
        for (Index p : s.p)
            for (int e : s.eta)
                out.push_back({k, p, e});
    return out;
}

inline void validate(const SvtBenchSpec& s)
{
    require(s.m >= 1 && s.n >= 1, "svt bench: dimensions must be positive");
    require(s.trials >= 1, "svt bench: trials must be >= 1");
    require(s.threads >= 1, "svt bench: threads must be >= 1");
    require(!s.k.empty() && !s.p.empty() && !s.eta.empty(), "svt bench: empty sweep");
    const Index h = std::min(s.m, s.n);
    for (Index k : s.k)
        for (Index p : s.p)
            require(k >= 1 && p >= 0 && k + p <= h, "svt bench: need k >= 1, p >= 0, k + p <= min(m, n)");
    for (int e : s.eta)
        require(e >= 0, "svt bench: eta must be >= 0");
    if (s.kind == MatrixKind::lowrank)
        require(s.rank >= 1 && s.rank <= h, "svt bench: low-rank rank must lie in [1, min(m, n)]");
    if (s.tau_rule == TauRule::fixed)
        require(s.tau >= 0.0, "svt bench: tau must be >= 0");
}

// Runs fn(i) for i in [0, count) on `threads` workers; fn writes to disjoint slots.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn)
{
    if (threads <= 1 || count <= 1)
    {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    for (int w = 0; w < workers; ++w)
    {
        pool.emplace_back([&] {
            for (int i = next++; i < count && !failed; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    if (!failed.exchange(true))
                        err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

inline Matrix bench_matrix(const SvtBenchSpec& s, RngStream& rng)
{
    return s.kind == MatrixKind::lowrank ? gen_lowrank(rng, s.m, s.n, s.rank)
                                         : gaussian_matrix(rng, s.m, s.n);
}

inline std::vector<double> to_std(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

} // namespace detail

//
// Per trial i (data stream i): exact SVT reference, then frsvt for every
// (k, p, eta) of the sweep with l = k + p, recording NRMSE, squared and
// spectral error, wall time and the closed-form bounds.
//
inline SvtBenchReport run_svt_bench(const SvtBenchSpec& spec)
{
    detail::validate(spec);
    const auto points = detail::sweep(spec);
    const auto npts = static_cast<int>(points.size());

    SvtBenchReport rep;
    rep.spec = spec;
    rep.records.resize(static_cast<std::size_t>(spec.trials) * points.size());

    // warm-up, discarded
    {
        RngStream rng(spec.seed, ~std::uint64_t{0});
        const Matrix A = detail::bench_matrix(spec, rng);
        FrsvtConfig fc;
        fc.tau = 0.0;
        fc.range.l = points.front().k + points.front().p;
        fc.range.eta = points.front().eta;
        (void)frsvt(A, fc, rng);
    }

    detail::parallel_for(spec.trials, spec.threads, [&](int trial) {
        RngStream data(spec.seed, static_cast<std::uint64_t>(trial));
        const Matrix A = detail::bench_matrix(spec, data);
        const ThinFactorization f = svd_exact(A);
        const double tau = spec.tau_rule == TauRule::fixed ? spec.tau : 1.0 / std::sqrt(f.sigma(0));
        const SvtResult ref = svt_exact(A, tau);
        const std::vector<double> sigma = detail::to_std(f.sigma);

        for (int c = 0; c < npts; ++c)
        {
            const auto& pt = points[static_cast<std::size_t>(c)];
            RngStream sketch = data.fork(static_cast<std::uint64_t>(c) + 1);
            FrsvtConfig fc;
            fc.tau = tau;
            fc.range.l = pt.k + pt.p;
            fc.range.eta = pt.eta;

            const auto t0 = std::chrono::steady_clock::now();
            const SvtResult out = frsvt(A, fc, sketch);
            const auto t1 = std::chrono::steady_clock::now();

            SvtTrialRecord r;
            r.trial = trial;
            r.k = pt.k;
            r.p = pt.p;
            r.eta = pt.eta;
            r.tau = tau;
            r.nrmse = nrmse(ref.X, out.X);
            const Matrix diff = ref.X - out.X;
            r.sq_error = diff.squaredNorm();
            r.spec_error = spectral_norm(diff);
            r.rank_after = out.rank_after;
            r.rank_exact = ref.rank_after;
            r.sampled = out.sampled;
            r.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            if (pt.k >= 2 && pt.p >= 2)
            {
                BoundParams bp{pt.k, pt.p, 0, std::min(spec.m, spec.n), tau, sigma};
                r.bound_frob = svt_bounds(bp).frob_bound;
                bp.eta = pt.eta;
                r.bound_spec = svt_bounds(bp).spec_bound;
            }
            rep.records[static_cast<std::size_t>(trial) * points.size() + static_cast<std::size_t>(c)] = r;
        }
    });

    for (int c = 0; c < npts; ++c)
    {
        const auto& pt = points[static_cast<std::size_t>(c)];
        SvtAggregate ag;
        ag.k = pt.k;
        ag.p = pt.p;
        ag.eta = pt.eta;
        double sum = 0.0, sq = 0.0, err = 0.0, serr = 0.0, t = 0.0, bf = 0.0, bs = 0.0;
        bool have_bounds = false;
        for (int trial = 0; trial < spec.trials; ++trial)
        {
            const auto& r = rep.records[static_cast<std::size_t>(trial) * points.size() + static_cast<std::size_t>(c)];
            sum += r.nrmse;
            sq += r.nrmse * r.nrmse;
            err += r.sq_error;
            serr += r.spec_error;
            t += static_cast<double>(r.wall_time_ns);
            if (r.bound_frob)
            {
                have_bounds = true;
                bf += *r.bound_frob;
                bs += *r.bound_spec;
            }
        }
        const double N = spec.trials;
        ag.mean_nrmse = sum / N;
        ag.stddev_nrmse = std::sqrt(std::max(0.0, sq / N - ag.mean_nrmse * ag.mean_nrmse));
        ag.mean_sq_error = err / N;
        ag.mean_spec_error = serr / N;
        ag.mean_wall_time_ns = t / N;
        if (have_bounds)
        {
            ag.mean_bound_frob = bf / N;
            ag.mean_bound_spec = bs / N;
        }
        rep.aggregates.push_back(ag);
    }
    return rep;
}

//
// RPCA benchmark
//

struct RpcaBenchSpec
{
    std::vector<std::pair<Index, Index>> sizes{{200, 200}};
    double rank_ratio = 0.1;
    double corruption = 0.1;
    double amplitude = 10.0;
    std::vector<SvtBackend> backends{SvtBackend::exact, SvtBackend::frsvt, SvtBackend::frsvt_rp};
    RpcaConfig config;                 // backend field is overridden per run
    int trials = 1;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct RpcaRunRecord
{
    Index m = 0;
    Index n = 0;
    SvtBackend backend = SvtBackend::exact;
    int trial = 0;
    int iterations = 0;
    bool converged = false;
    double nrmse_L = 0.0;
    double nrmse_S = 0.0;
    Index l0_S = 0;
    Index l0_S0 = 0;
    Index rank_L = 0;
    double final_residual = 0.0;
    std::vector<Index> rank_history;
    std::vector<Index> sample_history;
    std::vector<double> residual_history;
    std::int64_t total_time_ns = 0;
    std::int64_t svt_time_ns = 0;
    double time_per_iteration_ns = 0.0;
    std::string error;
};

struct RpcaBenchReport
{
    RpcaBenchSpec spec;
    std::vector<RpcaRunRecord> records;   // size-major, then backend, then trial
};

inline RpcaRunRecord run_rpca_case(const RpcaInstance& inst, SvtBackend backend, const RpcaConfig& base,
                                   RngStream& rng)
{
    RpcaRunRecord rec;
    rec.m = inst.O.rows();
    rec.n = inst.O.cols();
    rec.backend = backend;
    rec.l0_S0 = inst.support;

    RpcaConfig cfg = base;
    cfg.backend = backend;
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        const RpcaResult r = rpca_ialm(inst.O, cfg, rng);
        rec.total_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                std::chrono::steady_clock::now() - t0).count();
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.nrmse_L = nrmse(inst.L0, r.L);
        rec.nrmse_S = nrmse(inst.S0, r.S);
        rec.l0_S = l0_count(r.S, 1e-6 * max_abs(inst.O));
        rec.rank_L = r.rank_history.empty() ? 0 : r.rank_history.back();
        rec.final_residual = r.residual_history.empty() ? 0.0 : r.residual_history.back();
        rec.rank_history = r.rank_history;
        rec.sample_history = r.sample_history;
        rec.residual_history = r.residual_history;
        for (auto d : r.svt_time_history)
            rec.svt_time_ns += d.count();
        rec.time_per_iteration_ns = r.iterations > 0
            ? static_cast<double>(rec.total_time_ns) / r.iterations
            : 0.0;
    }
    catch (const RpcaError& e)
    {
        rec.total_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                std::chrono::steady_clock::now() - t0).count();
        rec.iterations = e.iteration();
        rec.error = e.what();
    }
    return rec;
}

//
// For each size, trial i draws one instance from data stream i and runs every
// backend on it; backend b uses solver stream fork(b + 1) of that stream.
// Non-convergent or failed runs are recorded, never fatal.
//
inline RpcaBenchReport run_rpca_bench(const RpcaBenchSpec& spec)
{
    require(spec.trials >= 1, "rpca bench: trials must be >= 1");
    require(!spec.sizes.empty() && !spec.backends.empty(), "rpca bench: empty size or backend list");
    for (const auto& [m, n] : spec.sizes)
        require(m >= 2 && n >= 2, "rpca bench: dimensions must be >= 2");

    RpcaBenchReport rep;
    rep.spec = spec;
    const std::size_t nb = spec.backends.size();
    const auto ntr = static_cast<std::size_t>(spec.trials);
    rep.records.resize(spec.sizes.size() * nb * ntr);

    for (std::size_t si = 0; si < spec.sizes.size(); ++si)
    {
        const auto [m, n] = spec.sizes[si];
        detail::parallel_for(spec.trials, spec.threads, [&](int trial) {
            RngStream data(spec.seed, static_cast<std::uint64_t>(si) << 32 | static_cast<std::uint64_t>(trial));
            const RpcaInstance inst = gen_rpca_instance(data, m, n, spec.rank_ratio, spec.corruption, spec.amplitude);
            for (std::size_t b = 0; b < nb; ++b)
            {
                RngStream solver = data.fork(b + 1);
                RpcaRunRecord rec = run_rpca_case(inst, spec.backends[b], spec.config, solver);
                rec.trial = trial;
                rep.records[(si * nb + b) * ntr + static_cast<std::size_t>(trial)] = std::move(rec);
            }
        });
    }
    return rep;
}

//
// serialization
//

inline nlohmann::json to_json(const SvtBenchReport& rep)
{
    using nlohmann::json;
    const auto& s = rep.spec;
    json j;
    j["kind"] = "svt";
    j["spec"] = {
        {"m", s.m}, {"n", s.n},
        {"matrix_kind", s.kind == MatrixKind::lowrank ? "lowrank" : "gauss"},
        {"rank", s.rank},
        {"tau_rule", s.tau_rule == TauRule::fixed ? "fixed" : "inv-sqrt-spec"},
        {"tau", s.tau},
        {"k", s.k}, {"p", s.p}, {"eta", s.eta},
        {"trials", s.trials}, {"seed", s.seed},
    };
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json recs = json::array();
    for (const auto& r : rep.records)
    {
        recs.push_back({
            {"trial", r.trial}, {"k", r.k}, {"p", r.p}, {"eta", r.eta}, {"tau", r.tau},
            {"nrmse", r.nrmse}, {"sq_error", r.sq_error}, {"spec_error", r.spec_error},
            {"rank_after", r.rank_after}, {"rank_exact", r.rank_exact}, {"sampled", r.sampled},
            {"bound_frob", opt(r.bound_frob)}, {"bound_spec", opt(r.bound_spec)},
            {"bound_ratio", r.bound_frob && *r.bound_frob > 0.0 ? json(r.sq_error / *r.bound_frob) : json(nullptr)},
            {"wall_time_ns", r.wall_time_ns},
        });
    }
    json aggs = json::array();
    for (const auto& a : rep.aggregates)
    {
        aggs.push_back({
            {"k", a.k}, {"p", a.p}, {"eta", a.eta},
            {"mean_nrmse", a.mean_nrmse}, {"stddev_nrmse", a.stddev_nrmse},
            {"mean_sq_error", a.mean_sq_error}, {"mean_spec_error", a.mean_spec_error},
            {"mean_bound_frob", opt(a.mean_bound_frob)}, {"mean_bound_spec", opt(a.mean_bound_spec)},
            {"mean_wall_time_ns", a.mean_wall_time_ns},
        });
    }
    j["records"] = std::move(recs);
    j["aggregates"] = std::move(aggs);
    return j;
}

inline nlohmann::json to_json(const RpcaBenchReport& rep)
{
    using nlohmann::json;
    const auto& s = rep.spec;
    json sizes = json::array();
    for (const auto& [m, n] : s.sizes)
        sizes.push_back({m, n});
    json backends = json::array();
    for (auto b : s.backends)
        backends.push_back(std::string(to_string(b)));

    json j;
    j["kind"] = "rpca";
    j["spec"] = {
        {"sizes", sizes}, {"rank_ratio", s.rank_ratio}, {"corruption", s.corruption},
        {"amplitude", s.amplitude}, {"backends", backends},
        {"lambda", s.config.lambda}, {"tol", s.config.tol}, {"max_iter", s.config.max_iter},
        {"eta", s.config.eta}, {"trials", s.trials}, {"seed", s.seed},
    };
    json recs = json::array();
    for (const auto& r : rep.records)
    {
        json rec = {
            {"m", r.m}, {"n", r.n}, {"backend", std::string(to_string(r.backend))}, {"trial", r.trial},
            {"iterations", r.iterations}, {"converged", r.converged},
            {"nrmse_L", r.nrmse_L}, {"nrmse_S", r.nrmse_S},
            {"l0_S", r.l0_S}, {"l0_S0", r.l0_S0}, {"rank_L", r.rank_L},
            {"final_residual", r.final_residual},
            {"rank_history", r.rank_history}, {"sample_history", r.sample_history},
            {"residual_history", r.residual_history},
            {"total_time_ns", r.total_time_ns}, {"svt_time_ns", r.svt_time_ns},
            {"time_per_iteration_ns", r.time_per_iteration_ns},
        };
        if (!r.error.empty())
            rec["error"] = r.error;
        recs.push_back(std::move(rec));
    }
    j["records"] = std::move(recs);
    return j;
}

// Removes every "*_ns" field, leaving what must be reproducible.
inline nlohmann::json strip_timing(nlohmann::json j)
{
    if (j.is_object())
    {
        for (auto it = j.begin(); it != j.end();)
        {
            const std::string& key = it.key();
            if (key.size() >= 3 && key.compare(key.size() - 3, 3, "_ns") == 0)
                it = j.erase(it);
            else
            {
                *it = strip_timing(*it);
                ++it;
            }
        }
    }
    else if (j.is_array())
    {
        for (auto& e : j)
            e = strip_timing(e);
    }
    return j;
}

// Table of iterations / |S|_0 / accuracy / timing with one column per backend.
inline std::string comparison_table(const RpcaBenchReport& rep)
{
    std::ostringstream os;
    const auto& s = rep.spec;
    const std::size_t nb = s.backends.size();
    const auto ntr = static_cast<std::size_t>(s.trials);
    for (std::size_t si = 0; si < s.sizes.size(); ++si)
    {
        os << "size " << s.sizes[si].first << "x" << s.sizes[si].second << "\n";
        os << std::left << std::setw(22) << "metric";
        for (auto b : s.backends)
            os << std::setw(14) << to_string(b);
        os << "\n";

        const auto row = [&](const char* name, auto&& value) {
            os << std::setw(22) << name;
            for (std::size_t b = 0; b < nb; ++b)
            {
                double acc = 0.0;
                for (std::size_t t = 0; t < ntr; ++t)
                    acc += value(rep.records[(si * nb + b) * ntr + t]);
                std::ostringstream cell;
                cell << std::setprecision(4) << acc / static_cast<double>(ntr);
                os << std::setw(14) << cell.str();
            }
            os << "\n";
        };
        row("iterations", [](const RpcaRunRecord& r) { return double(r.iterations); });
        row("|S|_0", [](const RpcaRunRecord& r) { return double(r.l0_S); });
        row("accuracy (NRMSE L)", [](const RpcaRunRecord& r) { return r.nrmse_L; });
        row("rank(L)", [](const RpcaRunRecord& r) { return double(r.rank_L); });
        row("time/iter (s)", [](const RpcaRunRecord& r) { return r.time_per_iteration_ns * 1e-9; });
        row("total time (s)", [](const RpcaRunRecord& r) { return double(r.total_time_ns) * 1e-9; });
        row("converged", [](const RpcaRunRecord& r) { return r.converged ? 1.0 : 0.0; });
    }
    return os.str();
}

} // namespace frsvt

#endif // FRSVT_BENCH_HPP
