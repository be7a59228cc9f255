// Command line front end: single-SVT and RPCA benchmarks, matrix file I/O.
//
//   frsvt bench svt  --m 200 --n 100 --kind gauss --tau inv-sqrt-spec --k 10,20 --p 5 --eta 2 ...
//   frsvt bench rpca --m 200 --n 200 --rank-ratio 0.1 --corruption 0.1 --backend exact,frsvt-rp ...
//   frsvt matrix export --format bin --path A.bin --m 10 --n 5
//   frsvt matrix import --format bin --path A.bin
//
// Exit status: 0 success, 1 invalid arguments or I/O failure, 2 non-convergence.
// FRSVT_SEED overrides the default seed; FRSVT_OUT_DIR prefixes relative output paths.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frsvt/bench.hpp"
#include "frsvt/frsvt.hpp"

namespace fs = std::filesystem;
using namespace frsvt;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_nonconvergent = 2;

fs::path output_path(const std::string& p)
{
    fs::path path(p);
    if (const char* dir = std::getenv("FRSVT_OUT_DIR"); dir != nullptr && *dir != '\0' && path.is_relative())
        path = fs::path(dir) / path;
    return path;
}

void emit(const nlohmann::json& j, const std::string& out)
{
    if (out.empty() || out == "-")
    {
        std::cout << j.dump(2) << "\n";
        return;
    }
    const fs::path path = output_path(out);
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << "\n";
}

// "gauss" or "lowrank:R"
void parse_kind(const std::string& s, MatrixKind& kind, Index& rank)
{
    if (s == "gauss")
    {
        kind = MatrixKind::gaussian_full_rank;
        return;
    }
    if (s.rfind("lowrank:", 0) == 0)
    {
        kind = MatrixKind::lowrank;
        rank = std::stoll(s.substr(8));
        return;
    }
    throw InvalidArgument("--kind must be gauss or lowrank:R");
}

// "inv-sqrt-spec" or "fixed:V"
void parse_tau(const std::string& s, TauRule& rule, double& tau)
{
    if (s == "inv-sqrt-spec")
    {
        rule = TauRule::inv_sqrt_spectral;
        return;
    }
    if (s.rfind("fixed:", 0) == 0)
    {
        rule = TauRule::fixed;
        tau = std::stod(s.substr(6));
        return;
    }
    throw InvalidArgument("--tau must be inv-sqrt-spec or fixed:V");
}

struct SvtArgs
{
    Index m = 200, n = 100;
    std::string kind = "gauss";
    std::string tau = "inv-sqrt-spec";
    std::vector<Index> k{20};
    std::vector<Index> p{5};
    std::vector<int> eta{2};
    int trials = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
};

struct RpcaArgs
{
    Index m = 200, n = 200;
    double rank_ratio = 0.1;
    double corruption = 0.1;
    double amplitude = 10.0;
    std::vector<std::string> backends{"exact", "frsvt", "frsvt-rp"};
    std::string lambda = "auto";
    double tol = 1e-7;
    int max_iter = 500;
    int eta = 2;
    int trials = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
    bool table = false;
};

struct MatrixArgs
{
    std::string format = "bin";
    std::string path;
    Index m = 10, n = 10;
    std::string kind = "gauss";
    std::uint64_t seed = 1;
};

int run_svt(const SvtArgs& a)
{
    SvtBenchSpec spec;
    spec.m = a.m;
    spec.n = a.n;
    parse_kind(a.kind, spec.kind, spec.rank);
    parse_tau(a.tau, spec.tau_rule, spec.tau);
    spec.k = a.k;
    spec.p = a.p;
    spec.eta = a.eta;
    spec.trials = a.trials;
    spec.seed = a.seed;
    spec.threads = a.threads;
    emit(to_json(run_svt_bench(spec)), a.out);
    return exit_ok;
}

int run_rpca(const RpcaArgs& a)
{
    RpcaBenchSpec spec;
    spec.sizes = {{a.m, a.n}};
    spec.rank_ratio = a.rank_ratio;
    spec.corruption = a.corruption;
    spec.amplitude = a.amplitude;
    spec.backends.clear();
    for (const auto& b : a.backends)
        spec.backends.push_back(parse_backend(b));
    spec.config.lambda = a.lambda == "auto" ? 0.0 : std::stod(a.lambda);
    require(a.lambda == "auto" || spec.config.lambda > 0.0, "--lambda must be auto or positive");
    spec.config.tol = a.tol;
    spec.config.max_iter = a.max_iter;
    spec.config.eta = a.eta;
    spec.trials = a.trials;
    spec.seed = a.seed;
    spec.threads = a.threads;

    const RpcaBenchReport rep = run_rpca_bench(spec);
    emit(to_json(rep), a.out);
    if (a.table)
        std::cerr << comparison_table(rep);

    for (const auto& r : rep.records)
        if (!r.converged)
            return exit_nonconvergent;
    return exit_ok;
}

int run_export(const MatrixArgs& a)
{
    require(!a.path.empty(), "--path is required");
    SvtBenchSpec s;
    s.m = a.m;
    s.n = a.n;
    parse_kind(a.kind, s.kind, s.rank);
    RngStream rng(a.seed);
    const Matrix A = s.kind == MatrixKind::lowrank ? gen_lowrank(rng, a.m, a.n, s.rank)
                                                   : gaussian_matrix(rng, a.m, a.n);
    write_matrix(output_path(a.path), A, parse_format(a.format));
    return exit_ok;
}

int run_import(const MatrixArgs& a)
{
    require(!a.path.empty(), "--path is required");
    const Matrix A = read_matrix(a.path, parse_format(a.format));
    nlohmann::json j = {
        {"rows", A.rows()},
        {"cols", A.cols()},
        {"frobenius", frobenius_norm(A)},
        {"spectral", A.size() > 0 ? spectral_norm(A) : 0.0},
        {"max_abs", max_abs(A)},
        {"nonzeros", l0_count(A)},
    };
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fast randomized singular value thresholding: benchmarks and matrix I/O"};
    app.require_subcommand(1);

    auto* bench = app.add_subcommand("bench", "run a benchmark");
    bench->require_subcommand(1);

    SvtArgs sa;
    auto* svt = bench->add_subcommand("svt", "single SVT accuracy/timing against the exact operator");
    svt->add_option("--m", sa.m, "rows")->capture_default_str();
    svt->add_option("--n", sa.n, "columns")->capture_default_str();
    svt->add_option("--kind", sa.kind, "gauss | lowrank:R")->capture_default_str();
    svt->add_option("--tau", sa.tau, "fixed:V | inv-sqrt-spec")->capture_default_str();
    svt->add_option("--k", sa.k, "target ranks (comma separated)")->delimiter(',');
    svt->add_option("--p", sa.p, "over-sampling values (comma separated)")->delimiter(',');
    svt->add_option("--eta", sa.eta, "power iteration counts (comma separated)")->delimiter(',');
    svt->add_option("--trials", sa.trials)->capture_default_str();
    svt->add_option("--seed", sa.seed)->envname("FRSVT_SEED")->capture_default_str();
    svt->add_option("--threads", sa.threads)->capture_default_str();
    svt->add_option("--out", sa.out, "report path (stdout if omitted)");

    RpcaArgs ra;
    auto* rpca = bench->add_subcommand("rpca", "robust PCA convergence comparison");
    rpca->add_option("--m", ra.m)->capture_default_str();
    rpca->add_option("--n", ra.n)->capture_default_str();
    rpca->add_option("--rank-ratio", ra.rank_ratio)->capture_default_str();
    rpca->add_option("--corruption", ra.corruption)->capture_default_str();
    rpca->add_option("--amplitude", ra.amplitude)->capture_default_str();
    rpca->add_option("--backend", ra.backends, "exact | frsvt | frsvt-rp (comma separated)")->delimiter(',');
    rpca->add_option("--lambda", ra.lambda, "auto | V")->capture_default_str();
    rpca->add_option("--tol", ra.tol)->capture_default_str();
    rpca->add_option("--max-iter", ra.max_iter)->capture_default_str();
    rpca->add_option("--eta", ra.eta)->capture_default_str();
    rpca->add_option("--trials", ra.trials)->capture_default_str();
    rpca->add_option("--seed", ra.seed)->envname("FRSVT_SEED")->capture_default_str();
    rpca->add_option("--threads", ra.threads)->capture_default_str();
    rpca->add_option("--out", ra.out, "report path (stdout if omitted)");
    rpca->add_flag("--table", ra.table, "print a comparison table to stderr");

    MatrixArgs ma;
    auto* matrix = app.add_subcommand("matrix", "matrix file I/O");
    matrix->require_subcommand(1);
    auto* exp = matrix->add_subcommand("export", "write a generated matrix");
    exp->add_option("--format", ma.format, "csv | bin")->capture_default_str();
    exp->add_option("--path", ma.path)->required();
    exp->add_option("--m", ma.m)->capture_default_str();
    exp->add_option("--n", ma.n)->capture_default_str();
    exp->add_option("--kind", ma.kind, "gauss | lowrank:R")->capture_default_str();
    exp->add_option("--seed", ma.seed)->envname("FRSVT_SEED")->capture_default_str();
    auto* imp = matrix->add_subcommand("import", "read a matrix and print a summary");
    imp->add_option("--format", ma.format, "csv | bin")->capture_default_str();
    imp->add_option("--path", ma.path)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_invalid;
    }

    try
    {
        if (*svt)
            return run_svt(sa);
        if (*rpca)
            return run_rpca(ra);
        if (*exp)
            return run_export(ma);
        if (*imp)
            return run_import(ma);
    }
    catch (const NonConvergenceError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_nonconvergent;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_invalid;
}
