// Experiment runner: Picard / Anderson / GMRES convergence histories for the
// Poisson, nonlinear Helmholtz, and WaveHoltz fixed-point problems, plus the
// one-step bound verification harness. Each solver writes one CSV
// (iter,res_l2,res_w,err_l2) and a summary line to stdout.
#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hsaa/anderson.hpp"
#include "hsaa/gmres.hpp"
#include "hsaa/problems/nonlinear_helmholtz.hpp"
#include "hsaa/problems/poisson.hpp"
#include "hsaa/problems/waveholtz.hpp"
#include "hsaa/theory.hpp"

namespace {

using namespace hsaa;

struct SolverSpec {
    enum class Kind { Picard, AA, Gmres };
    Kind kind = Kind::AA;
    int memory = 10;
    NormKind norm{};
    double beta = 1.0;
    int restart = 10;
};

struct RunOptions {
    double tol = 1e-8;
    int max_iters = 500;
    std::string out_dir = ".";
    std::vector<std::string> solver_flags;
};

NormKind parse_norm(const std::string& text) {
    if (text == "l2") return NormKind{0};
    if (text.rfind("hm", 0) == 0) {
        const int s = std::stoi(text.substr(2));
        if (s < 0) throw CLI::ValidationError("--norm", "negative Sobolev order");
        return NormKind{s};
    }
    throw CLI::ValidationError("--norm", "expected l2 or hm<s>, got '" + text + "'");
}

std::string norm_label(NormKind norm) {
    return norm.s == 0 ? std::string("l2") : "hm" + std::to_string(norm.s);
}

SolverSpec parse_solver(const std::string& text, const SolverSpec& defaults) {
    SolverSpec spec = defaults;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    if (name == "picard") {
        spec.kind = SolverSpec::Kind::Picard;
    } else if (name == "aa") {
        spec.kind = SolverSpec::Kind::AA;
    } else if (name == "gmres") {
        spec.kind = SolverSpec::Kind::Gmres;
    } else {
        throw CLI::ValidationError("--solver", "unknown solver '" + name + "'");
    }
    if (colon == std::string::npos) return spec;
    std::string rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = rest.substr(0, comma);
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--solver", "expected key=value in '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "m") {
            spec.memory = std::stoi(value);
        } else if (key == "norm") {
            spec.norm = parse_norm(value);
        } else if (key == "beta") {
            spec.beta = std::stod(value);
        } else if (key == "restart") {
            spec.restart = std::stoi(value);
        } else {
            throw CLI::ValidationError("--solver", "unknown key '" + key + "'");
        }
    }
    return spec;
}

std::string solver_label(const SolverSpec& spec) {
    switch (spec.kind) {
        case SolverSpec::Kind::Picard: return "picard";
        case SolverSpec::Kind::Gmres: return "gmres_r" + std::to_string(spec.restart);
        case SolverSpec::Kind::AA: {
            std::string label = "aa_" + norm_label(spec.norm);
            label += spec.memory == kUnboundedMemory ? "_minf" : "_m" + std::to_string(spec.memory);
            if (spec.beta != 1.0) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "_b%g", spec.beta);
                label += buf;
            }
            return label;
        }
    }
    return "unknown";
}

std::string csv_path(const RunOptions& run, const std::string& prefix, const std::string& label) {
    std::filesystem::create_directories(run.out_dir);
    return (std::filesystem::path(run.out_dir) / (prefix + "_" + label + ".csv")).string();
}

void print_summary(const std::string& label, const ConvergenceRecord& record, double tol) {
    const auto reached = record.iterations_to(tol);
    std::cout << label << ": " << to_string(record.status);
    if (reached) {
        std::cout << " iterations_to_tol=" << *reached;
    } else {
        std::cout << " iterations_to_tol=-";
    }
    if (!record.rows.empty()) {
        std::cout << " rows=" << record.rows.size()
                  << " final_rel=" << record.final_residual() / record.initial_residual();
    }
    std::cout << "\n";
}

/// Runs the requested solvers against one problem; returns the exit code.
template <typename Scalar>
int run_solvers(const FixedPointProblem<Scalar>& problem, const std::vector<SolverSpec>& specs,
                const RunOptions& run, const std::string& prefix) {
    int exit_code = 0;
    for (const auto& spec : specs) {
        const std::string label = solver_label(spec);
        const WeightOperator weight = build_weight(spec.norm, problem.dim(), problem.spacing());
        ConvergenceRecord record;
        if (spec.kind == SolverSpec::Kind::Picard) {
            record = picard_run<Scalar>(problem, problem.initial_iterate(), run.max_iters,
                                        run.tol, &weight)
                         .record;
        } else if (spec.kind == SolverSpec::Kind::AA) {
            AAConfig config;
            config.memory = spec.memory;
            config.beta = spec.beta;
            config.norm = spec.norm;
            config.tol = run.tol;
            config.max_iters = run.max_iters;
            record = aa_run<Scalar>(problem, config, problem.initial_iterate(), weight).record;
        } else {
            if constexpr (std::is_same_v<Scalar, double>) {
                const AffineSystem system(problem);
                GmresOptions options;
                options.restart = spec.restart;
                options.tol = run.tol;
                options.max_outer = (run.max_iters + spec.restart - 1) / spec.restart;
                const auto exact = problem.exact_solution();
                record = gmres_restarted(system, problem.initial_iterate(), options, &weight,
                                         exact ? &*exact : nullptr)
                             .record;
            } else {
                std::cerr << "gmres requires a real affine problem\n";
                return 1;
            }
        }
        write_csv_file(record, csv_path(run, prefix, label));
        print_summary(label, record, run.tol);
        if (record.status != RunStatus::Converged) exit_code = 2;
    }
    return exit_code;
}

/// One-step AA curve: for every Picard depth k in [m, depth], run k Picard
/// iterations plus a single AA step and record the resulting residual/error.
void write_one_step_curve(const PoissonProblem& problem, int memory, NormKind norm, int depth,
                          const RunOptions& run) {
    const WeightOperator weight = build_weight(norm, problem.dim(), problem.spacing());
    const Eigen::VectorXd x0 = problem.initial_iterate();
    const Eigen::VectorXd exact = problem.exact_solution().value();
    ConvergenceRecord record;
    record.status = RunStatus::Converged;
    for (int k = memory; k <= depth; ++k) {
        const Eigen::VectorXd error = one_step_aa<double>(problem, x0, k, memory, weight);
        const Eigen::VectorXd x = exact + error;
        const Eigen::VectorXd f = problem.apply_G(x) - x;
        ConvergenceRow row;
        row.iter = k + 1;
        row.res_l2 = f.norm();
        row.res_weighted = weight.norm<double>(f);
        row.err_l2 = error.norm();
        record.rows.push_back(row);
    }
    const std::string label = "onestep_" + norm_label(norm) + "_m" + std::to_string(memory);
    write_csv_file(record, csv_path(run, "poisson", label));
    std::cout << label << ": rows=" << record.rows.size() << "\n";
}

std::vector<SolverSpec> resolve_solvers(const RunOptions& run, const SolverSpec& defaults,
                                        const std::vector<std::string>& fallback) {
    std::vector<SolverSpec> specs;
    const auto& flags = run.solver_flags.empty() ? fallback : run.solver_flags;
    specs.reserve(flags.size());
    for (const auto& text : flags) specs.push_back(parse_solver(text, defaults));
    return specs;
}

void add_run_options(CLI::App* cmd, RunOptions& run) {
    cmd->add_option("--tol", run.tol, "relative residual stopping tolerance");
    cmd->add_option("--max-iters", run.max_iters, "iteration budget per solver");
    cmd->add_option("--out", run.out_dir, "output directory for CSV files");
    cmd->add_option("--solver", run.solver_flags,
                    "solver spec: picard | aa[:k=v,...] | gmres[:restart=r] "
                    "(keys: m, norm, beta, restart); repeatable");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anderson acceleration with H^{-s} weighted least squares: experiment runner"};
    app.require_subcommand(1);

    // --- poisson ---
    auto* poisson = app.add_subcommand("poisson", "1D Poisson fixed-point experiments");
    std::string poisson_variant = "jacobi";
    Eigen::Index poisson_n = 63;
    int poisson_m = 10;
    std::string poisson_norm = "hm2";
    double poisson_beta = 1.0;
    int one_step_depth = 0;
    RunOptions poisson_run;
    poisson->add_option("--variant", poisson_variant, "jacobi | richardson")
        ->check(CLI::IsMember({"jacobi", "richardson"}));
    poisson->add_option("--n", poisson_n, "interior grid points");
    poisson->add_option("--m", poisson_m, "AA memory");
    poisson->add_option("--norm", poisson_norm, "l2 | hm<s>");
    poisson->add_option("--beta", poisson_beta, "mixing parameter");
    poisson->add_option("--one-step", one_step_depth,
                        "also emit the one-step AA curve up to this Picard depth");
    add_run_options(poisson, poisson_run);

    // --- nlh ---
    auto* nlh = app.add_subcommand("nlh", "nonlinear Helmholtz fixed-point experiments");
    double nlh_k0 = 20.0;
    int nlh_m = 1;
    std::string nlh_norm = "l2";
    double nlh_beta = 1.0;
    RunOptions nlh_run;
    nlh_run.max_iters = 100;
    nlh->add_option("--k0", nlh_k0, "linear wavenumber");
    nlh->add_option("--m", nlh_m, "AA memory");
    nlh->add_option("--norm", nlh_norm, "l2 | hm<s>");
    nlh->add_option("--beta", nlh_beta, "mixing parameter");
    add_run_options(nlh, nlh_run);

    // --- waveholtz1d ---
    auto* wh1 = app.add_subcommand("waveholtz1d", "1D WaveHoltz iteration experiments");
    Eigen::Index wh1_n = 513;
    double wh1_omega = 25.0 * M_SQRT2;
    std::string wh1_speed = "a";
    double wh1_cfl = 0.5;
    int wh1_m = 10;
    std::string wh1_norm = "hm2";
    bool wh1_no_reference = false;
    RunOptions wh1_run;
    wh1_run.tol = 1e-6;
    wh1->add_option("--n", wh1_n, "interior grid points");
    wh1->add_option("--omega", wh1_omega, "Helmholtz angular frequency");
    wh1->add_option("--speed", wh1_speed, "wave speed profile: a | b | c")
        ->check(CLI::IsMember({"a", "b", "c"}));
    wh1->add_option("--cfl", wh1_cfl, "CFL number in (0,1]");
    wh1->add_option("--m", wh1_m, "AA memory / GMRES restart");
    wh1->add_option("--norm", wh1_norm, "l2 | hm<s>");
    wh1->add_flag("--no-reference", wh1_no_reference,
                  "skip the dense reference solve (err_l2 left blank)");
    add_run_options(wh1, wh1_run);

    // --- waveholtz2d ---
    auto* wh2 = app.add_subcommand("waveholtz2d", "2D WaveHoltz iteration experiments");
    Eigen::Index wh2_nodes = 65;
    double wh2_omega = 11.0;
    double wh2_cfl = 0.5;
    int wh2_m = 30;
    std::string wh2_norm = "hm2";
    RunOptions wh2_run;
    wh2_run.tol = 1e-6;
    wh2->add_option("--nodes", wh2_nodes, "grid nodes per side (walls included)");
    wh2->add_option("--omega", wh2_omega, "Helmholtz angular frequency");
    wh2->add_option("--cfl", wh2_cfl, "CFL number in (0,1]");
    wh2->add_option("--m", wh2_m, "AA memory / GMRES restart");
    wh2->add_option("--norm", wh2_norm, "l2 | hm<s>");
    add_run_options(wh2, wh2_run);

    // --- theory-bound ---
    auto* bound = app.add_subcommand("theory-bound", "verify the one-step improvement bound");
    double bound_a = 0.3, bound_b = 0.9;
    int bound_m = 10, bound_k = -1, bound_n = 16, bound_trials = 100;
    std::uint64_t bound_seed = 1;
    bool bound_weighted = false;
    bound->add_option("--a", bound_a, "spectrum lower end");
    bound->add_option("--b", bound_b, "spectrum upper end");
    bound->add_option("--m", bound_m, "AA memory");
    bound->add_option("--k", bound_k, "Picard depth (default m)");
    bound->add_option("--n", bound_n, "operator dimension");
    bound->add_option("--trials", bound_trials, "seeded trials");
    bound->add_option("--seed", bound_seed, "base seed");
    bound->add_flag("--weighted", bound_weighted,
                    "check the commuting-weight variant with sigma_i = 1/i^2");

    // --- gmres-compare ---
    auto* compare = app.add_subcommand("gmres-compare",
                                       "AA (L2 and H^-2) against restarted GMRES side by side");
    std::string cmp_problem = "waveholtz1d";
    Eigen::Index cmp_n = 513;
    double cmp_omega = 25.0 * M_SQRT2;
    std::string cmp_speed = "a";
    double cmp_cfl = 0.5;
    int cmp_m = 10;
    RunOptions cmp_run;
    cmp_run.tol = 1e-6;
    compare->add_option("--problem", cmp_problem, "waveholtz1d | waveholtz2d | poisson")
        ->check(CLI::IsMember({"waveholtz1d", "waveholtz2d", "poisson"}));
    compare->add_option("--n", cmp_n, "grid points (interior for 1D, per-side nodes for 2D)");
    compare->add_option("--omega", cmp_omega, "Helmholtz angular frequency (waveholtz)");
    compare->add_option("--speed", cmp_speed, "1D wave speed profile: a | b | c")
        ->check(CLI::IsMember({"a", "b", "c"}));
    compare->add_option("--cfl", cmp_cfl, "CFL number");
    compare->add_option("--m", cmp_m, "AA memory and GMRES restart length");
    add_run_options(compare, cmp_run);

    CLI11_PARSE(app, argc, argv);

    try {
        if (poisson->parsed()) {
            const auto variant = poisson_variant == "jacobi" ? PoissonVariant::WeightedJacobi
                                                             : PoissonVariant::Richardson;
            const auto problem = PoissonProblem::with_default_forcing(variant, poisson_n);
            SolverSpec defaults;
            defaults.memory = poisson_m;
            defaults.norm = parse_norm(poisson_norm);
            defaults.beta = poisson_beta;
            const auto specs =
                resolve_solvers(poisson_run, defaults, {"picard", "aa:norm=l2", "aa:norm=hm2"});
            const int code = run_solvers<double>(problem, specs, poisson_run, "poisson");
            if (one_step_depth > 0) {
                write_one_step_curve(problem, poisson_m, defaults.norm, one_step_depth,
                                     poisson_run);
            }
            return code;
        }

        if (nlh->parsed()) {
            const NonlinearHelmholtzProblem problem(nlh_k0);
            SolverSpec defaults;
            defaults.memory = nlh_m;
            defaults.norm = parse_norm(nlh_norm);
            defaults.beta = nlh_beta;
            const auto specs = resolve_solvers(
                nlh_run, defaults, {"picard", "aa:norm=l2", "aa:norm=hm1", "aa:norm=hm2"});
            for (const auto& spec : specs) {
                if (spec.kind == SolverSpec::Kind::Gmres) {
                    std::cerr << "nlh is nonlinear; gmres is not applicable\n";
                    return 1;
                }
            }
            return run_solvers<std::complex<double>>(problem, specs, nlh_run, "nlh");
        }

        if (wh1->parsed()) {
            const auto speed = wh1_speed == "a"   ? WaveSpeed1D::Uniform
                               : wh1_speed == "b" ? WaveSpeed1D::GaussianDip
                                                  : WaveSpeed1D::Inclusion;
            WaveHoltzProblem1D problem(wh1_n, wh1_omega, speed, wh1_cfl,
                                       std::min<Eigen::Index>(128, wh1_n / 2));
            problem.set_reference_enabled(!wh1_no_reference);
            SolverSpec defaults;
            defaults.memory = wh1_m;
            defaults.norm = parse_norm(wh1_norm);
            defaults.restart = wh1_m;
            const auto specs =
                resolve_solvers(wh1_run, defaults, {"picard", "aa:norm=l2", "aa:norm=hm2"});
            return run_solvers<double>(problem, specs, wh1_run, "waveholtz1d");
        }

        if (wh2->parsed()) {
            const WaveHoltzProblem2D problem(wh2_nodes, wh2_omega, wh2_cfl);
            SolverSpec defaults;
            defaults.memory = wh2_m;
            defaults.norm = parse_norm(wh2_norm);
            defaults.restart = wh2_m;
            const auto specs =
                resolve_solvers(wh2_run, defaults, {"aa:norm=l2", "aa:norm=hm2", "gmres"});
            return run_solvers<double>(problem, specs, wh2_run, "waveholtz2d");
        }

        if (bound->parsed()) {
            SpectrumSpec spec;
            spec.n = bound_n;
            spec.a = bound_a;
            spec.b = bound_b;
            spec.basis_seed = bound_seed;
            spec.e0_seed = bound_seed + 1000;
            const int k = bound_k < 0 ? bound_m : bound_k;
            std::optional<Eigen::VectorXd> sigma;
            if (bound_weighted) {
                Eigen::VectorXd s(bound_n);
                for (int i = 0; i < bound_n; ++i) s[i] = 1.0 / ((i + 1.0) * (i + 1.0));
                sigma = s;
            }
            const auto reports = verify_one_step_bound(spec, k, bound_m, bound_trials, sigma);
            double max_ratio = 0.0;
            int failures = 0;
            for (const auto& report : reports) {
                max_ratio = std::max(max_ratio, report.ratio);
                if (!report.pass) ++failures;
            }
            std::cout << "theory-bound: trials=" << reports.size()
                      << " C(a,b,m)=" << reports.front().bound << " max_ratio=" << max_ratio
                      << " failures=" << failures << (failures == 0 ? " PASS" : " FAIL") << "\n";
            return failures == 0 ? 0 : 2;
        }

        if (compare->parsed()) {
            SolverSpec defaults;
            defaults.memory = cmp_m;
            defaults.restart = cmp_m;
            const std::vector<std::string> fallback = {"aa:norm=l2", "aa:norm=hm2", "gmres"};
            if (cmp_problem == "poisson") {
                const auto problem =
                    PoissonProblem::with_default_forcing(PoissonVariant::WeightedJacobi, cmp_n);
                const auto specs = resolve_solvers(cmp_run, defaults, fallback);
                return run_solvers<double>(problem, specs, cmp_run, "gmres-compare");
            }
            if (cmp_problem == "waveholtz2d") {
                const WaveHoltzProblem2D problem(cmp_n == 513 ? 65 : cmp_n, cmp_omega, cmp_cfl);
                const auto specs = resolve_solvers(cmp_run, defaults, fallback);
                return run_solvers<double>(problem, specs, cmp_run, "gmres-compare");
            }
            const auto speed = cmp_speed == "a"   ? WaveSpeed1D::Uniform
                               : cmp_speed == "b" ? WaveSpeed1D::GaussianDip
                                                  : WaveSpeed1D::Inclusion;
            const WaveHoltzProblem1D problem(cmp_n, cmp_omega, speed, cmp_cfl,
                                             std::min<Eigen::Index>(128, cmp_n / 2));
            const auto specs = resolve_solvers(cmp_run, defaults, fallback);
            return run_solvers<double>(problem, specs, cmp_run, "gmres-compare");
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 1;
}
