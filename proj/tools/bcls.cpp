// bcls: biclustering estimation and completion from the command line.
//
//   bcls generate  simulate a model and write values.csv, mask.csv, truth.json
//   bcls estimate  constrained least-squares fit at fixed cluster numbers
//   bcls adapt     fit with cluster numbers chosen by sample splitting
//   bcls graphon   sparse graphon estimation trials
//   bcls sweep     Monte Carlo sweep with a rate report
//
// Exit status: 0 on success, 2 on bad flags, 1 on any other error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcls/adapt.hpp"
#include "bcls/estimator.hpp"
#include "bcls/graphon.hpp"
#include "bcls/harness.hpp"
#include "bcls/io.hpp"
#include "bcls/parallel.hpp"
#include "bcls/rng.hpp"
#include "bcls/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> one_based(const std::vector<int>& z) {
    std::vector<int> out(z);
    for (auto& v : out) ++v;
    return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct GenerateArgs {
    std::string scenario = "gaussian-asym";
    std::size_t n = 0, n1 = 0, n2 = 0;
    int k = 0, k1 = 0, k2 = 0;
    double p = 1.0, sigma = 1.0, rho = 0.5, M = 1.0, gap = 0.0, alpha = 1.0;
    std::string truth = "random", graphon = "smooth";
    std::uint64_t seed = 0;
    std::string out = ".";
};

void run_generate(const GenerateArgs& a) {
    const bcls::Scenario scenario = bcls::scenario_from_string(a.scenario);
    const std::size_t n1 = a.n1 ? a.n1 : a.n;
    const std::size_t n2 = a.n2 ? a.n2 : (a.n ? a.n : a.n1);
    const int k1 = a.k1 ? a.k1 : a.k;
    const int k2 = a.k2 ? a.k2 : (a.k ? a.k : a.k1);
    if (n1 == 0 || n2 == 0) throw UsageError("--n (or --n1/--n2) is required");
    const fs::path dir(a.out);
    fs::create_directories(dir);

    if (scenario == bcls::Scenario::graphon) {
        const bcls::GraphonSpec g{bcls::graphon_shape_from_string(a.graphon), a.rho, a.alpha, 1.0};
        const auto sample = bcls::sample_graphon_network(g, n1, a.seed);
        json truth = {{"kind", "graphon"}, {"graphon", a.graphon}, {"rho", a.rho}, {"alpha", a.alpha},
                      {"n", n1}, {"xi", sample.xi}, {"theta", bcls::matrix_to_json(sample.theta)}};
        const std::string values = bcls::matrix_to_csv(sample.x.values());
        const std::string mask = bcls::mask_to_csv(sample.x.mask());
        bcls::write_file_atomic(dir / "values.csv", values);
        bcls::write_file_atomic(dir / "mask.csv", mask);
        bcls::write_file_atomic(dir / "truth.json", dump(truth));
        return;
    }

    if (k1 == 0 || k2 == 0) throw UsageError("--k (or --k1/--k2) is required");
    bcls::ModelSpec spec;
    switch (scenario) {
        case bcls::Scenario::gaussian_sym: spec = bcls::ModelSpec::symmetric(n1, k1, a.M); break;
        case bcls::Scenario::sbm: spec = bcls::ModelSpec::sbm(n1, k1, a.rho); break;
        default: spec = bcls::ModelSpec::asymmetric(n1, n2, k1, k2, a.M); break;
    }
    const bool symmetric = spec.is_symmetric();
    const auto [assignment, q] =
        a.truth == "planted" ? bcls::gen_planted_model(spec, a.gap, bcls::derive_seed(a.seed, 1))
        : a.truth == "random" ? bcls::gen_random_model(spec, bcls::derive_seed(a.seed, 1))
                              : throw UsageError("--truth must be random or planted");
    const bcls::Matrix theta = bcls::materialize_theta(assignment, q, spec);
    const bcls::Mask mask = bcls::gen_mask(n1, n2, a.p, symmetric, bcls::derive_seed(a.seed, 2));
    const bcls::ObservedMatrix x =
        scenario == bcls::Scenario::sbm
            ? bcls::gen_bernoulli(theta, mask, true, bcls::derive_seed(a.seed, 3))
            : bcls::gen_gaussian(theta, a.sigma, mask, symmetric, bcls::derive_seed(a.seed, 3));

    json truth = bcls::model_to_json({spec, assignment, q});
    truth["theta"] = bcls::matrix_to_json(theta);
    truth["p"] = a.p;
    if (scenario != bcls::Scenario::sbm) truth["sigma"] = a.sigma;
    bcls::write_file_atomic(dir / "values.csv", bcls::matrix_to_csv(x.values()));
    bcls::write_file_atomic(dir / "mask.csv", bcls::mask_to_csv(x.mask()));
    bcls::write_file_atomic(dir / "truth.json", dump(truth));
}

struct FitArgs {
    std::string values, mask, out = ".";
    std::optional<double> p;
    int k = 0, k1 = 0, k2 = 0, kmax = 0;
    bool symmetric = false, exact = false;
    double M = 1.0;
    int restarts = 32, max_iters = 100;
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

bcls::ObservedMatrix load_data(const FitArgs& a) {
    return bcls::ObservedMatrix(bcls::read_matrix_csv(a.values), bcls::read_mask_csv(a.mask), a.symmetric);
}

bcls::FitConfig fit_config(const FitArgs& a) {
    bcls::FitConfig c;
    c.restarts = a.restarts;
    c.max_iters = a.max_iters;
    c.tol = a.tol;
    c.seed = a.seed;
    c.solver = a.exact ? bcls::Solver::exact : bcls::Solver::alternating;
    c.validate();
    return c;
}

void run_estimate(const FitArgs& a) {
    const int k1 = a.k1 ? a.k1 : a.k;
    const int k2 = a.symmetric ? k1 : (a.k2 ? a.k2 : a.k);
    if (k1 == 0 || k2 == 0) throw UsageError("--k (or --k1 and --k2) is required");
    if (!a.p) throw UsageError("--p is required");
    const bcls::ObservedMatrix x = load_data(a);
    const bcls::ModelSpec spec = a.symmetric ? bcls::ModelSpec::symmetric(x.rows(), k1, a.M)
                                             : bcls::ModelSpec::asymmetric(x.rows(), x.cols(), k1, k2, a.M);
    const bcls::FitResult f = bcls::fit_observed(x, *a.p, spec, fit_config(a));

    const json report = {
        {"objective", f.objective},
        {"iterations", f.iterations},
        {"restarts", f.restarts_used},
        {"solver", a.exact ? "exact" : "alternating"},
        {"k1", k1},
        {"k2", k2},
        {"labels", {{"z1", one_based(f.assignment.z1)}, {"z2", one_based(f.assignment.z2)}}},
        {"q", bcls::matrix_to_json(f.q_hat.q)},
    };
    const fs::path dir(a.out);
    fs::create_directories(dir);
    bcls::write_file_atomic(dir / "theta_hat.csv", bcls::matrix_to_csv(f.theta_hat));
    bcls::write_file_atomic(dir / "fit.json", dump(report));
}

json losses_to_json(const bcls::Selection& s) {
    json out = json::array();
    for (const auto& g : s.losses) out.push_back({{"k1", g.k1}, {"k2", g.k2}, {"loss", g.loss}});
    return out;
}

void run_adapt(const FitArgs& a, int select_restarts) {
    const bcls::ObservedMatrix x = load_data(a);
    const double p = a.p ? *a.p : bcls::estimate_p(x.mask(), x.symmetric());
    if (!(p > 0.0)) throw std::invalid_argument("no observed entries");
    const bcls::KGrid grid = a.kmax > 0 ? bcls::KGrid::range(a.kmax, a.kmax)
                                        : bcls::KGrid::default_for(x.rows(), x.cols());
    bcls::AdaptConfig config;
    config.fit = fit_config(a);
    config.fit.solver = bcls::Solver::alternating;
    config.select_restarts = select_restarts;
    const bcls::AdaptResult r = bcls::adaptive_fit(x, p, a.M, grid, config);

    const json report = {
        {"k1_hat_delta", r.delta.k1},
        {"k2_hat_delta", r.delta.k2},
        {"k_hat_delta", {r.delta.k1, r.delta.k2}},
        {"k_hat_deltac", {r.delta_c.k1, r.delta_c.k2}},
        {"p_hat", p},
        {"p_estimated", !a.p.has_value()},
        {"validation_losses", {{"delta", losses_to_json(r.delta)}, {"deltac", losses_to_json(r.delta_c)}}},
    };
    const fs::path dir(a.out);
    fs::create_directories(dir);
    bcls::write_file_atomic(dir / "theta_hat.csv", bcls::matrix_to_csv(r.theta_hat));
    bcls::write_file_atomic(dir / "adapt.json", dump(report));
}

struct GraphonArgs {
    std::string f = "smooth", out = ".";
    double rho = 1.0, alpha = 1.0;
    std::size_t n = 100;
    int trials = 1, restarts = 32;
    std::uint64_t seed = 0;
    bool record_time = false, normalize = false;
};

void run_graphon(const GraphonArgs& a) {
    const bcls::GraphonSpec g{bcls::graphon_shape_from_string(a.f), a.rho, a.alpha, 1.0};
    g.validate();
    if (a.trials < 1) throw UsageError("--trials must be at least 1");
    const int k = bcls::graphon_bandwidth(a.n, a.alpha);

    struct Row {
        double mse = 0, offdiag = 0, seconds = 0;
    };
    std::vector<Row> rows(a.trials);
    bcls::parallel_for(rows.size(), [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        const auto sample = bcls::sample_graphon_network(g, a.n, a.seed + t);
        bcls::FitConfig config;
        config.restarts = a.restarts;
        config.seed = bcls::derive_seed(a.seed + t, 4);
        const bcls::Matrix f_hat = bcls::estimate_graphon(sample.x, a.alpha, a.rho, config, a.normalize);
        rows[t].mse = bcls::graphon_mse(f_hat, g, sample.xi);
        rows[t].offdiag = bcls::graphon_mse_offdiag(f_hat, g, sample.xi);
        if (a.record_time) {
            rows[t].seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    });

    std::string csv = "trial,n,k,mse,seconds\n";
    std::vector<double> mse, offdiag;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        csv += std::to_string(t) + ',' + std::to_string(a.n) + ',' + std::to_string(k) + ',' +
               bcls::format_real(rows[t].mse) + ',' + bcls::format_real(rows[t].seconds) + '\n';
        mse.push_back(rows[t].mse);
        offdiag.push_back(rows[t].offdiag);
    }
    const json summary = {
        {"graphon", a.f}, {"rho", a.rho}, {"alpha", a.alpha}, {"n", a.n}, {"k", k},
        {"trials", a.trials},
        {"mse_median", bcls::quantile(mse, 0.5)},
        {"mse_offdiag_median", bcls::quantile(offdiag, 0.5)},
        {"mse_offdiag", offdiag},
    };
    const fs::path dir(a.out);
    fs::create_directories(dir);
    bcls::write_file_atomic(dir / "graphon_results.csv", csv);
    bcls::write_file_atomic(dir / "graphon_summary.json", dump(summary));
}

void run_sweep(const std::string& config_path, const std::string& out, const std::string& report) {
    const json j = json::parse(bcls::read_file(config_path));
    const bcls::SweepConfig config = bcls::SweepConfig::from_json(j);
    const auto records = bcls::run_sweep(config);
    const std::string csv = bcls::records_to_csv(records);
    const std::string summary = dump(bcls::rate_report(records));
    bcls::write_file_atomic(out, csv);
    bcls::write_file_atomic(report, summary);
}

void add_fit_flags(CLI::App* cmd, FitArgs& a) {
    cmd->add_option("--values", a.values, "CSV of observed values")->required();
    cmd->add_option("--mask", a.mask, "CSV of 0/1 observation flags")->required();
    cmd->add_option("--M", a.M, "Bound on block values")->check(CLI::PositiveNumber);
    cmd->add_flag("--symmetric", a.symmetric, "Symmetric data with zero diagonal");
    cmd->add_option("--restarts", a.restarts, "Random restarts")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", a.max_iters, "Iterations per restart")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", a.tol, "Objective decrease stopping threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "Random seed")->required();
    cmd->add_option("--out", a.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Biclustering estimation and completion by constrained least squares"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Simulate data from a model");
    generate->add_option("--scenario", gen.scenario, "gaussian-asym, gaussian-sym, sbm or graphon");
    generate->add_option("--n", gen.n, "Matrix size (square)");
    generate->add_option("--n1", gen.n1, "Rows");
    generate->add_option("--n2", gen.n2, "Columns");
    generate->add_option("--k", gen.k, "Clusters per side");
    generate->add_option("--k1", gen.k1, "Row clusters");
    generate->add_option("--k2", gen.k2, "Column clusters");
    generate->add_option("--p", gen.p, "Observation rate");
    generate->add_option("--sigma", gen.sigma, "Gaussian noise level");
    generate->add_option("--rho", gen.rho, "Edge probability bound (sbm, graphon)");
    generate->add_option("--M", gen.M, "Block value bound");
    generate->add_option("--truth", gen.truth, "random or planted");
    generate->add_option("--gap", gen.gap, "Block gap of a planted truth");
    generate->add_option("--graphon", gen.graphon, "Graphon shape for the graphon scenario");
    generate->add_option("--alpha", gen.alpha, "Graphon smoothness");
    generate->add_option("--seed", gen.seed, "Random seed")->required();
    generate->add_option("--out", gen.out, "Output directory");

    FitArgs est;
    auto* estimate = app.add_subcommand("estimate", "Fit at fixed cluster numbers");
    add_fit_flags(estimate, est);
    estimate->add_option("--p", est.p, "Observation rate");
    estimate->add_option("--k", est.k, "Clusters per side");
    estimate->add_option("--k1", est.k1, "Row clusters");
    estimate->add_option("--k2", est.k2, "Column clusters");
    estimate->add_flag("--exact", est.exact, "Exhaustive search instead of alternating minimization");

    FitArgs ad;
    int select_restarts = 8;
    auto* adapt = app.add_subcommand("adapt", "Fit with cluster numbers chosen by sample splitting");
    add_fit_flags(adapt, ad);
    adapt->add_option("--p", ad.p, "Observation rate (estimated from the mask when absent)");
    adapt->add_option("--kmax", ad.kmax, "Largest k on the grid (default ceil(2 sqrt(n)))");
    adapt->add_option("--select-restarts", select_restarts, "Restarts inside the selection loop");

    GraphonArgs gr;
    auto* graphon = app.add_subcommand("graphon", "Sparse graphon estimation trials");
    graphon->add_option("--f", gr.f, "constant, bilinear, smooth or holder");
    graphon->add_option("--rho", gr.rho, "Sparsity level");
    graphon->add_option("--alpha", gr.alpha, "Smoothness");
    graphon->add_option("--n", gr.n, "Nodes")->check(CLI::Range(2, 1 << 20));
    graphon->add_option("--trials", gr.trials, "Trials");
    graphon->add_option("--restarts", gr.restarts, "Restarts per fit")->check(CLI::PositiveNumber);
    graphon->add_option("--seed", gr.seed, "Random seed")->required();
    graphon->add_option("--out", gr.out, "Output directory");
    graphon->add_flag("--record-time", gr.record_time, "Fill the seconds column");
    graphon->add_flag("--normalize", gr.normalize, "Report the estimate divided by rho");

    std::string sweep_config, sweep_out = "results.csv", sweep_report = "report.json";
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep");
    sweep->add_option("--config", sweep_config, "Sweep JSON")->required();
    sweep->add_option("--out", sweep_out, "Per-trial CSV");
    sweep->add_option("--report", sweep_report, "Summary JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        bcls::set_max_threads(threads);
        if (*generate) run_generate(gen);
        if (*estimate) run_estimate(est);
        if (*adapt) run_adapt(ad, select_restarts);
        if (*graphon) run_graphon(gr);
        if (*sweep) run_sweep(sweep_config, sweep_out, sweep_report);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
