#ifndef BCLS_HARNESS_HPP
#define BCLS_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcls/estimator.hpp"
#include "bcls/graphon.hpp"

namespace bcls {

enum class Scenario { gaussian_asym, gaussian_sym, sbm, graphon, adapt, unknown_p };

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);
bool is_symmetric(Scenario scenario);

enum class TruthKind { random, planted };

/// One point of a sweep. Fields a scenario does not use keep their defaults.
struct SweepCell {
    Scenario scenario = Scenario::gaussian_asym;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    int k1 = 1;
    int k2 = 1;
    double p = 1.0;
    double sigma = 1.0;
    double rho = 1.0;
    double M = 1.0;
    Solver mode = Solver::alternating;
    TruthKind truth = TruthKind::random;
    /// Block gap of planted truths (gaussian scenarios).
    double gap = 0.0;
    GraphonShape graphon = GraphonShape::smooth;
    double alpha = 1.0;
    /// Largest k on the adaptation grid; 0 selects the default grid.
    int kmax = 0;

    /// Canonical text of every field; the seed hash is taken over it.
    std::string key() const;
};

struct TrialRecord {
    SweepCell cell;
    std::uint64_t seed = 0;
    /// ||theta_hat - theta||^2, or the graphon MSE.
    double loss = 0.0;
    double scaled_loss = 0.0;
    double objective = 0.0;
    double seconds = 0.0;
    /// Loss of the all-zero estimate, ||theta||^2 (graphon: MSE of 0).
    double zero_loss = 0.0;
    int k1_hat = 0;
    int k2_hat = 0;
    double p_hat = 0.0;
};

/// loss * p / (k1 k2 + n1 log k1 + n2 log k2); symmetric scenarios use
/// loss * p / (k^2 + n log k).
double scaled_loss(const SweepCell& cell, double loss);

struct SweepConfig {
    Scenario scenario = Scenario::gaussian_asym;
    std::vector<std::size_t> n{32};
    std::vector<double> p{1.0};
    std::vector<int> k{2};
    std::vector<double> sigma{1.0};
    std::vector<double> rho{1.0};
    double M = 1.0;
    int trials = 1;
    Solver mode = Solver::alternating;
    FitConfig fit;
    std::uint64_t base_seed = 0;
    TruthKind truth = TruthKind::random;
    double gap = 0.0;
    GraphonShape graphon = GraphonShape::smooth;
    double alpha = 1.0;
    int kmax = 0;
    /// When false every record reports 0 seconds, keeping outputs reproducible.
    bool record_time = false;

    void validate() const;
    /// Cartesian product in list order: n, k, p, then sigma (gaussian) or rho.
    std::vector<SweepCell> cells() const;

    static SweepConfig from_json(const nlohmann::json& j);
};

/// Seed of trial `trial` of `cell`: keyed on the cell's content, not its position.
std::uint64_t trial_seed(std::uint64_t base_seed, const SweepCell& cell, int trial);

/// Generates truth and data for the cell, fits, and scores against the truth.
TrialRecord run_trial(const SweepCell& cell, const FitConfig& fit, std::uint64_t seed,
                      bool record_time = true);

/// Records ordered by cell (in cells() order), then trial.
std::vector<TrialRecord> run_sweep(const SweepConfig& config);

std::string records_to_csv(const std::vector<TrialRecord>& records);

/// Linear-interpolation quantile (R type 7) of unsorted values.
double quantile(std::vector<double> values, double q);

/// Per-cell medians and upper quartiles, p-ratio comparisons and the
/// least-squares versus zero-estimate comparison for SBM cells.
nlohmann::json rate_report(const std::vector<TrialRecord>& records);

}  // namespace bcls

#endif
