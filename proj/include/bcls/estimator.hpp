#ifndef BCLS_ESTIMATOR_HPP
#define BCLS_ESTIMATOR_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bcls/core_model.hpp"

namespace bcls {

enum class Solver { alternating, exact };

struct FitConfig {
    int restarts = 32;
    int max_iters = 100;
    /// Stop once the objective drops by less than this between iterations.
    double tol = 1e-9;
    std::uint64_t seed = 0;
    Solver solver = Solver::alternating;

    void validate() const;
};

struct FitResult {
    Matrix theta_hat;
    BiclusterAssignment assignment;
    BlockValueMatrix q_hat;
    double objective = 0.0;
    int iterations = 0;
    int restarts_used = 0;
    int best_restart = 0;
    /// Objective after every block-value update, one sequence per restart.
    std::vector<std::vector<double>> traces;
};

/// Thrown by exact_fit when the labeling count exceeds its budget.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultExactBudget = 1e7;

/// Y = X E / p: observed values rescaled by 1/p, zero elsewhere.
Matrix surrogate(const ObservedMatrix& x, double p);

struct BlockStats {
    Matrix means;
    Grid<long long> counts;
};

/// Per-block average of y. Symmetric blocks average over ordered pairs i != j.
/// Empty blocks report mean 0 and count 0.
BlockStats block_means(const Matrix& y, const BiclusterAssignment& assignment, bool symmetric);

/// Entrywise sign(m) * min(|m|, bound).
BlockValueMatrix clip_block_values(const Matrix& means, double bound);

/// ||y - theta||^2, over off-diagonal entries only when symmetric.
double ls_objective(const Matrix& y, const Matrix& theta, bool symmetric = false);

struct LabelFit {
    BlockValueMatrix q;
    Matrix theta;
};

/// Optimal block values for fixed labels: clipped block means.
LabelFit fit_given_labels(const Matrix& y, const BiclusterAssignment& assignment, double bound,
                          bool symmetric);

enum class Side { rows, columns };

/// One pass of per-index label reassignment against fixed block values.
/// Ties go to the smallest label. The symmetric case updates the single
/// label vector in place, index by index.
BiclusterAssignment refine_labels(const Matrix& y, const BlockValueMatrix& q,
                                  const BiclusterAssignment& assignment, Side side,
                                  bool symmetric);

/// Multi-restart alternating minimization. Restart r is seeded with seed + r;
/// the lowest objective wins, ties to the lowest restart index.
FitResult alternating_fit(const Matrix& y, const ModelSpec& spec, const FitConfig& config);

/// Exhaustive search over every labeling (non-surjective ones included).
/// Ties go to the lexicographically smallest (z1, z2).
FitResult exact_fit(const Matrix& y, const ModelSpec& spec,
                    double budget = kDefaultExactBudget);

/// Dispatches to alternating_fit or exact_fit per config.solver.
FitResult fit(const Matrix& y, const ModelSpec& spec, const FitConfig& config);

/// Known-p pipeline: surrogate followed by fit.
FitResult fit_observed(const ObservedMatrix& x, double p, const ModelSpec& spec,
                       const FitConfig& config);

}  // namespace bcls

#endif
