#ifndef BCLS_ADAPT_HPP
#define BCLS_ADAPT_HPP

#include <cstdint>
#include <vector>

#include "bcls/core_model.hpp"
#include "bcls/estimator.hpp"

namespace bcls {

/// Two-fold split of the surrogate data. y_delta = 2 X E T / p and
/// y_delta_c = 2 X E (1 - T) / p, with T ~ Bernoulli(1/2) per entry.
struct SplitData {
    Matrix y_delta;
    Matrix y_delta_c;
    Mask delta_mask;
    bool symmetric = false;

    /// The same split seen from the other fold.
    SplitData swapped() const;
    /// Entries scored by the validation loss: the complement of delta_mask,
    /// without the diagonal when symmetric.
    Mask validation_mask() const;
};

struct KGrid {
    std::vector<int> k1_values;
    std::vector<int> k2_values;

    /// {1..kmax1} x {1..kmax2}.
    static KGrid range(int kmax1, int kmax2);
    /// k in {1, ..., min(n, ceil(2 sqrt(n)))} per side.
    static KGrid default_for(std::size_t n1, std::size_t n2);
    void validate(std::size_t n1, std::size_t n2) const;
};

struct GridLoss {
    int k1 = 1;
    int k2 = 1;
    double loss = 0.0;
};

struct Selection {
    int k1 = 1;
    int k2 = 1;
    /// One entry per grid point in scan order; symmetric grids use the diagonal only.
    std::vector<GridLoss> losses;
};

/// Fits y_delta at every grid point and returns the one with the smallest
/// validation loss ||theta_hat - y_delta_c||^2 over the validation mask.
/// Ties go to the lexicographically smallest (k1, k2). Symmetric fits scan
/// k1_values with k2 = k1.
Selection select_k(const SplitData& split, const KGrid& grid, double M, const FitConfig& config,
                   bool symmetric);

SplitData split_data(const ObservedMatrix& x, double p, std::uint64_t seed);

struct AdaptConfig {
    /// Final fits; its seed also drives the split.
    FitConfig fit;
    /// Restarts used inside the selection loop.
    int select_restarts = 8;
};

struct AdaptResult {
    Matrix theta_hat;
    /// Selection made for the fit on y_delta (validated on the other fold).
    Selection delta;
    /// Selection made for the fit on y_delta_c.
    Selection delta_c;
    Mask delta_mask;
};

/// Cross-fitted estimator: entries in the delta fold take the fit trained on
/// the complement fold, and vice versa.
AdaptResult adaptive_fit(const ObservedMatrix& x, double p, double M, const KGrid& grid,
                         const AdaptConfig& config);

/// Observed fraction: all entries, or unordered off-diagonal pairs when symmetric.
double estimate_p(const Mask& mask, bool symmetric);

/// Known-p pipeline run with p replaced by estimate_p.
FitResult fit_unknown_p(const ObservedMatrix& x, const ModelSpec& spec, const FitConfig& config);

}  // namespace bcls

#endif
