#include "bcls/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "bcls/parallel.hpp"
#include "bcls/rng.hpp"

namespace bcls {

namespace {

constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;

ModelSpec spec_for(const Matrix& y, int k1, int k2, double M, bool symmetric) {
    if (symmetric) return ModelSpec::symmetric(y.rows(), k1, M);
    return ModelSpec::asymmetric(y.rows(), y.cols(), k1, k2, M);
}

}  // namespace

SplitData SplitData::swapped() const {
    return {y_delta_c, y_delta, validation_mask(), symmetric};
}

Mask SplitData::validation_mask() const {
    Mask out(delta_mask.rows(), delta_mask.cols(), 0);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            if (symmetric && i == j) continue;
            out(i, j) = delta_mask(i, j) ? 0 : 1;
        }
    }
    return out;
}

KGrid KGrid::range(int kmax1, int kmax2) {
    KGrid grid;
    for (int k = 1; k <= kmax1; ++k) grid.k1_values.push_back(k);
    for (int k = 1; k <= kmax2; ++k) grid.k2_values.push_back(k);
    return grid;
}

KGrid KGrid::default_for(std::size_t n1, std::size_t n2) {
    auto cap = [](std::size_t n) {
        const auto bound = static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(n))));
        return static_cast<int>(std::min(n, bound));
    };
    return range(cap(n1), cap(n2));
}

void KGrid::validate(std::size_t n1, std::size_t n2) const {
    if (k1_values.empty() || k2_values.empty()) throw std::invalid_argument("cluster grid is empty");
    for (int k : k1_values) {
        if (k < 1 || static_cast<std::size_t>(k) > n1) throw std::invalid_argument("k1 grid value out of range");
    }
    for (int k : k2_values) {
        if (k < 1 || static_cast<std::size_t>(k) > n2) throw std::invalid_argument("k2 grid value out of range");
    }
}

SplitData split_data(const ObservedMatrix& x, double p, std::uint64_t seed) {
    const Matrix y = surrogate(x, p);
    const bool symmetric = x.symmetric();
    Rng rng(seed);
    Mask t(x.rows(), x.cols(), 0);
    if (symmetric) {
        for (std::size_t i = 0; i < t.rows(); ++i) {
            for (std::size_t j = i + 1; j < t.cols(); ++j) {
                const std::uint8_t v = rng.bernoulli(0.5) ? 1 : 0;
                t(i, j) = v;
                t(j, i) = v;
            }
        }
    } else {
        for (auto& v : t.flat()) v = rng.bernoulli(0.5) ? 1 : 0;
    }

    SplitData split{Matrix(y.rows(), y.cols()), Matrix(y.rows(), y.cols()), std::move(t), symmetric};
    auto src = y.flat();
    auto in = split.y_delta.flat();
    auto out = split.y_delta_c.flat();
    auto mask = split.delta_mask.flat();
    for (std::size_t k = 0; k < src.size(); ++k) {
        (mask[k] ? in[k] : out[k]) = 2.0 * src[k];
    }
    return split;
}

Selection select_k(const SplitData& split, const KGrid& grid, double M, const FitConfig& config,
                   bool symmetric) {
    const Matrix& train = split.y_delta;
    grid.validate(train.rows(), train.cols());

    std::vector<GridLoss> points;
    for (int k1 : grid.k1_values) {
        if (symmetric) {
            points.push_back({k1, k1, 0.0});
            continue;
        }
        for (int k2 : grid.k2_values) points.push_back({k1, k2, 0.0});
    }

    const Mask validation = split.validation_mask();
    const auto cells = validation.flat();
    const bool empty_validation = std::count(cells.begin(), cells.end(), std::uint8_t{1}) == 0;

    parallel_for(points.size(), [&](std::size_t t) {
        auto& point = points[t];
        const FitResult f = alternating_fit(train, spec_for(train, point.k1, point.k2, M, symmetric), config);
        point.loss = restricted_sq_norm(difference(f.theta_hat, split.y_delta_c), validation);
    });

    Selection selection;
    selection.losses = points;
    if (empty_validation) {
        // Nothing to validate against: fall back to the smallest model on the grid.
        const GridLoss* smallest = &points.front();
        for (const auto& p : points) {
            if (std::pair(p.k1, p.k2) < std::pair(smallest->k1, smallest->k2)) smallest = &p;
        }
        selection.k1 = smallest->k1;
        selection.k2 = smallest->k2;
        return selection;
    }

    const GridLoss* best = nullptr;
    for (const auto& p : points) {
        if (best == nullptr || p.loss < best->loss ||
            (p.loss == best->loss && std::pair(p.k1, p.k2) < std::pair(best->k1, best->k2))) {
            best = &p;
        }
    }
    selection.k1 = best->k1;
    selection.k2 = best->k2;
    return selection;
}

AdaptResult adaptive_fit(const ObservedMatrix& x, double p, double M, const KGrid& grid,
                         const AdaptConfig& config) {
    config.fit.validate();
    if (config.select_restarts < 1) throw std::invalid_argument("select_restarts must be at least 1");
    const bool symmetric = x.symmetric();
    const SplitData split = split_data(x, p, derive_seed(config.fit.seed, kSplitStream));
    const SplitData other = split.swapped();

    FitConfig select_config = config.fit;
    select_config.restarts = config.select_restarts;
    select_config.solver = Solver::alternating;

    AdaptResult result;
    result.delta = select_k(split, grid, M, select_config, symmetric);
    result.delta_c = select_k(other, grid, M, select_config, symmetric);

    FitConfig final_config = config.fit;
    final_config.solver = Solver::alternating;
    const FitResult on_delta = alternating_fit(
        split.y_delta, spec_for(split.y_delta, result.delta.k1, result.delta.k2, M, symmetric), final_config);
    const FitResult on_delta_c = alternating_fit(
        other.y_delta, spec_for(other.y_delta, result.delta_c.k1, result.delta_c.k2, M, symmetric),
        final_config);

    result.theta_hat = Matrix(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            result.theta_hat(i, j) = split.delta_mask(i, j) ? on_delta_c.theta_hat(i, j)
                                                            : on_delta.theta_hat(i, j);
        }
    }
    result.delta_mask = split.delta_mask;
    return result;
}

double estimate_p(const Mask& mask, bool symmetric) {
    if (symmetric) {
        const std::size_t n = mask.rows();
        if (mask.cols() != n) throw std::invalid_argument("symmetric mask must be square");
        if (n < 2) throw std::invalid_argument("need at least two nodes to estimate p");
        std::size_t observed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) observed += mask(i, j) ? 1 : 0;
        }
        return static_cast<double>(observed) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
    }
    if (mask.size() == 0) throw std::invalid_argument("empty mask");
    std::size_t observed = 0;
    for (auto e : mask.flat()) observed += e ? 1 : 0;
    return static_cast<double>(observed) / static_cast<double>(mask.size());
}

FitResult fit_unknown_p(const ObservedMatrix& x, const ModelSpec& spec, const FitConfig& config) {
    const double p_hat = estimate_p(x.mask(), x.symmetric());
    if (p_hat == 0.0) throw std::invalid_argument("no observed entries");
    return fit_observed(x, p_hat, spec, config);
}

}  // namespace bcls
