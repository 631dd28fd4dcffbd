#include "bcls/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bcls/parallel.hpp"
#include "bcls/rng.hpp"

namespace bcls {

namespace {

Matrix fill_theta(const BiclusterAssignment& assignment, const Matrix& q, bool symmetric) {
    const std::size_t n1 = assignment.z1.size();
    const std::size_t n2 = assignment.z2.size();
    Matrix theta(n1, n2);
    for (std::size_t i = 0; i < n1; ++i) {
        const auto qa = q.row(assignment.z1[i]);
        auto out = theta.row(i);
        for (std::size_t j = 0; j < n2; ++j) out[j] = qa[assignment.z2[j]];
        if (symmetric) out[i] = 0.0;
    }
    return theta;
}

void check_labels(const Matrix& y, const BiclusterAssignment& assignment, bool symmetric) {
    if (assignment.z1.size() != y.rows() || assignment.z2.size() != y.cols()) {
        throw std::invalid_argument("label vectors do not match the matrix shape");
    }
    assignment.validate();
    if (symmetric && (y.rows() != y.cols() || assignment.z1 != assignment.z2)) {
        throw std::invalid_argument("symmetric fit needs a square matrix and a single label vector");
    }
}

void check_fit_input(const Matrix& y, const ModelSpec& spec) {
    spec.validate();
    if (y.rows() != spec.n1 || y.cols() != spec.n2) {
        throw std::invalid_argument("data shape does not match the spec");
    }
    if (!spec.is_symmetric()) return;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t j = i + 1; j < y.cols(); ++j) {
            if (y(i, j) != y(j, i)) throw std::invalid_argument("symmetric fit needs symmetric data");
        }
    }
}

/// Index of the smallest cost(a) = sum_b count[b] q[a][b]^2 - 2 q[a][b] sums[b].
int best_label(const Matrix& q, std::span<const double> sums, std::span<const double> counts) {
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q.rows(); ++a) {
        const auto qa = q.row(a);
        double cost = 0.0;
        for (std::size_t b = 0; b < qa.size(); ++b) {
            cost += counts[b] * qa[b] * qa[b] - 2.0 * qa[b] * sums[b];
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = static_cast<int>(a);
        }
    }
    return best;
}

std::vector<int> random_labels(std::size_t n, int k, Rng& rng) {
    std::vector<int> z(n);
    for (auto& label : z) label = static_cast<int>(rng.below(k));
    return z;
}

struct RestartOutcome {
    LabelFit fit;
    BiclusterAssignment assignment;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

RestartOutcome run_restart(const Matrix& y, const ModelSpec& spec, const FitConfig& config,
                           std::uint64_t seed) {
    const bool symmetric = spec.is_symmetric();
    Rng rng(seed);
    BiclusterAssignment z;
    if (symmetric) {
        z = BiclusterAssignment::symmetric(random_labels(spec.n1, spec.k1, rng), spec.k1);
    } else {
        auto z1 = random_labels(spec.n1, spec.k1, rng);
        auto z2 = random_labels(spec.n2, spec.k2, rng);
        z = {std::move(z1), std::move(z2), spec.k1, spec.k2};
    }

    RestartOutcome out;
    for (int iter = 1;; ++iter) {
        LabelFit current = fit_given_labels(y, z, spec.bound, symmetric);
        const double objective = ls_objective(y, current.theta, symmetric);
        const bool converged = !out.trace.empty() && out.trace.back() - objective < config.tol;
        out.trace.push_back(objective);
        out.fit = std::move(current);
        out.assignment = z;
        out.objective = objective;
        out.iterations = iter;
        if (converged || iter >= config.max_iters) break;

        BiclusterAssignment next;
        if (symmetric) {
            next = refine_labels(y, out.fit.q, z, Side::rows, true);
        } else {
            next = refine_labels(y, out.fit.q, z, Side::rows, false);
            next = refine_labels(y, out.fit.q, next, Side::columns, false);
        }
        if (next == z) break;
        z = std::move(next);
    }
    return out;
}

/// Advances an odometer over [k]^n, last position fastest. Returns false on wrap.
bool next_labeling(std::vector<int>& z, int k) {
    for (std::size_t t = z.size(); t-- > 0;) {
        if (++z[t] < k) return true;
        z[t] = 0;
    }
    return false;
}

}  // namespace

void FitConfig::validate() const {
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
}

Matrix surrogate(const ObservedMatrix& x, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("observation rate must lie in (0, 1]");
    Matrix y(x.rows(), x.cols());
    auto v = x.values().flat();
    auto m = x.mask().flat();
    auto out = y.flat();
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = m[t] ? v[t] / p : 0.0;
    return y;
}

BlockStats block_means(const Matrix& y, const BiclusterAssignment& assignment, bool symmetric) {
    check_labels(y, assignment, symmetric);
    const auto& z1 = assignment.z1;
    const auto& z2 = assignment.z2;
    BlockStats stats{Matrix(assignment.k1, assignment.k2), Grid<long long>(assignment.k1, assignment.k2)};

    // Row-cluster by column sums, then fold columns into column clusters.
    std::vector<double> row_sums(assignment.k2);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        std::fill(row_sums.begin(), row_sums.end(), 0.0);
        const auto yi = y.row(i);
        for (std::size_t j = 0; j < yi.size(); ++j) {
            if (symmetric && i == j) continue;
            row_sums[z2[j]] += yi[j];
        }
        auto dst = stats.means.row(z1[i]);
        for (int b = 0; b < assignment.k2; ++b) dst[b] += row_sums[b];
    }

    if (symmetric) {
        // Both orientations hold the same sum in exact arithmetic; pin them bitwise equal.
        for (int a = 0; a < assignment.k1; ++a) {
            for (int b = a + 1; b < assignment.k2; ++b) {
                const double s = 0.5 * (stats.means(a, b) + stats.means(b, a));
                stats.means(a, b) = s;
                stats.means(b, a) = s;
            }
        }
    }

    std::vector<long long> size1(assignment.k1), size2(assignment.k2);
    for (int a : z1) ++size1[a];
    for (int b : z2) ++size2[b];
    for (int a = 0; a < assignment.k1; ++a) {
        for (int b = 0; b < assignment.k2; ++b) {
            long long count = size1[a] * size2[b];
            if (symmetric && a == b) count -= size1[a];
            stats.counts(a, b) = count;
            stats.means(a, b) = count > 0 ? stats.means(a, b) / static_cast<double>(count) : 0.0;
        }
    }
    return stats;
}

BlockValueMatrix clip_block_values(const Matrix& means, double bound) {
    if (!(bound >= 0.0)) throw std::invalid_argument("bound must be nonnegative");
    Matrix q(means.rows(), means.cols());
    auto src = means.flat();
    auto dst = q.flat();
    for (std::size_t t = 0; t < dst.size(); ++t) {
        const double m = src[t];
        const double magnitude = std::min(std::abs(m), bound);
        dst[t] = m > 0.0 ? magnitude : (m < 0.0 ? -magnitude : 0.0);
    }
    return {std::move(q), bound};
}

double ls_objective(const Matrix& y, const Matrix& theta, bool symmetric) {
    if (!y.same_shape(theta)) throw std::invalid_argument("matrix shapes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const auto yi = y.row(i);
        const auto ti = theta.row(i);
        for (std::size_t j = 0; j < yi.size(); ++j) {
            if (symmetric && i == j) continue;
            const double d = yi[j] - ti[j];
            sum += d * d;
        }
    }
    return sum;
}

LabelFit fit_given_labels(const Matrix& y, const BiclusterAssignment& assignment, double bound,
                          bool symmetric) {
    auto stats = block_means(y, assignment, symmetric);
    auto q = clip_block_values(stats.means, bound);
    auto theta = fill_theta(assignment, q.q, symmetric);
    return {std::move(q), std::move(theta)};
}

BiclusterAssignment refine_labels(const Matrix& y, const BlockValueMatrix& q,
                                  const BiclusterAssignment& assignment, Side side,
                                  bool symmetric) {
    check_labels(y, assignment, symmetric);
    if (q.q.rows() != static_cast<std::size_t>(assignment.k1) ||
        q.q.cols() != static_cast<std::size_t>(assignment.k2)) {
        throw std::invalid_argument("block matrix shape does not match the cluster counts");
    }
    BiclusterAssignment out = assignment;

    if (symmetric) {
        const std::size_t n = y.rows();
        const int k = assignment.k1;
        auto& z = out.z1;
        std::vector<double> sizes(k, 0.0), sums(k), counts(k);
        for (int a : z) sizes[a] += 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(sums.begin(), sums.end(), 0.0);
            const auto yi = y.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) sums[z[j]] += yi[j];
            }
            counts = sizes;
            counts[z[i]] -= 1.0;
            const int label = best_label(q.q, sums, counts);
            sizes[z[i]] -= 1.0;
            sizes[label] += 1.0;
            z[i] = label;
        }
        out.z2 = out.z1;
        return out;
    }

    if (side == Side::rows) {
        std::vector<double> counts(assignment.k2, 0.0), sums(assignment.k2);
        for (int b : assignment.z2) counts[b] += 1.0;
        for (std::size_t i = 0; i < y.rows(); ++i) {
            std::fill(sums.begin(), sums.end(), 0.0);
            const auto yi = y.row(i);
            for (std::size_t j = 0; j < yi.size(); ++j) sums[assignment.z2[j]] += yi[j];
            out.z1[i] = best_label(q.q, sums, counts);
        }
        return out;
    }

    // Columns: the same rule on the transposed problem.
    Matrix qt(q.q.cols(), q.q.rows());
    for (std::size_t a = 0; a < q.q.rows(); ++a) {
        for (std::size_t b = 0; b < q.q.cols(); ++b) qt(b, a) = q.q(a, b);
    }
    std::vector<double> counts(assignment.k1, 0.0);
    for (int a : assignment.z1) counts[a] += 1.0;
    Matrix col_sums(y.cols(), assignment.k1);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const auto yi = y.row(i);
        const int a = assignment.z1[i];
        for (std::size_t j = 0; j < yi.size(); ++j) col_sums(j, a) += yi[j];
    }
    for (std::size_t j = 0; j < y.cols(); ++j) {
        out.z2[j] = best_label(qt, col_sums.row(j), counts);
    }
    return out;
}

FitResult alternating_fit(const Matrix& y, const ModelSpec& spec, const FitConfig& config) {
    check_fit_input(y, spec);
    config.validate();

    std::vector<RestartOutcome> outcomes(config.restarts);
    parallel_for(outcomes.size(), [&](std::size_t r) {
        outcomes[r] = run_restart(y, spec, config, config.seed + r);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r) {
        if (outcomes[r].objective < outcomes[best].objective) best = r;
    }

    FitResult result;
    result.restarts_used = config.restarts;
    result.best_restart = static_cast<int>(best);
    for (auto& o : outcomes) result.traces.push_back(std::move(o.trace));
    auto& winner = outcomes[best];
    result.theta_hat = std::move(winner.fit.theta);
    result.q_hat = std::move(winner.fit.q);
    result.assignment = std::move(winner.assignment);
    result.objective = winner.objective;
    result.iterations = winner.iterations;
    return result;
}

FitResult exact_fit(const Matrix& y, const ModelSpec& spec, double budget) {
    check_fit_input(y, spec);
    const bool symmetric = spec.is_symmetric();
    double labelings = std::pow(static_cast<double>(spec.k1), static_cast<double>(spec.n1));
    if (!symmetric) labelings *= std::pow(static_cast<double>(spec.k2), static_cast<double>(spec.n2));
    if (labelings > budget) {
        throw ResourceLimitError("exact search needs " + std::to_string(labelings) +
                                 " labelings, over the budget of " + std::to_string(budget));
    }

    FitResult result;
    result.objective = std::numeric_limits<double>::infinity();
    result.restarts_used = 1;
    auto consider = [&](const BiclusterAssignment& z) {
        LabelFit f = fit_given_labels(y, z, spec.bound, symmetric);
        const double objective = ls_objective(y, f.theta, symmetric);
        ++result.iterations;
        if (objective < result.objective) {
            result.objective = objective;
            result.theta_hat = std::move(f.theta);
            result.q_hat = std::move(f.q);
            result.assignment = z;
        }
    };

    if (symmetric) {
        BiclusterAssignment z = BiclusterAssignment::symmetric(std::vector<int>(spec.n1, 0), spec.k1);
        do {
            z.z2 = z.z1;
            consider(z);
        } while (next_labeling(z.z1, spec.k1));
        return result;
    }

    BiclusterAssignment z{std::vector<int>(spec.n1, 0), std::vector<int>(spec.n2, 0), spec.k1, spec.k2};
    do {
        do {
            consider(z);
        } while (next_labeling(z.z2, spec.k2));
    } while (next_labeling(z.z1, spec.k1));
    return result;
}

FitResult fit(const Matrix& y, const ModelSpec& spec, const FitConfig& config) {
    if (config.solver == Solver::exact) return exact_fit(y, spec);
    return alternating_fit(y, spec, config);
}

FitResult fit_observed(const ObservedMatrix& x, double p, const ModelSpec& spec,
                       const FitConfig& config) {
    if (x.symmetric() != spec.is_symmetric()) {
        throw std::invalid_argument("data symmetry does not match the model spec");
    }
    return fit(surrogate(x, p), spec, config);
}

}  // namespace bcls
