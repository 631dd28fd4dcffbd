#include "bcls/simulate.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "bcls/rng.hpp"

namespace bcls {

namespace {

std::vector<int> draw_labels(std::size_t n, int k, Rng& rng) {
    if (static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("cannot fill k clusters with fewer than k items");
    }
    std::vector<int> z(n);
    std::vector<int> used(k);
    while (true) {
        std::fill(used.begin(), used.end(), 0);
        for (auto& label : z) {
            label = static_cast<int>(rng.below(k));
            used[label] = 1;
        }
        if (std::find(used.begin(), used.end(), 0) == used.end()) return z;
    }
}

BiclusterAssignment draw_assignment(const ModelSpec& spec, Rng& rng) {
    if (spec.is_symmetric()) {
        return BiclusterAssignment::symmetric(draw_labels(spec.n1, spec.k1, rng), spec.k1);
    }
    auto z1 = draw_labels(spec.n1, spec.k1, rng);
    auto z2 = draw_labels(spec.n2, spec.k2, rng);
    return {std::move(z1), std::move(z2), spec.k1, spec.k2};
}

}  // namespace

Mask gen_mask(std::size_t n1, std::size_t n2, double p, bool symmetric, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("observation rate must lie in (0, 1]");
    if (symmetric && n1 != n2) throw std::invalid_argument("symmetric mask must be square");
    Rng rng(seed);
    Mask mask(n1, n2, 0);
    if (symmetric) {
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = i + 1; j < n2; ++j) {
                const std::uint8_t e = rng.bernoulli(p) ? 1 : 0;
                mask(i, j) = e;
                mask(j, i) = e;
            }
        }
    } else {
        for (auto& e : mask.flat()) e = rng.bernoulli(p) ? 1 : 0;
    }
    return mask;
}

ObservedMatrix gen_gaussian(const Matrix& theta, double sigma, const Mask& mask, bool symmetric,
                            std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    if (!theta.same_shape(mask)) throw std::invalid_argument("theta and mask shapes differ");
    Rng rng(seed);
    Matrix x(theta.rows(), theta.cols());
    if (symmetric) {
        if (theta.rows() != theta.cols()) throw std::invalid_argument("symmetric theta must be square");
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = i + 1; j < x.cols(); ++j) {
                const double v = theta(i, j) + sigma * rng.normal();
                x(i, j) = v;
                x(j, i) = v;
            }
        }
    } else {
        auto t = theta.flat();
        auto out = x.flat();
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = t[k] + sigma * rng.normal();
    }
    return ObservedMatrix(std::move(x), mask, symmetric);
}

ObservedMatrix gen_bernoulli(const Matrix& theta, const Mask& mask, bool symmetric,
                             std::uint64_t seed) {
    if (!theta.same_shape(mask)) throw std::invalid_argument("theta and mask shapes differ");
    for (double v : theta.flat()) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("Bernoulli means must lie in [0, 1]");
    }
    Rng rng(seed);
    Matrix x(theta.rows(), theta.cols());
    if (symmetric) {
        if (theta.rows() != theta.cols()) throw std::invalid_argument("symmetric theta must be square");
        for (std::size_t i = 1; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const double v = rng.bernoulli(theta(i, j)) ? 1.0 : 0.0;
                x(i, j) = v;
                x(j, i) = v;
            }
        }
    } else {
        auto t = theta.flat();
        auto out = x.flat();
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = rng.bernoulli(t[k]) ? 1.0 : 0.0;
    }
    return ObservedMatrix(std::move(x), mask, symmetric);
}

std::pair<BiclusterAssignment, BlockValueMatrix> gen_random_model(const ModelSpec& spec,
                                                                  std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    auto assignment = draw_assignment(spec, rng);
    const double lo = spec.kind == ModelKind::sbm ? 0.0 : -spec.bound;
    Matrix q(spec.k1, spec.k2);
    if (spec.is_symmetric()) {
        for (int a = 0; a < spec.k1; ++a) {
            for (int b = a; b < spec.k2; ++b) {
                q(a, b) = rng.uniform(lo, spec.bound);
                q(b, a) = q(a, b);
            }
        }
    } else {
        for (auto& v : q.flat()) v = rng.uniform(lo, spec.bound);
    }
    return {std::move(assignment), BlockValueMatrix{std::move(q), spec.bound}};
}

std::pair<BiclusterAssignment, BlockValueMatrix> gen_planted_model(const ModelSpec& spec,
                                                                   double gap,
                                                                   std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    auto assignment = draw_assignment(spec, rng);
    double on = gap / 2.0;
    double off = -gap / 2.0;
    if (spec.kind == ModelKind::sbm) {
        on = spec.bound;
        off = spec.bound / 2.0;
    } else if (spec.k1 != spec.k2) {
        throw std::invalid_argument("planted models need k1 == k2");
    } else if (gap / 2.0 > spec.bound) {
        throw std::invalid_argument("planted gap exceeds the block value bound 2M");
    }
    Matrix q(spec.k1, spec.k2);
    for (int a = 0; a < spec.k1; ++a) {
        for (int b = 0; b < spec.k2; ++b) q(a, b) = (a == b) ? on : off;
    }
    return {std::move(assignment), BlockValueMatrix{std::move(q), spec.bound}};
}

}  // namespace bcls
