#ifndef BCLS_SIMULATE_HPP
#define BCLS_SIMULATE_HPP

#include <cstdint>
#include <utility>

#include "bcls/core_model.hpp"

namespace bcls {

struct NoiseSpec {
    enum class Kind { gaussian, bernoulli };
    Kind kind = Kind::gaussian;
    double sigma = 1.0;
};

/// MCAR observation pattern: each entry (each unordered off-diagonal pair
/// when symmetric) is observed with probability p.
Mask gen_mask(std::size_t n1, std::size_t n2, double p, bool symmetric, std::uint64_t seed);

/// X = theta + N(0, sigma^2) on observed entries. Noise is drawn for every
/// entry (upper triangle, mirrored, when symmetric) so the draw for a cell
/// does not depend on the mask.
ObservedMatrix gen_gaussian(const Matrix& theta, double sigma, const Mask& mask, bool symmetric,
                            std::uint64_t seed);

/// Independent Bernoulli(theta[i][j]) entries; symmetric draws use i > j and mirror.
ObservedMatrix gen_bernoulli(const Matrix& theta, const Mask& mask, bool symmetric,
                             std::uint64_t seed);

/// Uniform labels (redrawn until every cluster is used) and uniform block
/// values on [-M, M], or [0, rho] for sbm.
std::pair<BiclusterAssignment, BlockValueMatrix> gen_random_model(const ModelSpec& spec,
                                                                  std::uint64_t seed);

/// Random labels as above, with a fixed well-separated block matrix:
/// +gap/2 on the block diagonal and -gap/2 elsewhere (rho and rho/2 for sbm).
std::pair<BiclusterAssignment, BlockValueMatrix> gen_planted_model(const ModelSpec& spec,
                                                                   double gap,
                                                                   std::uint64_t seed);

}  // namespace bcls

#endif
