#ifndef BCLS_GRAPHON_HPP
#define BCLS_GRAPHON_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bcls/core_model.hpp"
#include "bcls/estimator.hpp"
#include "bcls/rng.hpp"

namespace bcls {

/// Built-in graphons. All are symmetric with 0 <= f <= rho on [0,1]^2.
///
///   constant  f = rho                      ||f||_H = rho for every alpha
///   bilinear  f = rho x y                  smooth; every derivative bounded by rho
///   smooth    f = rho (x^2 + y^2) / 2      smooth; every derivative bounded by rho
///   holder    f = rho |x - y|^alpha        alpha in (0,1); ||f||_H <= rho (1 + 2^(alpha/2))
///
/// Membership in F_alpha(rho, L) requires the listed norm to be at most L sqrt(rho).
enum class GraphonShape { constant, bilinear, smooth, holder };

std::string to_string(GraphonShape shape);
GraphonShape graphon_shape_from_string(const std::string& name);

struct GraphonSpec {
    GraphonShape shape = GraphonShape::smooth;
    double rho = 1.0;
    double alpha = 1.0;
    double L = 1.0;

    double operator()(double x, double y) const;
    void validate() const;
};

/// Draws one latent position; the default is Uniform[0,1].
using LatentSampler = std::function<double(Rng&)>;

struct GraphonSample {
    std::vector<double> xi;
    Matrix theta;
    ObservedMatrix x;
};

GraphonSample sample_graphon_network(const GraphonSpec& g, std::size_t n, std::uint64_t seed,
                                     const LatentSampler& latent = {});

/// ceil(n^(1 / (1 + min(alpha, 1)))).
int graphon_bandwidth(std::size_t n, double alpha);

/// Symmetric least-squares fit with k = graphon_bandwidth(n, alpha), M = rho
/// and Y = X. With `normalize` the estimate is divided by rho.
Matrix estimate_graphon(const ObservedMatrix& x, double alpha, double rho, const FitConfig& config,
                        bool normalize = false);

/// (1/n^2) sum over all (i, j), diagonal included, of (f_hat - f(xi_i, xi_j))^2.
double graphon_mse(const Matrix& f_hat, const GraphonSpec& g, std::span<const double> xi);

/// Same sum restricted to i != j, still divided by n^2.
double graphon_mse_offdiag(const Matrix& f_hat, const GraphonSpec& g, std::span<const double> xi);

}  // namespace bcls

#endif
