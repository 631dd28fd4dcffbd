#include "bcls/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcls/simulate.hpp"

namespace bcls {

namespace {

constexpr std::uint64_t kLatentStream = 1;
constexpr std::uint64_t kEdgeStream = 2;

double mse_impl(const Matrix& f_hat, const GraphonSpec& g, std::span<const double> xi,
                bool diagonal) {
    const std::size_t n = xi.size();
    if (f_hat.rows() != n || f_hat.cols() != n) {
        throw std::invalid_argument("estimate shape does not match the latent positions");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!diagonal && i == j) continue;
            const double d = f_hat(i, j) - g(xi[i], xi[j]);
            sum += d * d;
        }
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace

std::string to_string(GraphonShape shape) {
    switch (shape) {
        case GraphonShape::constant: return "constant";
        case GraphonShape::bilinear: return "bilinear";
        case GraphonShape::smooth: return "smooth";
        case GraphonShape::holder: return "holder";
    }
    return "unknown";
}

GraphonShape graphon_shape_from_string(const std::string& name) {
    if (name == "constant") return GraphonShape::constant;
    if (name == "bilinear") return GraphonShape::bilinear;
    if (name == "smooth") return GraphonShape::smooth;
    if (name == "holder") return GraphonShape::holder;
    throw std::invalid_argument("unknown graphon '" + name + "'");
}

double GraphonSpec::operator()(double x, double y) const {
    switch (shape) {
        case GraphonShape::constant: return rho;
        case GraphonShape::bilinear: return rho * x * y;
        case GraphonShape::smooth: return rho * (x * x + y * y) / 2.0;
        case GraphonShape::holder: return rho * std::pow(std::abs(x - y), alpha);
    }
    return 0.0;
}

void GraphonSpec::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
    if (shape == GraphonShape::holder && alpha >= 1.0) {
        throw std::invalid_argument("the holder graphon needs alpha < 1");
    }
}

GraphonSample sample_graphon_network(const GraphonSpec& g, std::size_t n, std::uint64_t seed,
                                     const LatentSampler& latent) {
    g.validate();
    if (n < 2) throw std::invalid_argument("a network needs at least two nodes");
    Rng rng(derive_seed(seed, kLatentStream));
    std::vector<double> xi(n);
    for (auto& v : xi) v = latent ? latent(rng) : rng.uniform01();

    Matrix theta(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = g(xi[i], xi[j]);
            theta(i, j) = v;
            theta(j, i) = v;
        }
    }
    ObservedMatrix x = gen_bernoulli(theta, full_mask(n, n, true), true, derive_seed(seed, kEdgeStream));
    return {std::move(xi), std::move(theta), std::move(x)};
}

int graphon_bandwidth(std::size_t n, double alpha) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const double exponent = 1.0 / (1.0 + std::min(alpha, 1.0));
    const double raw = std::pow(static_cast<double>(n), exponent);
    // Snap values within rounding of an integer so that e.g. 64^(2/3) gives 16.
    const double nearest = std::round(raw);
    const double k = std::abs(raw - nearest) < 1e-9 * nearest ? nearest : std::ceil(raw);
    return static_cast<int>(k);
}

Matrix estimate_graphon(const ObservedMatrix& x, double alpha, double rho, const FitConfig& config,
                        bool normalize) {
    if (!x.symmetric()) throw std::invalid_argument("graphon estimation needs a symmetric network");
    const std::size_t n = x.rows();
    const int k = std::min<int>(graphon_bandwidth(n, alpha), static_cast<int>(n));
    const ModelSpec spec = ModelSpec::symmetric(n, k, rho);
    Matrix f_hat = alternating_fit(x.values(), spec, config).theta_hat;
    if (normalize) {
        for (auto& v : f_hat.flat()) v /= rho;
    }
    return f_hat;
}

double graphon_mse(const Matrix& f_hat, const GraphonSpec& g, std::span<const double> xi) {
    return mse_impl(f_hat, g, xi, true);
}

double graphon_mse_offdiag(const Matrix& f_hat, const GraphonSpec& g, std::span<const double> xi) {
    return mse_impl(f_hat, g, xi, false);
}

}  // namespace bcls
