#include "bcls/core_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace bcls {

ObservedMatrix::ObservedMatrix(Matrix values, Mask mask, bool symmetric)
    : values_(std::move(values)), mask_(std::move(mask)), symmetric_(symmetric) {
    if (!values_.same_shape(mask_)) {
        throw std::invalid_argument("values and mask have different shapes");
    }
    if (symmetric_) {
        if (values_.rows() != values_.cols()) {
            throw std::invalid_argument("symmetric data must be square");
        }
        const std::size_t n = values_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            mask_(i, i) = 0;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (mask_(i, j) != mask_(j, i)) {
                    throw std::invalid_argument("symmetric mask is not symmetric");
                }
                if (mask_(i, j) && values_(i, j) != values_(j, i)) {
                    throw std::invalid_argument("symmetric values are not symmetric");
                }
            }
        }
    }
    auto v = values_.flat();
    auto m = mask_.flat();
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (!m[t]) v[t] = 0.0;
    }
}

void BiclusterAssignment::validate() const {
    if (k1 < 1 || k2 < 1) throw std::invalid_argument("cluster counts must be positive");
    for (int a : z1) {
        if (a < 0 || a >= k1) throw std::invalid_argument("row label out of range");
    }
    for (int b : z2) {
        if (b < 0 || b >= k2) throw std::invalid_argument("column label out of range");
    }
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::asymmetric: return "asymmetric";
        case ModelKind::symmetric: return "symmetric";
        case ModelKind::sbm: return "sbm";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "asymmetric") return ModelKind::asymmetric;
    if (name == "symmetric") return ModelKind::symmetric;
    if (name == "sbm") return ModelKind::sbm;
    throw std::invalid_argument("unknown model kind '" + name + "'");
}

ModelSpec ModelSpec::asymmetric(std::size_t n1, std::size_t n2, int k1, int k2, double M) {
    ModelSpec s{ModelKind::asymmetric, n1, n2, k1, k2, M};
    s.validate();
    return s;
}

ModelSpec ModelSpec::symmetric(std::size_t n, int k, double M) {
    ModelSpec s{ModelKind::symmetric, n, n, k, k, M};
    s.validate();
    return s;
}

ModelSpec ModelSpec::sbm(std::size_t n, int k, double rho) {
    ModelSpec s{ModelKind::sbm, n, n, k, k, rho};
    s.validate();
    return s;
}

void ModelSpec::validate() const {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("matrix dimensions must be positive");
    if (k1 < 1 || static_cast<std::size_t>(k1) > n1) {
        throw std::invalid_argument("k1 must lie in [1, n1]");
    }
    if (k2 < 1 || static_cast<std::size_t>(k2) > n2) {
        throw std::invalid_argument("k2 must lie in [1, n2]");
    }
    if (is_symmetric() && (n1 != n2 || k1 != k2)) {
        throw std::invalid_argument("symmetric spec needs n1 == n2 and k1 == k2");
    }
    if (kind == ModelKind::sbm) {
        // rho = 0 is the degenerate empty graph; kept so that theta == 0 is representable.
        if (!(bound >= 0.0 && bound <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    } else if (!(bound > 0.0)) {
        throw std::invalid_argument("M must be positive");
    }
}

Matrix materialize_theta(const BiclusterAssignment& assignment, const BlockValueMatrix& q,
                         const ModelSpec& spec) {
    if (assignment.z1.size() != spec.n1 || assignment.z2.size() != spec.n2) {
        throw std::invalid_argument("label vector length does not match the spec");
    }
    if (q.q.rows() != static_cast<std::size_t>(assignment.k1) ||
        q.q.cols() != static_cast<std::size_t>(assignment.k2)) {
        throw std::invalid_argument("block matrix shape does not match the cluster counts");
    }
    if (assignment.k1 != spec.k1 || assignment.k2 != spec.k2) {
        throw std::invalid_argument("cluster counts do not match the spec");
    }
    assignment.validate();
    Matrix theta(spec.n1, spec.n2);
    for (std::size_t i = 0; i < spec.n1; ++i) {
        for (std::size_t j = 0; j < spec.n2; ++j) {
            theta(i, j) = q.q(assignment.z1[i], assignment.z2[j]);
        }
    }
    if (spec.is_symmetric()) {
        for (std::size_t i = 0; i < spec.n1; ++i) {
            theta(i, i) = 0.0;
            for (std::size_t j = i + 1; j < spec.n2; ++j) theta(j, i) = theta(i, j);
        }
    }
    return theta;
}

double restricted_sq_norm(const Matrix& a, const Mask& mask) {
    if (!a.same_shape(mask)) throw std::invalid_argument("matrix and mask shapes differ");
    double sum = 0.0;
    auto v = a.flat();
    auto m = mask.flat();
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (m[t]) sum += v[t] * v[t];
    }
    return sum;
}

double restricted_inner(const Matrix& a, const Matrix& b, const Mask& mask) {
    if (!a.same_shape(b) || !a.same_shape(mask)) {
        throw std::invalid_argument("matrix and mask shapes differ");
    }
    double sum = 0.0;
    auto x = a.flat();
    auto y = b.flat();
    auto m = mask.flat();
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (m[t]) sum += x[t] * y[t];
    }
    return sum;
}

Mask full_mask(std::size_t n1, std::size_t n2, bool symmetric) {
    Mask mask(n1, n2, 1);
    if (symmetric) {
        for (std::size_t i = 0; i < std::min(n1, n2); ++i) mask(i, i) = 0;
    }
    return mask;
}

Matrix difference(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("matrix shapes differ");
    Matrix out(a.rows(), a.cols());
    auto x = a.flat();
    auto y = b.flat();
    auto o = out.flat();
    for (std::size_t t = 0; t < x.size(); ++t) o[t] = x[t] - y[t];
    return out;
}

}  // namespace bcls
