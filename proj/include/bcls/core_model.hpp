#ifndef BCLS_CORE_MODEL_HPP
#define BCLS_CORE_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bcls {

/// Dense row-major grid. Used for both real matrices and 0/1 masks.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool same_shape(const auto& other) const {
        return rows_ == other.rows() && cols_ == other.cols();
    }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<T> flat() { return data_; }
    std::span<const T> flat() const { return data_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = Grid<double>;
using Mask = Grid<std::uint8_t>;

/// Partially observed data. Unobserved entries always hold 0. In the
/// symmetric case the diagonal is structurally zero and never observed.
class ObservedMatrix {
public:
    /// Validates shapes and symmetry, then zeroes every unobserved entry
    /// (and the diagonal when symmetric). Throws std::invalid_argument.
    ObservedMatrix(Matrix values, Mask mask, bool symmetric);

    const Matrix& values() const { return values_; }
    const Mask& mask() const { return mask_; }
    bool symmetric() const { return symmetric_; }
    std::size_t rows() const { return values_.rows(); }
    std::size_t cols() const { return values_.cols(); }

private:
    Matrix values_;
    Mask mask_;
    bool symmetric_;
};

/// Row and column cluster labels, 0-based internally (1-based in files).
/// In the symmetric case z1 == z2 and k1 == k2.
struct BiclusterAssignment {
    std::vector<int> z1;
    std::vector<int> z2;
    int k1 = 1;
    int k2 = 1;

    static BiclusterAssignment symmetric(std::vector<int> z, int k) {
        return {z, z, k, k};
    }
    void validate() const;
    bool operator==(const BiclusterAssignment&) const = default;
};

struct BlockValueMatrix {
    Matrix q;
    double bound = 0.0;
};

enum class ModelKind { asymmetric, symmetric, sbm };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Parameter space: Theta_{k1 k2}(M), the symmetric Theta^s_k(M), or the
/// stochastic block model class Theta^+_k(rho). For sbm, `bound` is rho.
struct ModelSpec {
    ModelKind kind = ModelKind::asymmetric;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    int k1 = 1;
    int k2 = 1;
    double bound = 1.0;

    static ModelSpec asymmetric(std::size_t n1, std::size_t n2, int k1, int k2, double M);
    static ModelSpec symmetric(std::size_t n, int k, double M);
    static ModelSpec sbm(std::size_t n, int k, double rho);

    bool is_symmetric() const { return kind != ModelKind::asymmetric; }
    /// Throws std::invalid_argument when the invariants fail.
    void validate() const;
};

/// theta[i][j] = q[z1(i)][z2(j)], with a forced zero diagonal for symmetric specs.
Matrix materialize_theta(const BiclusterAssignment& assignment, const BlockValueMatrix& q,
                         const ModelSpec& spec);

/// Sum of a[i][j]^2 over the entries where mask is set.
double restricted_sq_norm(const Matrix& a, const Mask& mask);

double restricted_inner(const Matrix& a, const Matrix& b, const Mask& mask);

/// Mask of all off-diagonal entries (or every entry when not symmetric).
Mask full_mask(std::size_t n1, std::size_t n2, bool symmetric);

Matrix difference(const Matrix& a, const Matrix& b);

}  // namespace bcls

#endif
