#ifndef NODALFORMS_LINALG_HPP
#define NODALFORMS_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace nodalforms {

using Vector = std::vector<double>;

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

    Vector operator*(std::span<const double> x) const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix transpose() const;

    /// Maximum absolute row sum.
    double norm_inf() const;
    double max_abs() const;
    double frobenius() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric matrix. The upper triangle is authoritative: construction checks
/// that the input is finite and symmetric to within 1e-12 of its largest entry,
/// then mirrors the upper triangle into the lower one.
class DenseSymMatrix {
public:
    static constexpr double kSymmetryTolerance = 1e-12;

    explicit DenseSymMatrix(Matrix entries);

    std::size_t dim() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }

    Vector operator*(std::span<const double> x) const { return m_ * x; }
    double norm_inf() const { return m_.norm_inf(); }
    double frobenius() const { return m_.frobenius(); }

private:
    Matrix m_;
};

/// Ascending eigenvalues; column j of `vectors` is a unit eigenvector of values[j].
struct EigenDecomposition {
    Vector values;
    Matrix vectors;
    int sweeps = 0;
};

inline constexpr double kDefaultEigTol = 1e-12;
inline constexpr int kMaxJacobiSweeps = 100;

/// Cyclic-by-row Jacobi eigensolver. Sweeps until the off-diagonal Frobenius
/// norm is at most eig_tol * ||S||_F. Sorting is stable, so vectors inside a
/// degenerate cluster keep the order the rotations produced.
EigenDecomposition jacobi_eigh(const DenseSymMatrix& s, double eig_tol = kDefaultEigTol);

/// Lower-triangular Cholesky factor S = L L^T, reusable for many right-hand sides.
class Cholesky {
public:
    explicit Cholesky(const DenseSymMatrix& s);

    std::size_t dim() const noexcept { return lower_.rows(); }
    Vector solve(std::span<const double> rhs) const;
    const Matrix& lower() const noexcept { return lower_; }

private:
    Matrix lower_;
};

Vector solve_spd(const DenseSymMatrix& s, std::span<const double> rhs);

double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);

} // namespace nodalforms

#endif
