#include "nodalforms/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nodalforms/errors.hpp"

namespace nodalforms {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Vector Matrix::column(std::size_t j) const
{
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = (*this)(i, j);
    }
    return out;
}

void Matrix::set_column(std::size_t j, std::span<const double> values)
{
    if (values.size() != rows_) {
        throw DimensionError("set_column: length mismatch");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        (*this)(i, j) = values[i];
    }
}

Vector Matrix::operator*(std::span<const double> x) const
{
    if (x.size() != cols_) {
        throw DimensionError("matrix-vector product: length mismatch");
    }
    Vector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = dot(row(i), x);
    }
    return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const
{
    if (cols_ != rhs.rows_) {
        throw DimensionError("matrix product: inner dimensions differ");
    }
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) {
                continue;
            }
            auto src = rhs.row(k);
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                dst[j] += a * src[j];
            }
        }
    }
    return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw DimensionError("matrix sum: shapes differ");
    }
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        out.data_[k] += rhs.data_[k];
    }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw DimensionError("matrix difference: shapes differ");
    }
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        out.data_[k] -= rhs.data_[k];
    }
    return out;
}

Matrix Matrix::transpose() const
{
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out(j, i) = (*this)(i, j);
        }
    }
    return out;
}

double Matrix::norm_inf() const
{
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (double v : row(i)) {
            s += std::abs(v);
        }
        best = std::max(best, s);
    }
    return best;
}

double Matrix::max_abs() const
{
    return nodalforms::max_abs(data_);
}

double Matrix::frobenius() const
{
    double s = 0.0;
    for (double v : data_) {
        s += v * v;
    }
    return std::sqrt(s);
}

DenseSymMatrix::DenseSymMatrix(Matrix entries) : m_(std::move(entries))
{
    const std::size_t n = m_.rows();
    if (n == 0 || m_.cols() != n) {
        throw InvalidMatrix("symmetric matrix must be square with dim >= 1");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m_(i, j);
            if (!std::isfinite(v)) {
                throw InvalidMatrix("non-finite entry at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
            }
            scale = std::max(scale, std::abs(v));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m_(i, j) - m_(j, i)) > kSymmetryTolerance * scale) {
                throw InvalidMatrix("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
            }
            m_(j, i) = m_(i, j);
        }
    }
}

EigenDecomposition jacobi_eigh(const DenseSymMatrix& s, double eig_tol)
{
    if (!(eig_tol > 0.0)) {
        throw PreconditionError("jacobi_eigh: eig_tol must be positive");
    }
    const std::size_t n = s.dim();
    Matrix a = s.matrix();
    // Rows of w are the accumulated eigenvectors, kept contiguous for the updates.
    Matrix w = Matrix::identity(n);
    const double target = eig_tol * s.frobenius();

    auto off_norm = [&] {
        double acc = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                acc += a(p, q) * a(p, q);
            }
        }
        return std::sqrt(2.0 * acc);
    };

    int sweeps = 0;
    while (off_norm() > target) {
        if (sweeps == kMaxJacobiSweeps) {
            throw NoConvergence("jacobi_eigh: no convergence after " +
                                std::to_string(kMaxJacobiSweeps) + " sweeps");
        }
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Past the first sweeps an entry below the rounding level of
                // both diagonal entries is dropped instead of rotated away.
                if (sweeps > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
                    std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                double* rp = a.row(p).data();
                double* rq = a.row(q).data();
                for (std::size_t k = 0; k < n; ++k) {
                    const double g = rp[k];
                    const double h = rq[k];
                    rp[k] = c * g - sn * h;
                    rq[k] = sn * g + c * h;
                }
                // Mirror rows p and q into columns p and q.
                for (std::size_t k = 0; k < n; ++k) {
                    a(k, p) = rp[k];
                    a(k, q) = rq[k];
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                double* wp = w.row(p).data();
                double* wq = w.row(q).data();
                for (std::size_t k = 0; k < n; ++k) {
                    const double g = wp[k];
                    const double h = wq[k];
                    wp[k] = c * g - sn * h;
                    wq[k] = sn * g + c * h;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    out.sweeps = sweeps;
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        out.vectors.set_column(j, w.row(order[j]));
    }
    return out;
}

Cholesky::Cholesky(const DenseSymMatrix& s) : lower_(s.dim(), s.dim())
{
    const std::size_t n = s.dim();
    for (std::size_t j = 0; j < n; ++j) {
        auto lj = lower_.row(j);
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= lj[k] * lj[k];
        }
        if (!(d > 0.0)) {
            throw NotPositiveDefinite("non-positive pivot at index " + std::to_string(j));
        }
        const double ljj = std::sqrt(d);
        lj[j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            auto li = lower_.row(i);
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                v -= li[k] * lj[k];
            }
            li[j] = v / ljj;
        }
    }
}

Vector Cholesky::solve(std::span<const double> rhs) const
{
    const std::size_t n = dim();
    if (rhs.size() != n) {
        throw DimensionError("Cholesky::solve: length mismatch");
    }
    Vector y(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        auto li = lower_.row(i);
        double v = y[i];
        for (std::size_t k = 0; k < i; ++k) {
            v -= li[k] * y[k];
        }
        y[i] = v / li[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = y[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            v -= lower_(k, i) * y[k];
        }
        y[i] = v / lower_(i, i);
    }
    return y;
}

Vector solve_spd(const DenseSymMatrix& s, std::span<const double> rhs)
{
    if (rhs.size() != s.dim()) {
        throw DimensionError("solve_spd: length mismatch");
    }
    return Cholesky(s).solve(rhs);
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DimensionError("dot: length mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace nodalforms
