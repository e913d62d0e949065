#include "nodalforms/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nodalforms/errors.hpp"

namespace nodalforms {

std::vector<Cluster> cluster_spectrum(std::span<const double> values, double cluster_tol)
{
    if (!(cluster_tol > 0.0)) {
        throw PreconditionError("cluster_tol must be positive");
    }
    std::vector<Cluster> clusters;
    if (values.empty()) {
        return clusters;
    }
    std::vector<bool> ambiguous_gap(values.size(), false); // gap before index i
    clusters.push_back({0, 1, 0.0, false});
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double gap = values[i] - values[i - 1];
        const double threshold = cluster_tol * (1.0 + std::abs(values[i - 1]));
        if (gap > threshold / kAmbiguityBand && gap <= threshold * kAmbiguityBand) {
            ambiguous_gap[i] = true;
        }
        if (gap > threshold) {
            clusters.push_back({i, 1, 0.0, false});
        } else {
            ++clusters.back().count;
        }
    }
    for (auto& c : clusters) {
        double sum = 0.0;
        for (std::size_t i = c.start; i < c.start + c.count; ++i) {
            sum += values[i];
        }
        c.value = sum / static_cast<double>(c.count);
        // Gaps before, inside and after the cluster.
        const std::size_t end = c.start + c.count;
        for (std::size_t i = c.start; i <= end && i < values.size(); ++i) {
            c.ambiguous = c.ambiguous || ambiguous_gap[i];
        }
    }
    return clusters;
}

const Cluster& EigenSystem::cluster_of(std::size_t j) const
{
    for (const auto& c : clusters) {
        if (j >= c.start && j < c.start + c.count) {
            return c;
        }
    }
    throw IndexError("eigen index " + std::to_string(j) + " out of range");
}

EigenSystem eigensystem(std::shared_ptr<const FormOperator> op, double cluster_tol, double eig_tol)
{
    if (!op) {
        throw PreconditionError("eigensystem: null operator");
    }
    const auto dec = jacobi_eigh(op->symmetrized(), eig_tol);
    const std::size_t n = op->dim();
    const auto& m = op->measure();
    const auto& g = op->graph();

    Matrix v(n, n);
    std::vector<Vector> basis;
    basis.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector col = dec.vectors.column(j);
        for (std::size_t x = 0; x < n; ++x) {
            col[x] /= std::sqrt(m[x]);
        }
        // Modified Gram-Schmidt in <.,.>_m.
        for (const auto& prev : basis) {
            const double proj = m_inner(g, col, prev);
            for (std::size_t x = 0; x < n; ++x) {
                col[x] -= proj * prev[x];
            }
        }
        const double norm = m_norm(g, col);
        for (auto& c : col) {
            c /= norm;
        }
        // Sign convention: the first entry of maximal modulus is positive.
        const double peak = max_abs(col);
        for (std::size_t x = 0; x < n; ++x) {
            if (std::abs(col[x]) >= (1.0 - 1e-9) * peak) {
                if (col[x] < 0.0) {
                    for (auto& c : col) {
                        c = -c;
                    }
                }
                break;
            }
        }
        v.set_column(j, col);
        basis.push_back(std::move(col));
    }

    EigenSystem es;
    es.op = std::move(op);
    es.values = dec.values;
    es.vectors = std::move(v);
    es.clusters = cluster_spectrum(es.values, cluster_tol);
    es.cluster_tol = cluster_tol;
    return es;
}

EigenSystem eigensystem(const FormOperator& op, double cluster_tol, double eig_tol)
{
    return eigensystem(std::make_shared<const FormOperator>(op), cluster_tol, eig_tol);
}

namespace {

DenseSymMatrix shifted_stiffness(const FormOperator& op, double alpha)
{
    if (!(alpha > 0.0)) {
        throw PreconditionError("resolvent: alpha must be positive");
    }
    Matrix k = op.stiffness().matrix();
    for (std::size_t x = 0; x < op.dim(); ++x) {
        k(x, x) += alpha * op.measure()[x];
    }
    return DenseSymMatrix(std::move(k));
}

} // namespace

Resolvent resolvent(const FormOperator& op, double alpha)
{
    const Cholesky chol(shifted_stiffness(op, alpha));
    const std::size_t n = op.dim();
    Resolvent r;
    r.alpha = alpha;
    r.matrix = Matrix(n, n);
    Vector rhs(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        rhs[u] = op.measure()[u];
        r.matrix.set_column(u, chol.solve(rhs));
        rhs[u] = 0.0;
    }
    return r;
}

Vector resolvent_apply(const FormOperator& op, double alpha, std::span<const double> u)
{
    if (u.size() != op.dim()) {
        throw DimensionError("resolvent_apply: length mismatch");
    }
    Vector rhs(u.begin(), u.end());
    for (std::size_t x = 0; x < rhs.size(); ++x) {
        rhs[x] *= op.measure()[x];
    }
    return Cholesky(shifted_stiffness(op, alpha)).solve(rhs);
}

double rayleigh(const FormOperator& op, std::span<const double> v)
{
    const double norm2 = m_inner(op.graph(), v, v);
    if (norm2 == 0.0) {
        throw ZeroVector("rayleigh quotient of the zero vector");
    }
    return quadratic_form(op.graph(), v) / norm2;
}

VariationalCheck check_variational(const EigenSystem& es, std::span<const double> v, std::size_t n)
{
    if (n < 1 || n > es.size()) {
        throw IndexError("check_variational: index out of range");
    }
    const auto& g = es.graph();
    const double vnorm = m_norm(g, v);
    if (vnorm == 0.0) {
        throw ZeroVector("check_variational: zero vector");
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const Vector vj = es.vector(j);
        if (std::abs(m_inner(g, v, vj)) > 1e-9 * vnorm) {
            throw PreconditionError("check_variational: v is not orthogonal to eigenvector " +
                                    std::to_string(j + 1));
        }
    }
    VariationalCheck out;
    out.rayleigh = rayleigh(*es.op, v);
    const double lambda = es.values[n - 1];
    const double slack = 1e-8 * (1.0 + std::abs(lambda));
    out.holds = out.rayleigh >= lambda - slack;
    if (std::abs(out.rayleigh - lambda) <= slack) {
        Vector r = es.op->apply_generator(v);
        for (std::size_t x = 0; x < r.size(); ++x) {
            r[x] -= lambda * v[x];
        }
        out.is_eigen_if_equal = m_norm(g, r) <= 1e-7 * (1.0 + std::abs(lambda)) * vnorm;
    }
    return out;
}

Multiplicity multiplicity(const EigenSystem& es, std::size_t n)
{
    if (n < 1 || n > es.size()) {
        throw IndexError("multiplicity: index " + std::to_string(n) + " out of range 1.." +
                         std::to_string(es.size()));
    }
    const auto& c = es.cluster_of(n - 1);
    return {c.count, c.start + 1, c.ambiguous};
}

} // namespace nodalforms
