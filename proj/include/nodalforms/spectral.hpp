#ifndef NODALFORMS_SPECTRAL_HPP
#define NODALFORMS_SPECTRAL_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nodalforms/forms.hpp"
#include "nodalforms/linalg.hpp"

namespace nodalforms {

inline constexpr double kDefaultClusterTol = 1e-7;
/// A gap within this factor of the clustering threshold (either side) makes
/// the multiplicity of the adjacent clusters ambiguous.
inline constexpr double kAmbiguityBand = 100.0;

/// Run of numerically equal eigenvalues. `start` is 0-based.
struct Cluster {
    std::size_t start = 0;
    std::size_t count = 0;
    double value = 0.0;
    bool ambiguous = false;
};

/// Splits an ascending spectrum into clusters: consecutive values stay together
/// while the gap is at most cluster_tol * (1 + |previous value|).
std::vector<Cluster> cluster_spectrum(std::span<const double> values, double cluster_tol);

/// Eigenpairs of a form, with eigenvectors orthonormal in the m-weighted inner product.
struct EigenSystem {
    std::shared_ptr<const FormOperator> op;
    Vector values;
    Matrix vectors; ///< column j belongs to values[j]
    std::vector<Cluster> clusters;
    double cluster_tol = kDefaultClusterTol;

    std::size_t size() const noexcept { return values.size(); }
    const WeightedGraph& graph() const { return op->graph(); }
    Vector vector(std::size_t j) const { return vectors.column(j); }
    /// Cluster containing the 0-based index j.
    const Cluster& cluster_of(std::size_t j) const;
};

EigenSystem eigensystem(std::shared_ptr<const FormOperator> op,
                        double cluster_tol = kDefaultClusterTol,
                        double eig_tol = kDefaultEigTol);
EigenSystem eigensystem(const FormOperator& op, double cluster_tol = kDefaultClusterTol,
                        double eig_tol = kDefaultEigTol);

/// G_alpha = (A + alpha M)^{-1} M, the resolvent of the form in matrix form.
struct Resolvent {
    double alpha = 0.0;
    Matrix matrix;

    Vector apply(std::span<const double> u) const { return matrix * u; }
};

Resolvent resolvent(const FormOperator& op, double alpha);
/// G_alpha u through a single factorization, without forming the matrix.
Vector resolvent_apply(const FormOperator& op, double alpha, std::span<const double> u);

/// Q(v) / <v, v>_m.
double rayleigh(const FormOperator& op, std::span<const double> v);

struct VariationalCheck {
    bool holds = false;
    bool is_eigen_if_equal = false;
    double rayleigh = 0.0;
};

/// Checks Q(v) >= lambda_n ||v||^2 for v orthogonal to the first n-1
/// eigenvectors, and whether equality forces v to be an eigenvector. n is 1-based.
VariationalCheck check_variational(const EigenSystem& es, std::span<const double> v, std::size_t n);

struct Multiplicity {
    std::size_t k = 0;
    std::size_t first_index = 0; ///< 1-based
    bool ambiguous = false;
};

/// Size of the cluster containing lambda_n (n is 1-based).
Multiplicity multiplicity(const EigenSystem& es, std::size_t n);

} // namespace nodalforms

#endif
