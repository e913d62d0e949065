#ifndef NODALFORMS_NODAL_HPP
#define NODALFORMS_NODAL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodalforms/forms.hpp"
#include "nodalforms/spectral.hpp"

namespace nodalforms {

/// Default sign tolerance relative to ||f||_inf.
inline constexpr double kDefaultTauRel = 1e-9;

/// Partition of the vertices into {f > tau}, {f < -tau} and {|f| <= tau}.
struct SignPattern {
    double tau = 0.0;
    VertexSubset positive;
    VertexSubset negative;
    VertexSubset zero;
};

SignPattern sign_sets(std::span<const double> f, double tau);

/// Connected components of the induced graphs on F+ and F-.
struct NodalDecomposition {
    SignPattern sign_pattern;
    std::vector<VertexSubset> positive_domains;
    std::vector<VertexSubset> negative_domains;

    std::size_t count() const { return positive_domains.size() + negative_domains.size(); }
    /// Positive domains first, then negative ones.
    std::vector<VertexSubset> domains() const;
};

/// `tau` is absolute here.
NodalDecomposition nodal_decompose(const WeightedGraph& g, std::span<const double> f, double tau);

/// Which eigenfunction of lambda_n a report was computed for.
struct EigenvectorSource {
    enum class Kind { solver_basis, random_rotation, supplied };

    Kind kind = Kind::solver_basis;
    std::uint64_t seed = 0;

    static EigenvectorSource solver_basis() { return {Kind::solver_basis, 0}; }
    static EigenvectorSource random_rotation(std::uint64_t seed) { return {Kind::random_rotation, seed}; }
    static EigenvectorSource supplied() { return {Kind::supplied, 0}; }

    std::string name() const;
};

/// Nodal-domain count of one eigenfunction of lambda_n against n + k - 1.
struct CourantReport {
    std::size_t n = 0; ///< 1-based
    double lambda = 0.0;
    std::size_t k = 0;
    std::size_t l = 0;
    std::size_t bound = 0;
    bool passes = false;
    std::optional<bool> strong_passes;
    double tau = 0.0; ///< relative to ||f||_inf
    double cluster_tol = 0.0;
    EigenvectorSource source;
    bool ambiguous = false;
    /// max over domains of |Q(f 1_C, f) - lambda ||f 1_C||^2|; nonzero only
    /// through eigen-residuals and mass of f on the zero set.
    double energy_defect = 0.0;
    /// ||f 1_Z||^2_m on the zero set Z.
    double zero_set_mass = 0.0;
    NodalDecomposition decomposition;
};

/// Random m-unit combination of the eigenvectors in the cluster of lambda_n.
Vector eigenspace_sample(const EigenSystem& es, std::size_t n, std::uint64_t seed);

CourantReport courant_check(const EigenSystem& es, std::size_t n, double tau_rel = kDefaultTauRel,
                            EigenvectorSource source = EigenvectorSource::solver_basis(),
                            bool evaluate_strong = false);

/// Report for an eigenfunction f of lambda_n supplied by the caller.
CourantReport courant_check_vector(const EigenSystem& es, std::size_t n, std::span<const double> f,
                                   double tau_rel = kDefaultTauRel, bool evaluate_strong = false,
                                   EigenvectorSource source = EigenvectorSource::supplied());

/// Matrix of Q(f 1_{C_i}, f 1_{C_j}) over the domains, positives first.
struct CrossForm {
    Matrix entries;
    double min_entry = 0.0;
    /// max |f - sum_i f 1_{C_i}| on F+ and F-.
    double reconstruction_error = 0.0;
    /// max |f| on the zero set; bounded by tau.
    double truncation = 0.0;
    bool nonnegative = false;
};

CrossForm cross_form_matrix(const WeightedGraph& g, std::span<const double> f,
                            const NodalDecomposition& nd);

/// |LHS - RHS| of
///   Q(v) - mu ||v||^2 = sum_i c_i^2 (Q(f 1_i, f) - mu ||f 1_i||^2)
///                       - 1/2 sum_ij (c_i - c_j)^2 Q(f 1_i, f 1_j)
/// with v = sum_i c_i f 1_i. Exact when f vanishes off the domains.
double sum_lemma_residual(const WeightedGraph& g, std::span<const double> f,
                          const NodalDecomposition& nd, std::span<const double> coeffs, double mu);

struct RestrictedResolventBound {
    bool positive_checked = false;
    bool negative_checked = false;
    /// min over checked x of (G_1^{F} f)(x) - f(x) / (1 + lambda).
    double min_slack = 0.0;
    bool holds = true;
};

/// G_1 of the restriction to F+ (resp. F-) applied to f+ (resp. f-), compared
/// with f+/(1 + lambda) (resp. f-/(1 + lambda)) up to 1e-9. `tau` is absolute.
RestrictedResolventBound restricted_resolvent_bound(const WeightedGraph& g, std::span<const double> f,
                                                    double lambda, double tau);

bool restricted_resolvent_bound_check(const EigenSystem& es, std::size_t n,
                                      double tau_rel = kDefaultTauRel);

} // namespace nodalforms

#endif
