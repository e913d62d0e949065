#ifndef NODALFORMS_INVARIANCE_HPP
#define NODALFORMS_INVARIANCE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nodalforms/forms.hpp"
#include "nodalforms/spectral.hpp"

namespace nodalforms {

inline constexpr double kDefaultInvarianceTol = 1e-9;
inline constexpr std::size_t kBruteForceLimit = 20;

struct CrossingEdge {
    std::size_t inside = 0;
    std::size_t outside = 0;
    double weight = 0.0;
};

/// Both characterizations of invariance for one subset: the commutator
/// ||1_A G_alpha - G_alpha 1_A||_inf and the list of edges leaving A.
struct InvarianceCertificate {
    VertexSubset subset;
    double alpha_tested = 0.0;
    double commutator_norm = 0.0;
    /// tol * (1 + ||G_alpha||_inf)
    double threshold = 0.0;
    std::vector<CrossingEdge> crossing_edges;

    bool invariant() const { return commutator_norm <= threshold; }
    bool invariant_combinatorial() const { return crossing_edges.empty(); }
    bool consistent() const { return invariant() == invariant_combinatorial(); }
};

InvarianceCertificate is_invariant_resolvent(const FormOperator& op, const VertexSubset& a,
                                             double alpha = 1.0, double tol = kDefaultInvarianceTol);
/// Same test against a precomputed resolvent of `g`.
InvarianceCertificate is_invariant_resolvent(const WeightedGraph& g, const Resolvent& r,
                                             const VertexSubset& a, double tol = kDefaultInvarianceTol);

double commutator_norm(const Resolvent& r, const VertexSubset& a);

/// True iff no edge with b > 0 joins A and its complement.
bool is_invariant_combinatorial(const WeightedGraph& g, const VertexSubset& a);

/// Disjoint connected components covering the vertex set, ordered by their
/// smallest vertex.
struct ComponentPartition {
    std::vector<VertexSubset> components;

    std::size_t size() const noexcept { return components.size(); }
    /// Index of the component containing x.
    std::size_t component_of(std::size_t x) const;
    bool operator==(const ComponentPartition&) const = default;
};

ComponentPartition connected_components(const WeightedGraph& g);
bool is_irreducible(const WeightedGraph& g);

/// Partition induced by the support of G_alpha: x and y are linked when
/// G(x,y) or G(y,x) exceeds tol * max|G|, and the classes are the transitive
/// closure of that relation.
ComponentPartition resolvent_support_partition(const Resolvent& r, double tol = kDefaultInvarianceTol);

/// Decomposition into Q-connected components for a strictly positive f with
/// G_1 f >= c f. Computed combinatorially and cross-checked against the
/// support of G_1; throws Error if the two disagree.
ComponentPartition gerlach_decompose(const FormOperator& op, std::span<const double> f,
                                     double tol = kDefaultInvarianceTol);

/// Largest c with G_1 f >= c f entrywise.
double resolvent_lower_ratio(const Resolvent& g1, std::span<const double> f);

/// Every subset passing is_invariant_resolvent, sorted. Throws SizeLimit above
/// 20 vertices and Error if the family is not closed under complement and
/// intersection.
std::vector<VertexSubset> invariant_subsets_bruteforce(const FormOperator& op, double alpha = 1.0,
                                                       double tol = kDefaultInvarianceTol);

/// Minimal nonempty members of a family of subsets.
std::vector<VertexSubset> atoms(const std::vector<VertexSubset>& family);

/// Orthogonal projection onto {f : f = 0 off A} in the inner product
/// Q(f, h) + <f, h>_m.
Matrix q_projection(const FormOperator& op, const VertexSubset& a);

/// Resolvent of the restriction to A, as an n x n matrix that ignores values
/// off A and vanishes off A.
Matrix restricted_resolvent(const FormOperator& op, const VertexSubset& a, double alpha);

/// Random f >= 0: checks (P_A f)(x) <= f(x) + 1e-9.
bool projection_domination_check(const FormOperator& op, const VertexSubset& a, int trials,
                                 std::uint64_t seed);

struct TransferCheck {
    /// A is Q-invariant and A cap B is Q_A-invariant.
    bool lift_applies = false;
    /// ... and then A cap B is Q-invariant.
    bool lift_holds = true;
    /// B is Q-invariant.
    bool descend_applies = false;
    /// ... and then A cap B is Q_A-invariant.
    bool descend_holds = true;

    bool holds() const { return lift_holds && descend_holds; }
};

TransferCheck invariance_transfer_check(const WeightedGraph& g, const VertexSubset& a,
                                        const VertexSubset& b, double alpha = 1.0,
                                        double tol = kDefaultInvarianceTol);

struct TransferSummary {
    std::size_t pairs = 0;
    std::size_t lift_applied = 0;
    std::size_t descend_applied = 0;
    std::size_t failures = 0;
};

/// invariance_transfer_check over every pair (A, B); at most 12 vertices.
TransferSummary invariance_transfer_exhaustive(const WeightedGraph& g, double alpha = 1.0,
                                               double tol = kDefaultInvarianceTol);

} // namespace nodalforms

#endif
