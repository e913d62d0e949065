#ifndef NODALFORMS_FORMS_HPP
#define NODALFORMS_FORMS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodalforms/linalg.hpp"

namespace nodalforms {

/// Undirected edge stored once with u < v.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

struct Neighbor {
    std::size_t vertex = 0;
    double weight = 0.0;
};

/// Finite graph (b, c) over a vertex set with measure m.
///
/// Edges are normalized to u < v and sorted, so b is symmetric and vanishes on
/// the diagonal by construction. Self-loops, duplicate edges and non-positive
/// weights are rejected; "no edge" is the only way to express b(x, y) = 0.
class WeightedGraph {
public:
    WeightedGraph(std::vector<std::string> labels, Vector measure, Vector killing,
                  std::vector<Edge> edges);

    /// Labels "0".."n-1", m = 1, and c = 0 unless a killing term is given.
    static WeightedGraph with_unit_measure(std::size_t n, std::vector<Edge> edges,
                                           Vector killing = {});

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const Vector& measure() const noexcept { return measure_; }
    const Vector& killing() const noexcept { return killing_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_.at(i); }

    /// b(x, y); zero when x and y are not adjacent.
    double weight(std::size_t x, std::size_t y) const;
    /// Sum over y of b(x, y).
    double degree(std::size_t x) const;
    std::optional<std::size_t> index_of(const std::string& label) const;

    bool operator==(const WeightedGraph& other) const;

private:
    std::vector<std::string> labels_;
    Vector measure_;
    Vector killing_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

/// Subset of the vertex set {0, ..., n-1} of a particular graph.
class VertexSubset {
public:
    VertexSubset() = default;
    explicit VertexSubset(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

    static VertexSubset full(std::size_t universe);
    static VertexSubset from_indices(std::size_t universe, std::span<const std::size_t> indices);
    static VertexSubset from_mask(std::size_t universe, std::uint64_t mask);

    std::size_t universe() const noexcept { return universe_; }
    std::size_t count() const;
    bool empty() const;
    bool contains(std::size_t i) const { return (words_[checked(i) / 64] >> (i % 64) & 1U) != 0; }
    void insert(std::size_t i) { words_[checked(i) / 64] |= std::uint64_t{1} << (i % 64); }
    void erase(std::size_t i) { words_[checked(i) / 64] &= ~(std::uint64_t{1} << (i % 64)); }

    std::vector<std::size_t> indices() const;
    std::uint64_t to_mask() const;

    VertexSubset complement() const;
    VertexSubset operator|(const VertexSubset& rhs) const;
    VertexSubset operator&(const VertexSubset& rhs) const;
    VertexSubset operator-(const VertexSubset& rhs) const;
    bool is_subset_of(const VertexSubset& rhs) const;

    bool operator==(const VertexSubset&) const = default;
    /// Lexicographic order on the sorted index lists.
    bool operator<(const VertexSubset& rhs) const;

private:
    std::size_t checked(std::size_t i) const;
    void require_same_universe(const VertexSubset& rhs) const;

    std::size_t universe_ = 0;
    // Bits past universe_ stay zero.
    std::vector<std::uint64_t> words_;
};

/// Q(f) = 1/2 sum b(x,y)(f(x)-f(y))^2 + sum c(x) f(x)^2.
double quadratic_form(const WeightedGraph& g, std::span<const double> f);
double bilinear_form(const WeightedGraph& g, std::span<const double> f, std::span<const double> h);
/// Sum f(x) h(x) m(x).
double m_inner(const WeightedGraph& g, std::span<const double> f, std::span<const double> h);
double m_norm(const WeightedGraph& g, std::span<const double> f);

/// Generator of the graph form as a matrix pencil (A, M).
///
/// A[x][y] = -b(x,y) off the diagonal, A[x][x] = c(x) + sum_y b(x,y), M = diag(m).
/// The symmetrized matrix M^{-1/2} A M^{-1/2} has the same spectrum as the pencil.
class FormOperator {
public:
    explicit FormOperator(WeightedGraph g);

    const WeightedGraph& graph() const noexcept { return graph_; }
    std::size_t dim() const noexcept { return graph_.size(); }
    const DenseSymMatrix& stiffness() const noexcept { return stiffness_; }
    const Vector& measure() const noexcept { return graph_.measure(); }
    const DenseSymMatrix& symmetrized() const noexcept { return symmetrized_; }

    /// (Lf)(x) = (1/m(x)) (sum_y b(x,y)(f(x)-f(y)) + c(x) f(x)).
    Vector apply_generator(std::span<const double> f) const;

private:
    WeightedGraph graph_;
    DenseSymMatrix stiffness_;
    DenseSymMatrix symmetrized_;
};

FormOperator assemble_operator(const WeightedGraph& g);

/// Graph (b_A, c_A) on the vertices of A, in increasing index order. Edges
/// leaving A are folded into the killing term.
WeightedGraph restrict(const WeightedGraph& g, const VertexSubset& a);

/// Values of f on A, in increasing index order.
Vector restrict_vector(std::span<const double> f, const VertexSubset& a);
/// Inverse of restrict_vector: places h on A and zero elsewhere.
Vector extend_by_zero(std::span<const double> h, const VertexSubset& a);
/// f * 1_A.
Vector mask_vector(std::span<const double> f, const VertexSubset& a);

/// f_+ = max(f, 0).
Vector positive_part(std::span<const double> f);
/// f_- = max(-f, 0); f = f_+ - f_-.
Vector negative_part(std::span<const double> f);

/// Draws random f and checks Q(|f|) <= Q(f) + 1e-10 (1 + |Q(f)|) each time.
bool positivity_preserving_check(const WeightedGraph& g, int trials, std::uint64_t seed);

} // namespace nodalforms

#endif
