#ifndef NODALFORMS_FAMILIES_HPP
#define NODALFORMS_FAMILIES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nodalforms/elliptic.hpp"
#include "nodalforms/forms.hpp"

namespace nodalforms {

// Unit weights, m = 1, c = 0 throughout.
WeightedGraph path_graph(std::size_t n);
WeightedGraph cycle_graph(std::size_t n);
/// Center 0, leaves 1..n-1.
WeightedGraph star_graph(std::size_t n);
WeightedGraph complete_graph(std::size_t n);

/// Random spanning tree plus extra edges; b in [0.1, 2], m in [0.5, 2],
/// c in [0, 1] on roughly 30% of the vertices.
WeightedGraph random_connected_graph(std::size_t n, std::uint64_t seed);

/// Vertices of `b` follow those of `a`; labels get "a:" / "b:" prefixes.
WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b);

/// Eigenfunction of the star for eigenvalue 1 that vanishes at the center and
/// nowhere on the leaves: alternating +-1, with (1, -2, 1) leading when the
/// leaf count is odd.
Vector star_alternating_leaves(std::size_t n);

struct CorpusEntry {
    std::string name;
    WeightedGraph graph;
    std::optional<GridSpec> grid;
};

/// Paths, cycles, stars, complete graphs, 50 random connected graphs, grids
/// and a few disconnected unions.
std::vector<CorpusEntry> builtin_corpus(std::uint64_t seed);

} // namespace nodalforms

#endif
