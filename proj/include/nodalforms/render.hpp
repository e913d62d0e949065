#ifndef NODALFORMS_RENDER_HPP
#define NODALFORMS_RENDER_HPP

#include <span>
#include <string>

#include "nodalforms/elliptic.hpp"
#include "nodalforms/forms.hpp"
#include "nodalforms/nodal.hpp"

namespace nodalforms {

/// Circular layout; vertices colored by sign, one translucent hull per nodal domain.
std::string render_graph_svg(const WeightedGraph& g, std::span<const double> f,
                             const NodalDecomposition& nd, const std::string& title);

/// Heatmap of f over the grid cells with the zero level set traced by marching squares.
/// `f` is indexed like the vertices of build_grid_form(spec).
std::string render_grid_svg(const GridSpec& spec, std::span<const double> f, const std::string& title);

} // namespace nodalforms

#endif
