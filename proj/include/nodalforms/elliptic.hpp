#ifndef NODALFORMS_ELLIPTIC_HPP
#define NODALFORMS_ELLIPTIC_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "nodalforms/forms.hpp"
#include "nodalforms/nodal.hpp"
#include "nodalforms/spectral.hpp"

namespace nodalforms {

/// Uniform finite-difference grid for -div(a grad u) + V u with homogeneous
/// Dirichlet data, on an interval (dims = 1) or a masked rectangle (dims = 2).
///
/// Cell (i, j) sits at ((i+1) h, (j+1) h). Conductivities live on links: x-link
/// (i, j) joins cells (i-1, j) and (i, j), so links 0 and nx touch the walls;
/// y-links are laid out the same way along y.
struct GridSpec {
    int dims = 1;
    std::size_t nx = 1;
    std::size_t ny = 1;
    double h = 1.0;
    Vector a_x;                ///< (nx + 1) * ny, index j * (nx + 1) + i
    Vector a_y;                ///< nx * (ny + 1), index j * nx + i; empty when dims == 1
    Vector potential;          ///< nx * ny, index j * nx + i
    std::vector<char> mask;    ///< nx * ny, nonzero = inside the domain
    double mu1 = 0.0;          ///< lower ellipticity bound, 0 = unchecked
    double mu2 = std::numeric_limits<double>::infinity();

    static GridSpec interval(std::size_t nx, double h, double a = 1.0);
    static GridSpec rectangle(std::size_t nx, std::size_t ny, double h, double a = 1.0);

    std::size_t cells() const noexcept { return nx * ny; }
    std::size_t cell(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
    bool inside(std::size_t i, std::size_t j) const { return mask[cell(i, j)] != 0; }

    /// Samples a(x, y) at link midpoints.
    void set_conductivity(const std::function<double(double, double)>& a);
    /// Per-cell field: an interior link takes the mean of its two cells, a
    /// wall link the value of its cell.
    void set_conductivity_cells(std::span<const double> cell_values);

    /// Throws EmptyDomain for an empty mask, InvalidGraph for anything else malformed.
    void validate() const;
};

/// Vertices are the masked cells (measure h^dims). Neighbouring cells share an
/// edge of weight a h^{dims-2}; links to walls or unmasked cells are folded into
/// the killing term together with V h^dims.
WeightedGraph build_grid_form(const GridSpec& spec);

/// (i, j) of each vertex of build_grid_form(spec), in vertex order.
std::vector<std::pair<std::size_t, std::size_t>> grid_vertex_cells(const GridSpec& spec);

/// Courant reports with the strong bound l <= n evaluated, for n = 1..n_max on
/// the solver basis plus `samples` eigenspace samples per degenerate cluster.
std::vector<CourantReport> strong_bound_report(const EigenSystem& es, std::size_t n_max,
                                               double tau_rel = kDefaultTauRel, int samples = 20,
                                               std::uint64_t seed = 0);

} // namespace nodalforms

#endif
