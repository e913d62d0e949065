#include "nodalforms/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nodalforms/errors.hpp"

namespace nodalforms {

GridSpec GridSpec::interval(std::size_t nx, double h, double a)
{
    GridSpec s;
    s.dims = 1;
    s.nx = nx;
    s.ny = 1;
    s.h = h;
    s.a_x.assign(nx + 1, a);
    s.potential.assign(nx, 0.0);
    s.mask.assign(nx, 1);
    return s;
}

GridSpec GridSpec::rectangle(std::size_t nx, std::size_t ny, double h, double a)
{
    GridSpec s;
    s.dims = 2;
    s.nx = nx;
    s.ny = ny;
    s.h = h;
    s.a_x.assign((nx + 1) * ny, a);
    s.a_y.assign(nx * (ny + 1), a);
    s.potential.assign(nx * ny, 0.0);
    s.mask.assign(nx * ny, 1);
    return s;
}

void GridSpec::set_conductivity(const std::function<double(double, double)>& a)
{
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = dims == 1 ? 0.0 : static_cast<double>(j + 1) * h;
        for (std::size_t i = 0; i <= nx; ++i) {
            a_x[j * (nx + 1) + i] = a((static_cast<double>(i) + 0.5) * h, y);
        }
    }
    if (dims == 2) {
        for (std::size_t j = 0; j <= ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                a_y[j * nx + i] = a(static_cast<double>(i + 1) * h, (static_cast<double>(j) + 0.5) * h);
            }
        }
    }
}

void GridSpec::set_conductivity_cells(std::span<const double> v)
{
    if (v.size() != cells()) {
        throw InvalidGraph("conductivity field needs " + std::to_string(cells()) + " values");
    }
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            double value;
            if (i == 0) {
                value = v[cell(0, j)];
            } else if (i == nx) {
                value = v[cell(nx - 1, j)];
            } else {
                value = 0.5 * (v[cell(i - 1, j)] + v[cell(i, j)]);
            }
            a_x[j * (nx + 1) + i] = value;
        }
    }
    if (dims == 2) {
        for (std::size_t j = 0; j <= ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                double value;
                if (j == 0) {
                    value = v[cell(i, 0)];
                } else if (j == ny) {
                    value = v[cell(i, ny - 1)];
                } else {
                    value = 0.5 * (v[cell(i, j - 1)] + v[cell(i, j)]);
                }
                a_y[j * nx + i] = value;
            }
        }
    }
}

void GridSpec::validate() const
{
    if (dims != 1 && dims != 2) {
        throw InvalidGraph("grid dims must be 1 or 2");
    }
    if (nx == 0 || ny == 0 || (dims == 1 && ny != 1)) {
        throw InvalidGraph("grid shape must be positive (ny = 1 in 1D)");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidGraph("mesh width h must be positive");
    }
    if (a_x.size() != (nx + 1) * ny || a_y.size() != (dims == 2 ? nx * (ny + 1) : 0) ||
        potential.size() != cells() || mask.size() != cells()) {
        throw InvalidGraph("grid field sizes do not match the shape");
    }
    auto check_a = [&](double a) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw InvalidGraph("conductivity must be finite and positive");
        }
        if (a < mu1 || a > mu2) {
            throw InvalidGraph("conductivity " + std::to_string(a) + " outside ellipticity bounds [" +
                               std::to_string(mu1) + ", " + std::to_string(mu2) + "]");
        }
    };
    std::for_each(a_x.begin(), a_x.end(), check_a);
    std::for_each(a_y.begin(), a_y.end(), check_a);
    for (double v : potential) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidGraph("potential must be finite and nonnegative");
        }
    }
    if (std::none_of(mask.begin(), mask.end(), [](char c) { return c != 0; })) {
        throw EmptyDomain("grid mask selects no cells");
    }
}

std::vector<std::pair<std::size_t, std::size_t>> grid_vertex_cells(const GridSpec& spec)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 0; j < spec.ny; ++j) {
        for (std::size_t i = 0; i < spec.nx; ++i) {
            if (spec.inside(i, j)) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

WeightedGraph build_grid_form(const GridSpec& spec)
{
    spec.validate();
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const double volume = spec.dims == 1 ? spec.h : spec.h * spec.h;
    const double link_scale = spec.dims == 1 ? 1.0 / spec.h : 1.0;

    const auto cells = grid_vertex_cells(spec);
    std::vector<std::size_t> vertex_of(spec.cells(), npos);
    for (std::size_t v = 0; v < cells.size(); ++v) {
        vertex_of[spec.cell(cells[v].first, cells[v].second)] = v;
    }

    std::vector<std::string> labels;
    Vector measure(cells.size(), volume);
    Vector killing(cells.size(), 0.0);
    std::vector<Edge> edges;
    for (std::size_t v = 0; v < cells.size(); ++v) {
        const auto [i, j] = cells[v];
        labels.push_back(spec.dims == 1 ? std::to_string(i) : std::to_string(i) + "," + std::to_string(j));
        killing[v] = spec.potential[spec.cell(i, j)] * volume;
    }

    // A link either joins two domain cells (edge) or leaves the domain (killing).
    auto link = [&](std::size_t from, std::size_t to, double a) {
        const double w = a * link_scale;
        const std::size_t vf = from == npos ? npos : vertex_of[from];
        const std::size_t vt = to == npos ? npos : vertex_of[to];
        if (vf != npos && vt != npos) {
            edges.push_back({vf, vt, w});
        } else if (vf != npos) {
            killing[vf] += w;
        } else if (vt != npos) {
            killing[vt] += w;
        }
    };
    for (std::size_t j = 0; j < spec.ny; ++j) {
        for (std::size_t i = 0; i <= spec.nx; ++i) {
            const std::size_t left = i == 0 ? npos : spec.cell(i - 1, j);
            const std::size_t right = i == spec.nx ? npos : spec.cell(i, j);
            link(left, right, spec.a_x[j * (spec.nx + 1) + i]);
        }
    }
    if (spec.dims == 2) {
        for (std::size_t j = 0; j <= spec.ny; ++j) {
            for (std::size_t i = 0; i < spec.nx; ++i) {
                const std::size_t below = j == 0 ? npos : spec.cell(i, j - 1);
                const std::size_t above = j == spec.ny ? npos : spec.cell(i, j);
                link(below, above, spec.a_y[j * spec.nx + i]);
            }
        }
    }
    return WeightedGraph(std::move(labels), std::move(measure), std::move(killing), std::move(edges));
}

std::vector<CourantReport> strong_bound_report(const EigenSystem& es, std::size_t n_max,
                                               double tau_rel, int samples, std::uint64_t seed)
{
    std::vector<CourantReport> out;
    n_max = std::min(n_max, es.size());
    for (std::size_t n = 1; n <= n_max; ++n) {
        out.push_back(courant_check(es, n, tau_rel, EigenvectorSource::solver_basis(), true));
        const auto mult = multiplicity(es, n);
        if (mult.k > 1) {
            for (int s = 0; s < samples; ++s) {
                const std::uint64_t sample_seed = seed + 1000003ULL * n + static_cast<std::uint64_t>(s);
                out.push_back(courant_check(es, n, tau_rel, EigenvectorSource::random_rotation(sample_seed), true));
            }
        }
    }
    return out;
}

} // namespace nodalforms
