#include "nodalforms/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

#include "nodalforms/errors.hpp"

namespace nodalforms {

namespace {

void require_vertices(std::size_t n, std::size_t minimum, const char* what)
{
    if (n < minimum) {
        throw InvalidGraph(std::string(what) + " needs at least " + std::to_string(minimum) + " vertices");
    }
}

} // namespace

WeightedGraph path_graph(std::size_t n)
{
    require_vertices(n, 1, "path");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.push_back({i, i + 1, 1.0});
    }
    return WeightedGraph::with_unit_measure(n, std::move(edges));
}

WeightedGraph cycle_graph(std::size_t n)
{
    require_vertices(n, 3, "cycle");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.push_back({i, (i + 1) % n, 1.0});
    }
    return WeightedGraph::with_unit_measure(n, std::move(edges));
}

WeightedGraph star_graph(std::size_t n)
{
    require_vertices(n, 2, "star");
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < n; ++i) {
        edges.push_back({0, i, 1.0});
    }
    return WeightedGraph::with_unit_measure(n, std::move(edges));
}

WeightedGraph complete_graph(std::size_t n)
{
    require_vertices(n, 1, "complete graph");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({i, j, 1.0});
        }
    }
    return WeightedGraph::with_unit_measure(n, std::move(edges));
}

WeightedGraph random_connected_graph(std::size_t n, std::uint64_t seed)
{
    require_vertices(n, 1, "random graph");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> weight(0.1, 2.0);
    std::uniform_real_distribution<double> mass(0.5, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> parent(0, v - 1);
        pairs.emplace(parent(rng), v);
    }
    if (n > 2) {
        std::uniform_int_distribution<std::size_t> vertex(0, n - 1);
        const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, n)(rng);
        for (std::size_t e = 0; e < extra; ++e) {
            std::size_t u = vertex(rng);
            std::size_t v = vertex(rng);
            if (u != v) {
                pairs.emplace(std::min(u, v), std::max(u, v));
            }
        }
    }
    std::vector<Edge> edges;
    for (const auto& [u, v] : pairs) {
        edges.push_back({u, v, weight(rng)});
    }
    std::vector<std::string> labels;
    Vector m(n), c(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        labels.push_back(std::to_string(x));
        m[x] = mass(rng);
        if (unit(rng) < 0.3) {
            c[x] = unit(rng);
        }
    }
    return WeightedGraph(std::move(labels), std::move(m), std::move(c), std::move(edges));
}

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b)
{
    std::vector<std::string> labels;
    for (const auto& l : a.labels()) {
        labels.push_back("a:" + l);
    }
    for (const auto& l : b.labels()) {
        labels.push_back("b:" + l);
    }
    Vector m = a.measure();
    m.insert(m.end(), b.measure().begin(), b.measure().end());
    Vector c = a.killing();
    c.insert(c.end(), b.killing().begin(), b.killing().end());
    std::vector<Edge> edges = a.edges();
    for (const auto& e : b.edges()) {
        edges.push_back({e.u + a.size(), e.v + a.size(), e.weight});
    }
    return WeightedGraph(std::move(labels), std::move(m), std::move(c), std::move(edges));
}

Vector star_alternating_leaves(std::size_t n)
{
    require_vertices(n, 3, "alternating star eigenfunction");
    const std::size_t leaves = n - 1;
    Vector f(n, 0.0);
    std::size_t next = 1;
    if (leaves % 2 == 1) {
        f[1] = 1.0;
        f[2] = -2.0;
        f[3] = 1.0;
        next = 4;
    }
    for (std::size_t i = next; i < n; ++i) {
        f[i] = ((i - next) % 2 == 0) ? 1.0 : -1.0;
    }
    return f;
}

std::vector<CorpusEntry> builtin_corpus(std::uint64_t seed)
{
    std::vector<CorpusEntry> out;
    auto add = [&](std::string name, WeightedGraph g) { out.push_back({std::move(name), std::move(g), std::nullopt}); };
    auto add_grid = [&](std::string name, GridSpec spec) {
        WeightedGraph g = build_grid_form(spec);
        out.push_back({std::move(name), std::move(g), std::move(spec)});
    };

    for (std::size_t n = 2; n <= 12; ++n) {
        add("path_" + std::to_string(n), path_graph(n));
    }
    for (std::size_t n = 3; n <= 12; ++n) {
        add("cycle_" + std::to_string(n), cycle_graph(n));
    }
    for (std::size_t n = 3; n <= 12; ++n) {
        add("star_" + std::to_string(n), star_graph(n));
    }
    for (std::size_t n = 2; n <= 8; ++n) {
        add("complete_" + std::to_string(n), complete_graph(n));
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> size(2, 30);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = size(rng);
        const std::uint64_t graph_seed = rng();
        add("random_" + std::to_string(i), random_connected_graph(n, graph_seed));
    }

    add("union_path3_cycle4", disjoint_union(path_graph(3), cycle_graph(4)));
    add("union_star4_complete3", disjoint_union(star_graph(4), complete_graph(3)));
    add("union_random5_random4", disjoint_union(random_connected_graph(5, seed + 1), random_connected_graph(4, seed + 2)));
    add("union_three_paths", disjoint_union(disjoint_union(path_graph(2), path_graph(3)), path_graph(1)));

    add_grid("grid1d_100", GridSpec::interval(99, 1.0 / 100.0));
    {
        GridSpec s = GridSpec::interval(59, 1.0 / 60.0);
        s.set_conductivity([](double x, double) { return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x); });
        for (std::size_t i = 0; i < s.nx; ++i) {
            s.potential[i] = 10.0 * static_cast<double>(i + 1) * s.h;
        }
        add_grid("grid1d_variable", std::move(s));
    }
    add_grid("grid2d_square_20", GridSpec::rectangle(20, 20, 1.0 / 21.0));
    {
        GridSpec s = GridSpec::rectangle(16, 16, 1.0 / 17.0);
        for (std::size_t j = 8; j < 16; ++j) {
            for (std::size_t i = 8; i < 16; ++i) {
                s.mask[s.cell(i, j)] = 0;
            }
        }
        add_grid("grid2d_lshape", std::move(s));
    }
    {
        GridSpec s = GridSpec::rectangle(12, 10, 1.0 / 13.0);
        s.set_conductivity([](double x, double y) { return 1.0 + x * y; });
        for (std::size_t j = 0; j < s.ny; ++j) {
            for (std::size_t i = 0; i < s.nx; ++i) {
                s.potential[s.cell(i, j)] = 5.0 * static_cast<double>((i + j) % 3);
            }
        }
        add_grid("grid2d_potential", std::move(s));
    }
    return out;
}

} // namespace nodalforms
