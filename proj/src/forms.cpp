#include "nodalforms/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <unordered_set>

#include "nodalforms/errors.hpp"

namespace nodalforms {

namespace {

void require_length(const WeightedGraph& g, std::span<const double> f, const char* what)
{
    if (f.size() != g.size()) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(g.size()) +
                             ", got " + std::to_string(f.size()));
    }
}

} // namespace

WeightedGraph::WeightedGraph(std::vector<std::string> labels, Vector measure, Vector killing,
                             std::vector<Edge> edges)
    : labels_(std::move(labels)), measure_(std::move(measure)), killing_(std::move(killing))
{
    const std::size_t n = labels_.size();
    if (n == 0) {
        throw InvalidGraph("graph must have at least one vertex");
    }
    if (measure_.size() != n || killing_.size() != n) {
        throw InvalidGraph("measure and killing term must have one entry per vertex");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen.insert(labels_[i]).second) {
            throw InvalidGraph("duplicate vertex label '" + labels_[i] + "'");
        }
        if (!(measure_[i] > 0.0) || !std::isfinite(measure_[i])) {
            throw InvalidGraph("vertex '" + labels_[i] + "' needs a finite positive measure");
        }
        if (!(killing_[i] >= 0.0) || !std::isfinite(killing_[i])) {
            throw InvalidGraph("vertex '" + labels_[i] + "' needs a finite nonnegative killing term");
        }
    }
    for (auto& e : edges) {
        if (e.u >= n || e.v >= n) {
            throw InvalidGraph("edge endpoint out of range");
        }
        if (e.u == e.v) {
            throw InvalidGraph("self-loop at vertex '" + labels_[e.u] + "'");
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw InvalidGraph("edge weights must be finite and strictly positive");
        }
        if (e.u > e.v) {
            std::swap(e.u, e.v);
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (edges[k].u == edges[k - 1].u && edges[k].v == edges[k - 1].v) {
            throw InvalidGraph("duplicate edge '" + labels_[edges[k].u] + "' - '" +
                               labels_[edges[k].v] + "'");
        }
    }
    edges_ = std::move(edges);
    adjacency_.resize(n);
    for (const auto& e : edges_) {
        adjacency_[e.u].push_back({e.v, e.weight});
        adjacency_[e.v].push_back({e.u, e.weight});
    }
}

WeightedGraph WeightedGraph::with_unit_measure(std::size_t n, std::vector<Edge> edges, Vector killing)
{
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = std::to_string(i);
    }
    if (killing.empty()) {
        killing.assign(n, 0.0);
    }
    return WeightedGraph(std::move(labels), Vector(n, 1.0), std::move(killing), std::move(edges));
}

double WeightedGraph::weight(std::size_t x, std::size_t y) const
{
    for (const auto& nb : adjacency_.at(x)) {
        if (nb.vertex == y) {
            return nb.weight;
        }
    }
    return 0.0;
}

double WeightedGraph::degree(std::size_t x) const
{
    double s = 0.0;
    for (const auto& nb : adjacency_.at(x)) {
        s += nb.weight;
    }
    return s;
}

std::optional<std::size_t> WeightedGraph::index_of(const std::string& label) const
{
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

bool WeightedGraph::operator==(const WeightedGraph& other) const
{
    return labels_ == other.labels_ && measure_ == other.measure_ && killing_ == other.killing_ &&
           edges_ == other.edges_;
}

VertexSubset VertexSubset::full(std::size_t universe)
{
    return VertexSubset(universe).complement();
}

VertexSubset VertexSubset::from_indices(std::size_t universe, std::span<const std::size_t> indices)
{
    VertexSubset s(universe);
    for (auto i : indices) {
        s.insert(i);
    }
    return s;
}

VertexSubset VertexSubset::from_mask(std::size_t universe, std::uint64_t mask)
{
    if (universe > 64) {
        throw SizeLimit("bit masks cover at most 64 vertices");
    }
    VertexSubset s(universe);
    if (universe > 0) {
        s.words_[0] = universe == 64 ? mask : mask & ((std::uint64_t{1} << universe) - 1);
    }
    return s;
}

std::size_t VertexSubset::checked(std::size_t i) const
{
    if (i >= universe_) {
        throw IndexError("vertex " + std::to_string(i) + " outside subset universe of " + std::to_string(universe_));
    }
    return i;
}

void VertexSubset::require_same_universe(const VertexSubset& rhs) const
{
    if (universe_ != rhs.universe_) {
        throw DimensionError("subsets of different vertex sets");
    }
}

std::size_t VertexSubset::count() const
{
    std::size_t n = 0;
    for (auto w : words_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

bool VertexSubset::empty() const
{
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<std::size_t> VertexSubset::indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words_.size(); ++k) {
        for (std::uint64_t w = words_[k]; w != 0; w &= w - 1) {
            out.push_back(64 * k + static_cast<std::size_t>(std::countr_zero(w)));
        }
    }
    return out;
}

std::uint64_t VertexSubset::to_mask() const
{
    if (universe_ > 64) {
        throw SizeLimit("bit masks cover at most 64 vertices");
    }
    return words_.empty() ? 0 : words_[0];
}

VertexSubset VertexSubset::complement() const
{
    VertexSubset s = *this;
    for (auto& w : s.words_) {
        w = ~w;
    }
    if (universe_ % 64 != 0) {
        s.words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
    }
    return s;
}

VertexSubset VertexSubset::operator|(const VertexSubset& rhs) const
{
    require_same_universe(rhs);
    VertexSubset s = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) {
        s.words_[k] |= rhs.words_[k];
    }
    return s;
}

VertexSubset VertexSubset::operator&(const VertexSubset& rhs) const
{
    require_same_universe(rhs);
    VertexSubset s = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) {
        s.words_[k] &= rhs.words_[k];
    }
    return s;
}

VertexSubset VertexSubset::operator-(const VertexSubset& rhs) const
{
    require_same_universe(rhs);
    VertexSubset s = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) {
        s.words_[k] &= ~rhs.words_[k];
    }
    return s;
}

bool VertexSubset::is_subset_of(const VertexSubset& rhs) const
{
    require_same_universe(rhs);
    for (std::size_t k = 0; k < words_.size(); ++k) {
        if ((words_[k] & ~rhs.words_[k]) != 0) {
            return false;
        }
    }
    return true;
}

bool VertexSubset::operator<(const VertexSubset& rhs) const
{
    return indices() < rhs.indices();
}

double bilinear_form(const WeightedGraph& g, std::span<const double> f, std::span<const double> h)
{
    require_length(g, f, "bilinear_form");
    require_length(g, h, "bilinear_form");
    double s = 0.0;
    for (const auto& e : g.edges()) {
        s += e.weight * (f[e.u] - f[e.v]) * (h[e.u] - h[e.v]);
    }
    const auto& c = g.killing();
    for (std::size_t x = 0; x < g.size(); ++x) {
        s += c[x] * f[x] * h[x];
    }
    return s;
}

double quadratic_form(const WeightedGraph& g, std::span<const double> f)
{
    require_length(g, f, "quadratic_form");
    double s = 0.0;
    for (const auto& e : g.edges()) {
        const double d = f[e.u] - f[e.v];
        s += e.weight * d * d;
    }
    const auto& c = g.killing();
    for (std::size_t x = 0; x < g.size(); ++x) {
        s += c[x] * f[x] * f[x];
    }
    return s;
}

double m_inner(const WeightedGraph& g, std::span<const double> f, std::span<const double> h)
{
    require_length(g, f, "m_inner");
    require_length(g, h, "m_inner");
    const auto& m = g.measure();
    double s = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
        s += f[x] * h[x] * m[x];
    }
    return s;
}

double m_norm(const WeightedGraph& g, std::span<const double> f)
{
    return std::sqrt(m_inner(g, f, f));
}

namespace {

Matrix stiffness_matrix(const WeightedGraph& g)
{
    const std::size_t n = g.size();
    Matrix a(n, n);
    for (std::size_t x = 0; x < n; ++x) {
        a(x, x) = g.killing()[x] + g.degree(x);
    }
    for (const auto& e : g.edges()) {
        a(e.u, e.v) = -e.weight;
        a(e.v, e.u) = -e.weight;
    }
    return a;
}

Matrix symmetrized_matrix(const WeightedGraph& g, const Matrix& a)
{
    const std::size_t n = g.size();
    Vector root(n);
    for (std::size_t x = 0; x < n; ++x) {
        root[x] = std::sqrt(g.measure()[x]);
    }
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s(i, j) = a(i, j) / (root[i] * root[j]);
        }
    }
    return s;
}

} // namespace

FormOperator::FormOperator(WeightedGraph g)
    : graph_(std::move(g)),
      stiffness_(stiffness_matrix(graph_)),
      symmetrized_(symmetrized_matrix(graph_, stiffness_.matrix()))
{
}

Vector FormOperator::apply_generator(std::span<const double> f) const
{
    require_length(graph_, f, "apply_generator");
    Vector out = stiffness_ * f;
    for (std::size_t x = 0; x < out.size(); ++x) {
        out[x] /= graph_.measure()[x];
    }
    return out;
}

FormOperator assemble_operator(const WeightedGraph& g)
{
    return FormOperator(g);
}

WeightedGraph restrict(const WeightedGraph& g, const VertexSubset& a)
{
    if (a.universe() != g.size()) {
        throw DimensionError("restrict: subset belongs to a different vertex set");
    }
    const auto idx = a.indices();
    if (idx.empty()) {
        throw EmptySubset("restrict: empty vertex subset");
    }
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> local(g.size(), npos);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        local[idx[k]] = k;
    }

    std::vector<std::string> labels;
    Vector measure;
    Vector killing;
    for (auto x : idx) {
        labels.push_back(g.label(x));
        measure.push_back(g.measure()[x]);
        double c = g.killing()[x];
        for (const auto& nb : g.neighbors(x)) {
            if (local[nb.vertex] == npos) {
                c += nb.weight;
            }
        }
        killing.push_back(c);
    }
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) {
        if (local[e.u] != npos && local[e.v] != npos) {
            edges.push_back({local[e.u], local[e.v], e.weight});
        }
    }
    return WeightedGraph(std::move(labels), std::move(measure), std::move(killing), std::move(edges));
}

Vector restrict_vector(std::span<const double> f, const VertexSubset& a)
{
    if (f.size() != a.universe()) {
        throw DimensionError("restrict_vector: length mismatch");
    }
    Vector out;
    for (auto x : a.indices()) {
        out.push_back(f[x]);
    }
    return out;
}

Vector extend_by_zero(std::span<const double> h, const VertexSubset& a)
{
    const auto idx = a.indices();
    if (h.size() != idx.size()) {
        throw DimensionError("extend_by_zero: length mismatch");
    }
    Vector out(a.universe(), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out[idx[k]] = h[k];
    }
    return out;
}

Vector mask_vector(std::span<const double> f, const VertexSubset& a)
{
    if (f.size() != a.universe()) {
        throw DimensionError("mask_vector: length mismatch");
    }
    Vector out(f.size(), 0.0);
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (a.contains(x)) {
            out[x] = f[x];
        }
    }
    return out;
}

Vector positive_part(std::span<const double> f)
{
    Vector out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = std::max(f[i], 0.0);
    }
    return out;
}

Vector negative_part(std::span<const double> f)
{
    Vector out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = std::max(-f[i], 0.0);
    }
    return out;
}

bool positivity_preserving_check(const WeightedGraph& g, int trials, std::uint64_t seed)
{
    if (trials < 1) {
        throw PreconditionError("positivity_preserving_check: trials must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector f(g.size());
    Vector abs_f(g.size());
    for (int t = 0; t < trials; ++t) {
        for (std::size_t x = 0; x < f.size(); ++x) {
            f[x] = dist(rng);
            abs_f[x] = std::abs(f[x]);
        }
        const double q = quadratic_form(g, f);
        if (quadratic_form(g, abs_f) > q + 1e-10 * (1.0 + std::abs(q))) {
            return false;
        }
    }
    return true;
}

} // namespace nodalforms
