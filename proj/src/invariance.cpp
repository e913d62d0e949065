#include "nodalforms/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_set>

#include "nodalforms/errors.hpp"
#include "nodalforms/union_find.hpp"

namespace nodalforms {

namespace {

void require_universe(const WeightedGraph& g, const VertexSubset& a)
{
    if (a.universe() != g.size()) {
        throw DimensionError("subset belongs to a vertex set of size " +
                             std::to_string(a.universe()) + ", graph has " +
                             std::to_string(g.size()));
    }
}

double commutator_norm_mask(const Matrix& g, std::uint64_t mask)
{
    const std::size_t n = g.rows();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool in_i = ((mask >> i) & 1U) != 0;
        double s = 0.0;
        auto row = g.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (in_i != (((mask >> j) & 1U) != 0)) {
                s += std::abs(row[j]);
            }
        }
        best = std::max(best, s);
    }
    return best;
}

/// Invariance verdict for every bit mask over the vertices of `g`.
std::vector<char> invariant_masks(const Resolvent& r, double tol)
{
    const std::size_t n = r.matrix.rows();
    const double threshold = tol * (1.0 + r.matrix.norm_inf());
    std::vector<char> out(std::size_t{1} << n);
    for (std::uint64_t mask = 0; mask < out.size(); ++mask) {
        out[mask] = commutator_norm_mask(r.matrix, mask) <= threshold ? 1 : 0;
    }
    return out;
}

/// Compresses the bits of `mask` selected by `support` into consecutive low bits.
std::uint64_t compress_bits(std::uint64_t mask, std::uint64_t support)
{
    std::uint64_t out = 0;
    int k = 0;
    for (int i = 0; i < 64; ++i) {
        if ((support >> i) & 1U) {
            if ((mask >> i) & 1U) {
                out |= std::uint64_t{1} << k;
            }
            ++k;
        }
    }
    return out;
}

} // namespace

double commutator_norm(const Resolvent& r, const VertexSubset& a)
{
    const std::size_t n = r.matrix.rows();
    if (a.universe() != n) {
        throw DimensionError("commutator_norm: subset size mismatch");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (a.contains(i) != a.contains(j)) {
                s += std::abs(r.matrix(i, j));
            }
        }
        best = std::max(best, s);
    }
    return best;
}

InvarianceCertificate is_invariant_resolvent(const WeightedGraph& g, const Resolvent& r,
                                             const VertexSubset& a, double tol)
{
    require_universe(g, a);
    if (!(tol > 0.0)) {
        throw PreconditionError("invariance tolerance must be positive");
    }
    InvarianceCertificate cert;
    cert.subset = a;
    cert.alpha_tested = r.alpha;
    cert.commutator_norm = commutator_norm(r, a);
    cert.threshold = tol * (1.0 + r.matrix.norm_inf());
    for (const auto& e : g.edges()) {
        if (a.contains(e.u) != a.contains(e.v)) {
            const bool u_in = a.contains(e.u);
            cert.crossing_edges.push_back({u_in ? e.u : e.v, u_in ? e.v : e.u, e.weight});
        }
    }
    return cert;
}

InvarianceCertificate is_invariant_resolvent(const FormOperator& op, const VertexSubset& a,
                                             double alpha, double tol)
{
    return is_invariant_resolvent(op.graph(), resolvent(op, alpha), a, tol);
}

bool is_invariant_combinatorial(const WeightedGraph& g, const VertexSubset& a)
{
    require_universe(g, a);
    return std::none_of(g.edges().begin(), g.edges().end(),
                        [&](const Edge& e) { return a.contains(e.u) != a.contains(e.v); });
}

std::size_t ComponentPartition::component_of(std::size_t x) const
{
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].contains(x)) {
            return i;
        }
    }
    throw IndexError("vertex " + std::to_string(x) + " is in no component");
}

namespace {

ComponentPartition partition_from(UnionFind& uf, std::size_t n)
{
    ComponentPartition out;
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> slot(n, npos);
    for (std::size_t x = 0; x < n; ++x) {
        const std::size_t root = uf.find(x);
        if (slot[root] == npos) {
            slot[root] = out.components.size();
            out.components.emplace_back(n);
        }
        out.components[slot[root]].insert(x);
    }
    return out;
}

} // namespace

ComponentPartition connected_components(const WeightedGraph& g)
{
    UnionFind uf(g.size());
    for (const auto& e : g.edges()) {
        uf.unite(e.u, e.v);
    }
    return partition_from(uf, g.size());
}

bool is_irreducible(const WeightedGraph& g)
{
    return connected_components(g).size() == 1;
}

ComponentPartition resolvent_support_partition(const Resolvent& r, double tol)
{
    const std::size_t n = r.matrix.rows();
    const double threshold = tol * r.matrix.max_abs();
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(r.matrix(i, j)) > threshold || std::abs(r.matrix(j, i)) > threshold) {
                uf.unite(i, j);
            }
        }
    }
    return partition_from(uf, n);
}

double resolvent_lower_ratio(const Resolvent& g1, std::span<const double> f)
{
    const Vector gf = g1.apply(f);
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < f.size(); ++x) {
        c = std::min(c, gf[x] / f[x]);
    }
    return c;
}

ComponentPartition gerlach_decompose(const FormOperator& op, std::span<const double> f, double tol)
{
    if (f.size() != op.dim()) {
        throw DimensionError("gerlach_decompose: length mismatch");
    }
    for (double v : f) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw PreconditionError("gerlach_decompose: f must be strictly positive");
        }
    }
    const Resolvent g1 = resolvent(op, 1.0);
    const double c = resolvent_lower_ratio(g1, f);
    if (!(c > tol)) {
        throw HypothesisNotMet("gerlach_decompose: G_1 f >= c f only holds with c = " +
                               std::to_string(c));
    }
    auto components = connected_components(op.graph());
    if (!(resolvent_support_partition(g1, tol) == components)) {
        throw Error("gerlach_decompose: resolvent support disagrees with graph components");
    }
    return components;
}

std::vector<VertexSubset> atoms(const std::vector<VertexSubset>& family)
{
    std::vector<VertexSubset> out;
    for (const auto& s : family) {
        if (s.empty()) {
            continue;
        }
        const bool minimal = std::none_of(family.begin(), family.end(), [&](const VertexSubset& t) {
            return !t.empty() && t != s && t.is_subset_of(s);
        });
        if (minimal && std::find(out.begin(), out.end(), s) == out.end()) {
            out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VertexSubset> invariant_subsets_bruteforce(const FormOperator& op, double alpha, double tol)
{
    const std::size_t n = op.dim();
    if (n > kBruteForceLimit) {
        throw SizeLimit("invariant_subsets_bruteforce: " + std::to_string(n) +
                        " vertices exceeds the limit of " + std::to_string(kBruteForceLimit));
    }
    const auto flags = invariant_masks(resolvent(op, alpha), tol);
    std::vector<std::uint64_t> masks;
    for (std::uint64_t mask = 0; mask < flags.size(); ++mask) {
        if (flags[mask]) {
            masks.push_back(mask);
        }
    }

    // Closure check through atoms: the atom of x is the intersection of all
    // members containing x. The family is a sigma-algebra iff every atom is a
    // member, every member is a union of atoms, and there are 2^#atoms members.
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    std::vector<std::uint64_t> atom_of(n, full);
    for (auto mask : masks) {
        for (std::size_t x = 0; x < n; ++x) {
            if ((mask >> x) & 1U) {
                atom_of[x] &= mask;
            }
        }
    }
    std::vector<std::uint64_t> distinct(atom_of.begin(), atom_of.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    bool closed = masks.size() == (std::size_t{1} << distinct.size());
    for (auto atom : distinct) {
        closed = closed && flags[atom];
    }
    for (auto mask : masks) {
        closed = closed && flags[full & ~mask];
        for (auto atom : distinct) {
            const auto cut = mask & atom;
            closed = closed && (cut == 0 || cut == atom);
        }
    }
    if (!closed) {
        throw Error("invariant subsets are not closed under complement and intersection");
    }

    std::vector<VertexSubset> out;
    out.reserve(masks.size());
    for (auto mask : masks) {
        out.push_back(VertexSubset::from_mask(n, mask));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Matrix q_projection(const FormOperator& op, const VertexSubset& a)
{
    require_universe(op.graph(), a);
    const auto idx = a.indices();
    if (idx.empty()) {
        throw EmptySubset("q_projection: empty subset");
    }
    const std::size_t n = op.dim();
    Matrix k = op.stiffness().matrix();
    for (std::size_t x = 0; x < n; ++x) {
        k(x, x) += op.measure()[x];
    }
    Matrix kaa(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            kaa(i, j) = k(idx[i], idx[j]);
        }
    }
    // Normal equations: K_AA p_A = (K f)_A for the minimizer of ||f - p||_{Q,1} over p = 0 off A.
    const Cholesky chol{DenseSymMatrix(std::move(kaa))};
    Matrix p(n, n);
    Vector rhs(idx.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            rhs[i] = k(idx[i], j);
        }
        const Vector col = chol.solve(rhs);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            p(idx[i], j) = col[i];
        }
    }
    return p;
}

Matrix restricted_resolvent(const FormOperator& op, const VertexSubset& a, double alpha)
{
    const auto sub = FormOperator(restrict(op.graph(), a));
    const auto r = resolvent(sub, alpha);
    const auto idx = a.indices();
    Matrix out(op.dim(), op.dim());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(idx[i], idx[j]) = r.matrix(i, j);
        }
    }
    return out;
}

bool projection_domination_check(const FormOperator& op, const VertexSubset& a, int trials,
                                 std::uint64_t seed)
{
    if (trials < 1) {
        throw PreconditionError("projection_domination_check: trials must be >= 1");
    }
    const Matrix p = q_projection(op, a);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    std::bernoulli_distribution zero(0.25);
    Vector f(op.dim());
    for (int t = 0; t < trials; ++t) {
        for (auto& v : f) {
            v = zero(rng) ? 0.0 : value(rng);
        }
        const Vector pf = p * f;
        for (std::size_t x = 0; x < f.size(); ++x) {
            if (pf[x] > f[x] + 1e-9) {
                return false;
            }
        }
    }
    return true;
}

namespace {

VertexSubset to_local(const VertexSubset& s, const VertexSubset& a)
{
    const auto idx = a.indices();
    VertexSubset out(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (s.contains(idx[k])) {
            out.insert(k);
        }
    }
    return out;
}

} // namespace

TransferCheck invariance_transfer_check(const WeightedGraph& g, const VertexSubset& a,
                                        const VertexSubset& b, double alpha, double tol)
{
    require_universe(g, a);
    require_universe(g, b);
    TransferCheck out;
    if (a.empty()) {
        return out;
    }
    const FormOperator op(g);
    const Resolvent r = resolvent(op, alpha);
    const WeightedGraph ga = restrict(g, a);
    const Resolvent ra = resolvent(FormOperator(ga), alpha);
    const VertexSubset ab = a & b;

    const bool a_inv = is_invariant_resolvent(g, r, a, tol).invariant();
    const bool b_inv = is_invariant_resolvent(g, r, b, tol).invariant();
    const bool ab_inv = is_invariant_resolvent(g, r, ab, tol).invariant();
    const bool ab_inv_in_a = is_invariant_resolvent(ga, ra, to_local(ab, a), tol).invariant();

    out.lift_applies = a_inv && ab_inv_in_a;
    out.lift_holds = !out.lift_applies || ab_inv;
    out.descend_applies = b_inv;
    out.descend_holds = !out.descend_applies || ab_inv_in_a;
    return out;
}

TransferSummary invariance_transfer_exhaustive(const WeightedGraph& g, double alpha, double tol)
{
    const std::size_t n = g.size();
    if (n > 12) {
        throw SizeLimit("invariance_transfer_exhaustive: at most 12 vertices");
    }
    const FormOperator op(g);
    const auto global = invariant_masks(resolvent(op, alpha), tol);
    const std::uint64_t count = std::uint64_t{1} << n;

    TransferSummary summary;
    for (std::uint64_t amask = 0; amask < count; ++amask) {
        if (amask == 0) {
            summary.pairs += count;
            continue;
        }
        const auto a = VertexSubset::from_mask(n, amask);
        const auto local = invariant_masks(resolvent(FormOperator(restrict(g, a)), alpha), tol);
        for (std::uint64_t bmask = 0; bmask < count; ++bmask) {
            ++summary.pairs;
            const std::uint64_t ab = amask & bmask;
            const bool ab_inv_in_a = local[compress_bits(ab, amask)] != 0;
            if (global[amask] && ab_inv_in_a) {
                ++summary.lift_applied;
                if (!global[ab]) {
                    ++summary.failures;
                }
            }
            if (global[bmask]) {
                ++summary.descend_applied;
                if (!ab_inv_in_a) {
                    ++summary.failures;
                }
            }
        }
    }
    return summary;
}

} // namespace nodalforms
