#include <doctest.h>

#include <random>

#include "nodalforms/errors.hpp"
#include "nodalforms/families.hpp"
#include "nodalforms/invariance.hpp"
#include "support.hpp"

using namespace nodalforms;
using nodalforms::testing::random_graph;

namespace {

WeightedGraph two_edges()
{
    // 0 - 1   2 - 3
    return WeightedGraph::with_unit_measure(4, {{0, 1, 1.0}, {2, 3, 1.0}});
}

VertexSubset subset(std::size_t n, std::initializer_list<std::size_t> idx)
{
    const std::vector<std::size_t> v(idx);
    return VertexSubset::from_indices(n, v);
}

VertexSubset random_subset(std::mt19937_64& rng, std::size_t n)
{
    VertexSubset s(n);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t x = 0; x < n; ++x) {
        if (coin(rng)) {
            s.insert(x);
        }
    }
    return s;
}

} // namespace

TEST_CASE("empty set and whole set are invariant")
{
    const auto op = assemble_operator(path_graph(5));
    CHECK(is_invariant_resolvent(op, VertexSubset(5)).invariant());
    CHECK(is_invariant_resolvent(op, VertexSubset::full(5)).invariant());
    CHECK(is_invariant_combinatorial(op.graph(), VertexSubset(5)));
}

TEST_CASE("components of two disjoint edges")
{
    const auto g = two_edges();
    const auto op = assemble_operator(g);
    const auto cert = is_invariant_resolvent(op, subset(4, {0, 1}));
    CHECK(cert.invariant());
    CHECK(cert.invariant_combinatorial());
    CHECK(cert.commutator_norm <= 1e-15);

    const auto part = connected_components(g);
    REQUIRE(part.size() == 2);
    CHECK(part.components[0] == subset(4, {0, 1}));
    CHECK(part.components[1] == subset(4, {2, 3}));
    CHECK(part.component_of(3) == 1);
    CHECK_FALSE(is_irreducible(g));
}

TEST_CASE("a single endpoint of an edge is not invariant")
{
    const auto g = path_graph(2);
    const auto cert = is_invariant_resolvent(assemble_operator(g), subset(2, {0}));
    CHECK_FALSE(cert.invariant());
    REQUIRE(cert.crossing_edges.size() == 1);
    CHECK(cert.crossing_edges[0].inside == 0);
    CHECK(cert.crossing_edges[0].outside == 1);
    CHECK(cert.crossing_edges[0].weight == 1.0);
    // G_1 of P2 is [[2,1],[1,2]]/3, so the commutator has inf-norm 1/3.
    CHECK(std::abs(cert.commutator_norm - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("irreducibility")
{
    CHECK(is_irreducible(complete_graph(4)));
    CHECK(is_irreducible(WeightedGraph::with_unit_measure(1, {})));
    CHECK_FALSE(is_irreducible(WeightedGraph::with_unit_measure(3, {})));
}

TEST_CASE("invariance errors")
{
    const auto op = assemble_operator(path_graph(3));
    CHECK_THROWS_AS(is_invariant_resolvent(op, VertexSubset(4)), DimensionError);
    CHECK_THROWS_AS(is_invariant_resolvent(op, VertexSubset(3), 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(q_projection(op, VertexSubset(3)), EmptySubset);
    CHECK_THROWS_AS(projection_domination_check(op, VertexSubset::full(3), 0, 1), PreconditionError);
}

TEST_CASE("decomposition from a positive function")
{
    const auto g = two_edges();
    const auto op = assemble_operator(g);
    const auto part = gerlach_decompose(op, Vector{1, 2, 3, 4});
    CHECK(part == connected_components(g));

    CHECK_THROWS_AS(gerlach_decompose(op, Vector{1, 0, 1, 1}), PreconditionError);
    CHECK_THROWS_AS(gerlach_decompose(op, Vector{1, 1, 1}), DimensionError);

    // G_1 = 1/(1 + 1e12) is below the tolerance.
    const WeightedGraph heavy({"x"}, {1}, {1e12}, {});
    CHECK_THROWS_AS(gerlach_decompose(assemble_operator(heavy), Vector{1}), HypothesisNotMet);
}

TEST_CASE("long path: far resolvent entries fall below tolerance, closure keeps one component")
{
    const auto op = assemble_operator(path_graph(30));
    const auto r = resolvent(op, 1.0);
    CHECK(r.matrix(0, 29) < 1e-9 * r.matrix.max_abs());
    const auto part = gerlach_decompose(op, Vector(30, 1.0));
    CHECK(part.size() == 1);
    CHECK(resolvent_support_partition(r).size() == 1);
}

TEST_CASE("brute-force invariant subsets")
{
    const auto connected = invariant_subsets_bruteforce(assemble_operator(path_graph(3)));
    REQUIRE(connected.size() == 2);
    CHECK(connected[0].empty());
    CHECK(connected[1] == VertexSubset::full(3));

    const auto g = two_edges();
    const auto family = invariant_subsets_bruteforce(assemble_operator(g));
    CHECK(family.size() == 4);
    CHECK(atoms(family) == connected_components(g).components);

    CHECK_THROWS_AS(invariant_subsets_bruteforce(assemble_operator(path_graph(21))), SizeLimit);
}

TEST_CASE("projection onto the whole set is the identity")
{
    const auto op = assemble_operator(random_connected_graph(7, 5));
    const Matrix p = q_projection(op, VertexSubset::full(7));
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 7; ++j) {
            CHECK(std::abs(p(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-12);
        }
    }
}

TEST_CASE("transfer examples on two disjoint edges")
{
    const auto g = two_edges();
    // A = {0,1} invariant; A cap B = {0} is not invariant in the restriction to A.
    auto t = invariance_transfer_check(g, subset(4, {0, 1}), subset(4, {0, 2}));
    CHECK_FALSE(t.lift_applies);
    CHECK_FALSE(t.descend_applies);
    CHECK(t.holds());

    // B = {2,3} invariant, so A cap B = {2} is invariant in the restriction to A = {0,1,2}.
    t = invariance_transfer_check(g, subset(4, {0, 1, 2}), subset(4, {2, 3}));
    CHECK(t.descend_applies);
    CHECK(t.descend_holds);

    // A = {0,1,2,3}, B = {0,1}: both parts apply.
    t = invariance_transfer_check(g, VertexSubset::full(4), subset(4, {0, 1}));
    CHECK(t.lift_applies);
    CHECK(t.descend_applies);
    CHECK(t.holds());

    CHECK_THROWS_AS(invariance_transfer_exhaustive(path_graph(13)), SizeLimit);
}

TEST_CASE("property: resolvent and combinatorial invariance agree")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = random_graph(rng, 15);
        const auto op = assemble_operator(g);
        const double alpha = std::ldexp(1.0, std::uniform_int_distribution<int>(-2, 3)(rng));
        const auto s = random_subset(rng, g.size());
        const auto cert = is_invariant_resolvent(op, s, alpha);
        CHECK(cert.consistent());
        CHECK(cert.invariant() == is_invariant_combinatorial(g, s));
    }
}

TEST_CASE("property: brute-force family is the lattice generated by components")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = random_graph(rng, 9);
        const auto family = invariant_subsets_bruteforce(assemble_operator(g));
        const auto part = connected_components(g);
        CHECK(family.size() == (std::size_t{1} << part.size()));
        CHECK(atoms(family) == part.components);
        for (const auto& s : family) {
            CHECK(std::find(family.begin(), family.end(), s.complement()) != family.end());
        }
    }
}

TEST_CASE("property: projections are idempotent, dominated and match restricted resolvents")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = random_graph(rng, 12);
        const auto op = assemble_operator(g);
        auto a = random_subset(rng, g.size());
        if (a.empty()) {
            a.insert(0);
        }
        const Matrix p = q_projection(op, a);
        const Matrix pp = p * p;
        CHECK((pp - p).max_abs() <= 1e-10 * (1.0 + p.max_abs()));
        CHECK(projection_domination_check(op, a, 10, rng()));

        // P_A f = G_1^A applied to (f + L f) restricted to A, as n x n matrices.
        const Matrix ga = restricted_resolvent(op, a, 1.0);
        const auto f = nodalforms::testing::random_vector(rng, g.size());
        Vector k_f = op.apply_generator(f);
        for (std::size_t x = 0; x < f.size(); ++x) {
            k_f[x] += f[x];
        }
        const Vector lhs = p * f;
        const Vector rhs = ga * k_f;
        CHECK(nodalforms::testing::max_abs_diff(lhs, rhs) <= 1e-9 * (1.0 + max_abs(lhs)));
        for (std::size_t x = 0; x < f.size(); ++x) {
            if (!a.contains(x)) {
                CHECK(lhs[x] == 0.0);
            }
        }
    }
}

TEST_CASE("property: exhaustive transfer on small graphs")
{
    std::mt19937_64 rng(44);
    std::size_t applied_a = 0;
    std::size_t applied_b = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const auto g = random_graph(rng, 7);
        const auto s = invariance_transfer_exhaustive(g);
        CHECK(s.failures == 0);
        CHECK(s.pairs == (std::size_t{1} << (2 * g.size())));
        applied_a += s.lift_applied;
        applied_b += s.descend_applied;
    }
    CHECK(applied_a > 0);
    CHECK(applied_b > 0);
}
