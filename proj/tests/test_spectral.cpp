#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nodalforms/errors.hpp"
#include "nodalforms/families.hpp"
#include "nodalforms/spectral.hpp"
#include "support.hpp"

using namespace nodalforms;
using nodalforms::testing::random_graph;
using nodalforms::testing::random_vector;

namespace {

EigenSystem spectrum_of(const WeightedGraph& g)
{
    return eigensystem(assemble_operator(g));
}

} // namespace

TEST_CASE("complete graph K3")
{
    const auto es = spectrum_of(complete_graph(3));
    CHECK(std::abs(es.values[0]) < 1e-12);
    CHECK(std::abs(es.values[1] - 3.0) < 1e-12);
    CHECK(std::abs(es.values[2] - 3.0) < 1e-12);
    REQUIRE(es.clusters.size() == 2);
    CHECK(es.clusters[0].start == 0);
    CHECK(es.clusters[0].count == 1);
    CHECK(es.clusters[1].start == 1);
    CHECK(es.clusters[1].count == 2);
    CHECK(std::abs(es.clusters[1].value - 3.0) < 1e-12);
    CHECK(multiplicity(es, 2).k == 2);
    CHECK(multiplicity(es, 2).first_index == 2);
}

TEST_CASE("single vertex with killing term")
{
    const WeightedGraph g({"x"}, {1}, {7}, {});
    const auto es = spectrum_of(g);
    REQUIRE(es.size() == 1);
    CHECK(es.values[0] == 7.0);
}

TEST_CASE("closed-form spectra of paths, cycles, complete graphs and stars")
{
    for (std::size_t n = 2; n <= 12; ++n) {
        // Free path: 2 - 2 cos(k pi / n), k = 0..n-1.
        const auto es = spectrum_of(path_graph(n));
        for (std::size_t k = 0; k < n; ++k) {
            const double expected = 2.0 - 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(n));
            CHECK(std::abs(es.values[k] - expected) <= 1e-12);
        }
        CHECK(es.clusters.size() == n);
    }
    for (std::size_t n = 3; n <= 12; ++n) {
        std::vector<double> expected;
        for (std::size_t k = 0; k < n; ++k) {
            expected.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
        }
        std::sort(expected.begin(), expected.end());
        const auto es = spectrum_of(cycle_graph(n));
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::abs(es.values[k] - expected[k]) <= 1e-12);
        }
    }
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto es = spectrum_of(complete_graph(n));
        CHECK(std::abs(es.values[0]) <= 1e-12);
        for (std::size_t k = 1; k < n; ++k) {
            CHECK(std::abs(es.values[k] - static_cast<double>(n)) <= 1e-12);
        }
        CHECK(multiplicity(es, n).k == n - 1);
    }
    for (std::size_t n = 3; n <= 12; ++n) {
        // Star K_{1,n-1}: 0, 1 with multiplicity n - 2, n.
        const auto es = spectrum_of(star_graph(n));
        CHECK(std::abs(es.values[0]) <= 1e-12);
        CHECK(std::abs(es.values[n - 1] - static_cast<double>(n)) <= 1e-12);
        CHECK(multiplicity(es, 2).k == n - 2);
    }
    CHECK(multiplicity(spectrum_of(star_graph(6)), 2).k == 4);
}

TEST_CASE("clustering and the ambiguity band")
{
    const Vector values{0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0 + 1e-6, 5.0};
    const auto c = cluster_spectrum(values, 1e-7);
    REQUIRE(c.size() == 5);
    CHECK(c[1].start == 1);
    CHECK(c[1].count == 2);
    CHECK_FALSE(c[0].ambiguous);
    CHECK_FALSE(c[1].ambiguous);
    // A gap of 1e-6 is above the 3e-7 threshold but inside the band.
    CHECK(c[2].ambiguous);
    CHECK(c[3].ambiguous);
    CHECK_FALSE(c[4].ambiguous);
    CHECK_THROWS_AS(cluster_spectrum(values, 0.0), PreconditionError);
}

TEST_CASE("resolvent examples")
{
    const WeightedGraph single({"x"}, {1}, {0}, {});
    const auto r = resolvent(assemble_operator(single), 1.0);
    CHECK(r.matrix(0, 0) == 1.0);
    CHECK_THROWS_AS(resolvent(assemble_operator(single), 0.0), PreconditionError);
    CHECK_THROWS_AS(resolvent(assemble_operator(single), -1.0), PreconditionError);
}

TEST_CASE("rayleigh quotient")
{
    const auto g = path_graph(3);
    const auto op = assemble_operator(g);
    const auto es = eigensystem(op);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(rayleigh(op, es.vector(j)) - es.values[j]) <= 1e-12);
    }
    // v1 + v2 with lambda = 0, 1 and m-orthonormal vectors.
    Vector v = es.vector(0);
    const Vector v2 = es.vector(1);
    for (std::size_t x = 0; x < 3; ++x) {
        v[x] += v2[x];
    }
    CHECK(std::abs(rayleigh(op, v) - 0.5) <= 1e-12);
    CHECK(rayleigh(op, Vector{2, 2, 2}) == 0.0);
    CHECK_THROWS_AS(rayleigh(op, Vector{0, 0, 0}), ZeroVector);
}

TEST_CASE("variational principle")
{
    const auto es = spectrum_of(path_graph(5));
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto at = check_variational(es, es.vector(n - 1), n);
        CHECK(at.holds);
        CHECK(at.is_eigen_if_equal);
        if (n < 5) {
            const auto next = check_variational(es, es.vector(n), n);
            CHECK(next.holds);
            CHECK_FALSE(next.is_eigen_if_equal);
        }
    }
    CHECK_THROWS_AS(check_variational(es, es.vector(0), 2), PreconditionError);
    CHECK_THROWS_AS(check_variational(es, Vector(5, 0.0), 1), ZeroVector);
    CHECK_THROWS_AS(check_variational(es, es.vector(0), 6), IndexError);
    CHECK_THROWS_AS(multiplicity(es, 0), IndexError);
    CHECK_THROWS_AS(multiplicity(es, 6), IndexError);
}

TEST_CASE("property: random vectors in the upper eigenspaces satisfy the variational bound")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_graph(rng, 20);
        const auto es = spectrum_of(g);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, g.size())(rng);
        Vector v(g.size(), 0.0);
        for (std::size_t j = n - 1; j < g.size(); ++j) {
            const double c = std::normal_distribution<double>()(rng);
            for (std::size_t x = 0; x < g.size(); ++x) {
                v[x] += c * es.vectors(x, j);
            }
        }
        CHECK(check_variational(es, v, n).holds);
    }
}

TEST_CASE("property: eigensystem invariants on random graphs")
{
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = random_graph(rng, 25);
        const auto op = std::make_shared<const FormOperator>(assemble_operator(g));
        const auto es = eigensystem(op);
        const std::size_t n = g.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vector vi = es.vector(i);
            for (std::size_t j = 0; j < n; ++j) {
                const double ip = m_inner(g, vi, es.vectors.column(j));
                CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-9);
            }
            // Q(v_i, e_x) = lambda_i <v_i, e_x>_m for every basis vector.
            for (std::size_t x = 0; x < n; ++x) {
                Vector e(n, 0.0);
                e[x] = 1.0;
                const double lhs = bilinear_form(g, vi, e);
                const double rhs = es.values[i] * m_inner(g, vi, e);
                CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(es.values[i])) * (1.0 + std::abs(vi[x])));
            }
        }
        // Clusters partition the index range and respect the gap rule.
        std::size_t covered = 0;
        for (std::size_t c = 0; c < es.clusters.size(); ++c) {
            const auto& cl = es.clusters[c];
            CHECK(cl.start == covered);
            covered += cl.count;
            for (std::size_t i = cl.start + 1; i < cl.start + cl.count; ++i) {
                CHECK(es.values[i] - es.values[i - 1] <= es.cluster_tol * (1.0 + std::abs(es.values[i - 1])));
            }
            if (c > 0) {
                CHECK(es.values[cl.start] - es.values[cl.start - 1] >
                      es.cluster_tol * (1.0 + std::abs(es.values[cl.start - 1])));
            }
        }
        CHECK(covered == n);

        for (double alpha : {0.5, 1.0, 2.0}) {
            const auto r = resolvent(*op, alpha);
            for (std::size_t i = 0; i < n; ++i) {
                for (double v : r.matrix.row(i)) {
                    CHECK(v >= -1e-12);
                }
                const Vector vi = es.vector(i);
                const Vector gv = r.apply(vi);
                Vector diff(n);
                for (std::size_t x = 0; x < n; ++x) {
                    diff[x] = gv[x] - vi[x] / (es.values[i] + alpha);
                }
                CHECK(m_norm(g, diff) <= 1e-8);
            }
            const Vector u = random_vector(rng, n);
            const Vector w = random_vector(rng, n);
            const Vector gu = r.apply(u);
            const double lhs = bilinear_form(g, gu, w) + alpha * m_inner(g, gu, w);
            CHECK(std::abs(lhs - m_inner(g, u, w)) <= 1e-9 * m_norm(g, u) * m_norm(g, w));
            const Vector direct = resolvent_apply(*op, alpha, u);
            CHECK(nodalforms::testing::max_abs_diff(direct, gu) <= 1e-12 * (1.0 + max_abs(gu)));
        }
        const auto g1 = resolvent(*op, 1.0);
        const auto g3 = resolvent(*op, 3.0);
        const Matrix lhs = g1.matrix - g3.matrix;
        const Matrix prod = g1.matrix * g3.matrix;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(std::abs(lhs(i, j) - 2.0 * prod(i, j)) <= 1e-9);
            }
        }
    }
}

TEST_CASE("property: alpha <f - alpha G f, f> increases to Q(f)")
{
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = random_graph(rng, 12);
        const auto op = assemble_operator(g);
        const Vector f = random_vector(rng, g.size());
        double previous = -1.0;
        double value = 0.0;
        for (int j = 0; j <= 20; ++j) {
            const double alpha = std::ldexp(1.0, j);
            const Vector gf = resolvent_apply(op, alpha, f);
            Vector d(f.size());
            for (std::size_t x = 0; x < f.size(); ++x) {
                d[x] = f[x] - alpha * gf[x];
            }
            value = alpha * m_inner(g, d, f);
            CHECK(value >= previous - 1e-10 * (1.0 + std::abs(previous)));
            previous = value;
        }
        const double q = quadratic_form(g, f);
        // Relative gap at alpha is about lambda_max / alpha; random graphs here stay below 100.
        CHECK(std::abs(value - q) <= 1e-4 * (1.0 + q));
    }
}
