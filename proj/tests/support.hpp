#ifndef NODALFORMS_TESTS_SUPPORT_HPP
#define NODALFORMS_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nodalforms/families.hpp"
#include "nodalforms/linalg.hpp"

namespace nodalforms::testing {

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Vector v(n);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            m(i, j) = m(j, i) = d(rng);
        }
    }
    return m;
}

/// Random graph of 1..max_n vertices, possibly disconnected.
inline WeightedGraph random_graph(std::mt19937_64& rng, std::size_t max_n)
{
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
    std::bernoulli_distribution split(0.3);
    if (n >= 2 && split(rng)) {
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
        return disjoint_union(random_connected_graph(k, rng()), random_connected_graph(n - k, rng()));
    }
    return random_connected_graph(n, rng());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace nodalforms::testing

#endif
