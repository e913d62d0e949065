#ifndef NODALFORMS_SUITE_HPP
#define NODALFORMS_SUITE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nodalforms/elliptic.hpp"
#include "nodalforms/forms.hpp"
#include "nodalforms/nodal.hpp"
#include "nodalforms/spectral.hpp"

namespace nodalforms {

struct LemmaTally {
    std::size_t passed = 0;
    std::size_t failed = 0;
    /// First few failure descriptions.
    std::vector<std::string> failures;

    void record(bool ok, const std::string& detail = {});
    LemmaTally& operator+=(const LemmaTally& other);
};

using LemmaTallies = std::map<std::string, LemmaTally>;

struct SuiteOptions {
    double tau_rel = kDefaultTauRel;
    double cluster_tol = kDefaultClusterTol;
    int samples = 20;
    std::uint64_t seed = 0;
    /// Randomized trials per lemma; graphs above `large_graph` vertices use `large_trials`.
    int trials = 8;
    int large_trials = 2;
    std::size_t large_graph = 60;
    /// Vertex limits for the exhaustive subset checks.
    std::size_t transfer_limit = 8;
    std::size_t oracle_limit = 10;
};

/// Nodal counts over all eigenvalues and representatives of one graph.
struct CourantSummary {
    std::size_t reports = 0;
    std::size_t violations = 0;
    std::size_t tight = 0;               ///< l == n + k - 1
    std::size_t ambiguous_clusters = 0;
    std::size_t strong_checked = 0;      ///< simple eigenvalues, grids only
    std::size_t strong_violations = 0;   ///< findings, not failures
    double max_energy_defect = 0.0;
};

struct EntryResult {
    std::string name;
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::size_t components = 0;
    Vector eigenvalues;
    CourantSummary courant;
    LemmaTallies lemmas;
};

/// Seed for a named entry, independent of processing order.
std::uint64_t entry_seed(std::uint64_t seed, const std::string& name);

/// Every property check of the library on one graph. `grid` enables the
/// strong-bound bookkeeping.
EntryResult run_property_suite(const std::string& name, const WeightedGraph& g,
                               const std::optional<GridSpec>& grid, const SuiteOptions& options);

} // namespace nodalforms

#endif
