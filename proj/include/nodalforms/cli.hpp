#ifndef NODALFORMS_CLI_HPP
#define NODALFORMS_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nodalforms/nodal.hpp"
#include "nodalforms/spectral.hpp"
#include "nodalforms/suite.hpp"

namespace nodalforms {

enum class Mode { spectrum, nodal, invariance, corpus, search_tight, grid };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitAmbiguous = 2;

struct RunConfig {
    std::filesystem::path input;
    Mode mode = Mode::spectrum;
    std::string n_range = "all";
    double tau = kDefaultTauRel;
    double cluster_tol = kDefaultClusterTol;
    double alpha = 1.0;
    int samples = 20;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    bool render = false;
    bool default_measure_one = false;
    /// search-tight only
    std::string family = "star";
    std::size_t max_size = 12;

    /// Throws PreconditionError on non-positive tolerances or alpha.
    void validate() const;
};

/// "all", "n" or "a..b" (1-based, inclusive), checked against dim.
std::vector<std::size_t> parse_n_range(const std::string& spec, std::size_t dim);

struct CorpusSummary {
    std::size_t entries = 0;
    LemmaTallies lemmas;
    std::vector<std::pair<std::string, std::string>> errors; ///< (input, message)
    std::size_t courant_reports = 0;
    std::size_t courant_violations = 0;
    std::size_t ambiguous_clusters = 0;
    std::size_t strong_checked = 0;
    std::size_t strong_violations = 0;

    bool all_pass() const;
};

/// Runs the property suite over a directory of graph/grid JSON files, or over
/// the built-in corpus when `dir` is "builtin". Writes one JSON per entry plus
/// summary.json into `config.out`.
CorpusSummary corpus_run(const std::string& dir, const RunConfig& config, std::ostream& log);

/// Executes one mode; returns 0 when every bound check passes, 2 when some
/// multiplicity is ambiguous and 1 on I/O, schema, numerical or bound failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace nodalforms

#endif
