// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "nodalforms/cli.hpp"
#include "nodalforms/elliptic.hpp"
#include "nodalforms/families.hpp"
#include "nodalforms/io.hpp"
#include "nodalforms/nodal.hpp"

using namespace nodalforms;
namespace fs = std::filesystem;

namespace {

constexpr double kMaxCorpusSeconds = 120.0;
constexpr std::size_t kMinLemmaInstances = 500;
constexpr int kSumDraws = 1000;
constexpr double kSumTol = 1e-9;
constexpr double kGround1dRelTol = 0.01;
constexpr double kSquareAbsTol = 1e-8;
constexpr std::size_t kStrongMaxN = 10;
constexpr std::uint64_t kSeed = 20240601;

int failures = 0;

void verdict(int id, bool ok, const std::string& what, const std::string& detail)
{
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << detail << ")\n";
    if (!ok) {
        ++failures;
    }
}

std::string tally_text(const LemmaTallies& lemmas, const std::string& name)
{
    const auto it = lemmas.find(name);
    if (it == lemmas.end()) {
        return name + " missing";
    }
    return name + " " + std::to_string(it->second.passed) + "/" +
           std::to_string(it->second.passed + it->second.failed);
}

bool tally_ok(const LemmaTallies& lemmas, const std::string& name, std::size_t minimum)
{
    const auto it = lemmas.find(name);
    return it != lemmas.end() && it->second.failed == 0 && it->second.passed >= minimum;
}

std::map<std::string, std::string> json_files(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& de : fs::recursive_directory_iterator(root)) {
        if (de.is_regular_file() && de.path().extension() == ".json") {
            out[fs::relative(de.path(), root).string()] = read_text_file(de.path());
        }
    }
    return out;
}

CorpusSummary run_corpus(const fs::path& out, double& seconds)
{
    RunConfig config;
    config.mode = Mode::corpus;
    config.seed = kSeed;
    config.out = out;
    std::ostringstream log;
    const auto start = std::chrono::steady_clock::now();
    auto s = corpus_run("builtin", config, log);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

void courant_universality(const CorpusSummary& s, double seconds)
{
    std::size_t largest = 0;
    for (const auto& e : builtin_corpus(kSeed)) {
        largest = std::max(largest, e.graph.size());
    }
    const bool ok = s.errors.empty() && s.courant_reports > 0 && s.courant_violations == 0 &&
                    seconds <= kMaxCorpusSeconds && largest <= 400;
    std::ostringstream d;
    d << s.entries << " graphs up to " << largest << " vertices, " << s.courant_violations << " violations in "
      << s.courant_reports << " reports, " << std::fixed << std::setprecision(1) << seconds << " s";
    verdict(1, ok, "l <= n + k - 1 across the corpus", d.str());
}

void star_tightness()
{
    bool ok = true;
    std::size_t checked = 0;
    for (std::size_t size = 4; size <= 12; ++size) {
        const auto es = eigensystem(assemble_operator(star_graph(size)));
        const Vector f = star_alternating_leaves(size);
        const Vector lf = es.op->apply_generator(f);
        double residual = 0.0;
        for (std::size_t x = 0; x < size; ++x) {
            residual = std::max(residual, std::abs(lf[x] - es.values[1] * f[x]));
        }
        const auto r = courant_check_vector(es, 2, f);
        ok = ok && residual <= 1e-12 && r.k == size - 2 && r.l == size - 1 && r.l == r.bound;
        ++checked;
    }
    verdict(2, ok, "alternating-leaf star eigenfunction attains l = n + k - 1",
            std::to_string(checked) + " stars K_{1,3}..K_{1,11}");
}

void path_exactness()
{
    bool ok = true;
    std::size_t reports = 0;
    std::size_t zero_vertices = 0;
    for (std::size_t size = 2; size <= 12; ++size) {
        const auto es = eigensystem(assemble_operator(path_graph(size)));
        for (std::size_t n = 1; n <= size; ++n) {
            const auto r = courant_check(es, n, 1e-9);
            // Sign changes of cos((n-1) pi (x + 1/2) / N) along the path, skipping exact zeros.
            std::size_t changes = 0;
            double last = 0.0;
            for (std::size_t x = 0; x < size; ++x) {
                const std::size_t q = (n - 1) * (2 * x + 1);
                const bool vanishes = q % size == 0 && (q / size) % 2 == 1;
                ok = ok && r.decomposition.sign_pattern.zero.contains(x) == vanishes;
                if (vanishes) {
                    ++zero_vertices;
                    continue;
                }
                const double c = std::cos(static_cast<double>(n - 1) * std::numbers::pi *
                                          (static_cast<double>(x) + 0.5) / static_cast<double>(size));
                if (last != 0.0 && (c > 0) != (last > 0)) {
                    ++changes;
                }
                last = c;
            }
            ok = ok && r.k == 1 && r.l == n && r.l == changes + 1;
            ++reports;
        }
    }
    verdict(3, ok, "path eigenfunctions have exactly n domains",
            std::to_string(reports) + " reports on P_2..P_12; zero sets only at the " + std::to_string(zero_vertices) +
                " exact cosine zeros");
}

void lemma_suites(const CorpusSummary& s)
{
    const std::vector<std::string> names{"resolvent_positivity", "sign_parts_cross_form",  "resolvent_form_identity", "resolvent_identity",
                                         "eigen_resolvent_equivalence", "invariant_splitting", "noninvariant_splitting_fails", "projection_resolvent",
                                         "projection_domination",  "restricted_resolvent_block",      "invariance_transfer"};
    bool ok = true;
    std::string detail;
    for (const auto& name : names) {
        ok = ok && tally_ok(s.lemmas, name, kMinLemmaInstances);
        detail += (detail.empty() ? "" : ", ") + tally_text(s.lemmas, name);
    }
    ok = ok && tally_ok(s.lemmas, "invariance_transfer_lift_exercised", 1) &&
         tally_ok(s.lemmas, "invariance_transfer_descend_exercised", 1);
    verdict(4, ok, "randomized lemma suites", detail);
}

void invariance_oracle(const CorpusSummary& s)
{
    std::size_t small = 0;
    for (const auto& e : builtin_corpus(kSeed)) {
        small += e.graph.size() <= 10 ? 1 : 0;
    }
    const auto sigma = s.lemmas.find("sigma_algebra");
    const bool ok = tally_ok(s.lemmas, "invariance_oracle", 1) && sigma != s.lemmas.end() &&
                    sigma->second.failed == 0 && sigma->second.passed == small;
    verdict(5, ok, "resolvent and combinatorial invariance agree on every subset",
            tally_text(s.lemmas, "invariance_oracle") + " subsets, " + tally_text(s.lemmas, "sigma_algebra") +
                " lattices with atoms = components");
}

void sum_identity()
{
    std::mt19937_64 rng(kSeed);
    double worst = 0.0;
    bool ok = true;
    for (int draw = 0; draw < kSumDraws; ++draw) {
        const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 25)(rng);
        const auto g = random_connected_graph(size, rng());
        const auto es = eigensystem(assemble_operator(g));
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, size)(rng);
        const Vector f = es.vector(n - 1);
        const auto nd = nodal_decompose(g, f, 0.0);
        Vector coeffs(nd.count());
        std::uniform_real_distribution<double> c(-2.0, 2.0);
        for (auto& v : coeffs) {
            v = c(rng);
        }
        Vector v(size, 0.0);
        const auto domains = nd.domains();
        for (std::size_t i = 0; i < domains.size(); ++i) {
            for (auto x : domains[i].indices()) {
                v[x] = coeffs[i] * f[x];
            }
        }
        const double scale = 1.0 + std::abs(quadratic_form(g, v));
        const double residual = sum_lemma_residual(g, f, nd, coeffs, es.values[n - 1]) / scale;
        worst = std::max(worst, residual);
        ok = ok && residual <= kSumTol;
    }
    std::ostringstream d;
    d << kSumDraws << " draws, worst scaled residual " << std::scientific << std::setprecision(2) << worst;
    verdict(6, ok, "sum identity over domain pieces", d.str());
}

void restricted_resolvent(const CorpusSummary& s)
{
    verdict(7, tally_ok(s.lemmas, "restricted_resolvent_bound", 1),
            "restricted resolvent dominates f+/(1 + lambda) on F+ and F-",
            tally_text(s.lemmas, "restricted_resolvent_bound") + " eigenfunctions");
}

void grid_spectra()
{
    const auto line = eigensystem(assemble_operator(build_grid_form(GridSpec::interval(99, 0.01))));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double rel = std::abs(line.values[0] - pi2) / pi2;

    const double h = 1.0 / 21.0;
    const auto spec = GridSpec::rectangle(20, 20, h);
    const auto square = eigensystem(assemble_operator(build_grid_form(spec)));
    Vector expected;
    for (std::size_t p = 1; p <= 20; ++p) {
        for (std::size_t q = 1; q <= 20; ++q) {
            expected.push_back((4.0 - 2.0 * std::cos(static_cast<double>(p) * std::numbers::pi * h) -
                                2.0 * std::cos(static_cast<double>(q) * std::numbers::pi * h)) /
                               (h * h));
        }
    }
    std::sort(expected.begin(), expected.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        worst = std::max(worst, std::abs(square.values[i] - expected[i]));
    }

    std::size_t simple = 0;
    std::size_t strong_ok = 0;
    std::size_t degenerate_reports = 0;
    bool weak_ok = true;
    for (const auto& r : strong_bound_report(square, kStrongMaxN, kDefaultTauRel, 20, kSeed)) {
        weak_ok = weak_ok && r.passes;
        if (r.k == 1) {
            ++simple;
            strong_ok += r.strong_passes == true ? 1 : 0;
        } else {
            ++degenerate_reports;
        }
    }
    const bool ok = rel <= kGround1dRelTol && worst <= kSquareAbsTol && weak_ok && simple > 0 && strong_ok == simple;
    std::ostringstream d;
    d << "1D lambda_1 off pi^2 by " << std::scientific << std::setprecision(2) << rel << ", square max error " << worst
      << ", strong bound " << strong_ok << "/" << simple << " simple, " << degenerate_reports
      << " degenerate-cluster reports";
    verdict(8, ok, "grid spectra and strong bound", d.str());
}

void determinism(const fs::path& a, const fs::path& b)
{
    const auto first = json_files(a);
    const auto second = json_files(b);
    verdict(9, !first.empty() && first == second, "repeated corpus runs are byte-identical",
            std::to_string(first.size()) + " JSON files compared");
}

} // namespace

int main()
{
    std::random_device rd;
    const fs::path root = fs::temp_directory_path() / ("nodalforms_acceptance_" + std::to_string(rd()));
    double seconds = 0.0;
    double seconds_again = 0.0;
    const auto summary = run_corpus(root / "run_a", seconds);
    run_corpus(root / "run_b", seconds_again);

    courant_universality(summary, std::max(seconds, seconds_again));
    star_tightness();
    path_exactness();
    lemma_suites(summary);
    invariance_oracle(summary);
    sum_identity();
    restricted_resolvent(summary);
    grid_spectra();
    determinism(root / "run_a", root / "run_b");

    fs::remove_all(root);
    return failures == 0 ? 0 : 1;
}
