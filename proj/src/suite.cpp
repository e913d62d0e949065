#include "nodalforms/suite.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "nodalforms/errors.hpp"
#include "nodalforms/invariance.hpp"

namespace nodalforms {

namespace {

constexpr std::size_t kKeptFailures = 5;

std::string describe(const std::string& what, double value, double limit)
{
    std::ostringstream ss;
    ss.precision(6);
    ss << what << ": " << value << " > " << limit;
    return ss.str();
}

class Checker {
public:
    Checker(const std::string& entry, LemmaTallies& tallies) : entry_(entry), tallies_(tallies) {}

    void record(const std::string& lemma, bool ok, const std::string& detail = {})
    {
        tallies_[lemma].record(ok, ok ? std::string() : entry_ + ": " + detail);
    }

    /// value <= limit, with NaN counted as failure.
    void at_most(const std::string& lemma, double value, double limit, const std::string& what)
    {
        const bool ok = value <= limit;
        record(lemma, ok, ok ? std::string() : describe(what, value, limit));
    }

    /// Runs `body`; a library error counts as a failure of `lemma`.
    template <class F>
    void guarded(const std::string& lemma, F&& body)
    {
        try {
            body();
        } catch (const Error& e) {
            record(lemma, false, e.what());
        }
    }

private:
    const std::string& entry_;
    LemmaTallies& tallies_;
};

Vector uniform_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (auto& x : v) {
        x = dist(rng);
    }
    return v;
}

VertexSubset random_nonempty_subset(std::mt19937_64& rng, std::size_t n)
{
    std::bernoulli_distribution coin(0.5);
    VertexSubset a(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (coin(rng)) {
            a.insert(x);
        }
    }
    if (a.empty()) {
        a.insert(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    }
    return a;
}

double max_abs_diff(const Matrix& a, const Matrix& b)
{
    return (a - b).max_abs();
}

// Block of G on A, embedded like restricted_resolvent.
Matrix block_on(const Matrix& g, const VertexSubset& a)
{
    Matrix out(g.rows(), g.cols(), 0.0);
    for (auto i : a.indices()) {
        for (auto j : a.indices()) {
            out(i, j) = g(i, j);
        }
    }
    return out;
}

// Unions of the given components, all 2^c of them (c small).
std::vector<VertexSubset> component_unions(const ComponentPartition& parts, std::size_t n)
{
    std::vector<VertexSubset> out;
    const std::size_t c = std::min<std::size_t>(parts.size(), 10);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c); ++mask) {
        VertexSubset u(n);
        for (std::size_t i = 0; i < c; ++i) {
            if (mask >> i & 1U) {
                u = u | parts.components[i];
            }
        }
        out.push_back(std::move(u));
    }
    return out;
}

} // namespace

void LemmaTally::record(bool ok, const std::string& detail)
{
    if (ok) {
        ++passed;
        return;
    }
    ++failed;
    if (failures.size() < kKeptFailures) {
        failures.push_back(detail);
    }
}

LemmaTally& LemmaTally::operator+=(const LemmaTally& other)
{
    passed += other.passed;
    failed += other.failed;
    for (const auto& f : other.failures) {
        if (failures.size() < kKeptFailures) {
            failures.push_back(f);
        }
    }
    return *this;
}

std::uint64_t entry_seed(std::uint64_t seed, const std::string& name)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h = (h ^ c) * 1099511628211ULL;
    }
    return seed ^ h;
}

EntryResult run_property_suite(const std::string& name, const WeightedGraph& g,
                               const std::optional<GridSpec>& grid, const SuiteOptions& options)
{
    EntryResult result;
    result.name = name;
    result.vertices = g.size();
    result.edges = g.edges().size();
    Checker check(name, result.lemmas);
    std::mt19937_64 rng(entry_seed(options.seed, name));
    const std::size_t n = g.size();
    const bool large = n > options.large_graph;
    const int trials = large ? options.large_trials : options.trials;

    const auto op = std::make_shared<const FormOperator>(assemble_operator(g));
    const EigenSystem es = eigensystem(op, options.cluster_tol);
    result.eigenvalues = es.values;
    const auto parts = connected_components(g);
    result.components = parts.size();

    // Eigenbasis: m-orthonormality and the eigen relation in form language.
    {
        double worst_orth = 0.0, worst_eigen = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vector vi = es.vector(i);
            const Vector lv = op->apply_generator(vi);
            double resid = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                resid += g.measure()[x] * std::pow(lv[x] - es.values[i] * vi[x], 2);
            }
            worst_eigen = std::max(worst_eigen, std::sqrt(resid) / (1.0 + std::abs(es.values[i])));
            for (std::size_t j = i; j < n && (!large || j < i + 3); ++j) {
                const double ip = m_inner(g, vi, es.vectors.column(j));
                worst_orth = std::max(worst_orth, std::abs(ip - (i == j ? 1.0 : 0.0)));
            }
        }
        check.at_most("eigen_orthonormality", worst_orth, 1e-9, "max |<v_i, v_j>_m - delta_ij|");
        check.at_most("eigen_relation", worst_eigen, 1e-8, "max ||L v - lambda v||_m / (1 + |lambda|)");
    }

    // Resolvents on a grid of alphas.
    const std::vector<double> alphas = large ? std::vector<double>{0.5, 1.0, 2.0}
                                             : std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<Resolvent> res;
    for (double a : alphas) {
        res.push_back(resolvent(*op, a));
    }
    const Resolvent& g1 = res[std::find(alphas.begin(), alphas.end(), 1.0) - alphas.begin()];

    for (const auto& r : res) {
        double min_entry = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (double v : r.matrix.row(i)) {
                min_entry = std::min(min_entry, v);
            }
        }
        check.at_most("resolvent_positivity", -min_entry, 1e-12, "negative resolvent entry");
    }
    for (std::size_t i = 0; i < res.size(); ++i) {
        for (std::size_t j = i + 1; j < res.size(); ++j) {
            const double a = alphas[i], b = alphas[j];
            const Matrix lhs = res[i].matrix - res[j].matrix;
            Matrix rhs = res[i].matrix * res[j].matrix;
            double diff = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                for (std::size_t y = 0; y < n; ++y) {
                    diff = std::max(diff, std::abs(lhs(x, y) - (b - a) * rhs(x, y)));
                }
            }
            const double scale = 1.0 + std::max(res[i].matrix.max_abs(), res[j].matrix.max_abs());
            check.at_most("resolvent_identity", diff / scale, 1e-9, "G_a - G_b - (b - a) G_a G_b");
        }
    }
    for (int t = 0; t < trials; ++t) {
        const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, res.size() - 1)(rng);
        const Vector u = uniform_vector(rng, n, -1.0, 1.0);
        const Vector v = uniform_vector(rng, n, -1.0, 1.0);
        const Vector gu = res[pick].apply(u);
        const double lhs = bilinear_form(g, gu, v) + alphas[pick] * m_inner(g, gu, v);
        const double rhs = m_inner(g, u, v);
        const double scale = m_norm(g, u) * m_norm(g, v);
        check.at_most("resolvent_form_identity", std::abs(lhs - rhs) / scale, 1e-9, "Q(G u, v) + a<G u, v> - <u, v>");
    }

    // Eigenvalue of G_alpha is 1/(lambda + alpha) with the same eigenvectors.
    for (std::size_t i = 0; i < n; ++i) {
        const Vector v = es.vector(i);
        for (std::size_t k = 0; k < res.size(); ++k) {
            if (large && alphas[k] != 1.0) {
                continue;
            }
            const Vector gv = res[k].apply(v);
            Vector diff(n);
            for (std::size_t x = 0; x < n; ++x) {
                diff[x] = gv[x] - v[x] / (es.values[i] + alphas[k]);
            }
            check.at_most("eigen_resolvent_equivalence", m_norm(g, diff), 1e-8, "||G_a v - v / (lambda + a)||_m");
        }
    }

    // alpha <f - alpha G_alpha f, f> increases to Q(f). The relative gap at alpha
    // is about lambda_max / alpha, so the last alpha scales with the spectrum.
    for (int t = 0; t < trials; ++t) {
        const Vector f = uniform_vector(rng, n, -1.0, 1.0);
        const double q = quadratic_form(g, f);
        const double lambda_max = es.values.back();
        const int top = std::max(20, static_cast<int>(std::ceil(std::log2(1e5 * std::max(lambda_max, 1.0)))));
        double previous = 0.0;
        bool monotone = true;
        double last = 0.0;
        for (int j = -4; j <= top; ++j) {
            const double a = std::ldexp(1.0, j);
            const Vector gf = resolvent_apply(*op, a, f);
            Vector d(n);
            for (std::size_t x = 0; x < n; ++x) {
                d[x] = f[x] - a * gf[x];
            }
            const double value = a * m_inner(g, d, f);
            if (value < previous - 1e-10 * (1.0 + std::abs(previous))) {
                monotone = false;
            }
            previous = value;
            last = value;
        }
        check.record("form_limit_monotone", monotone, "alpha <f - alpha G f, f> decreased");
        check.at_most("form_limit_value", std::abs(last - q) / (1.0 + std::abs(q)), 1e-4, "relative gap to Q(f)");
    }

    // Positive and negative parts.
    for (int t = 0; t < trials; ++t) {
        const Vector u = uniform_vector(rng, n, -1.0, 1.0);
        check.at_most("sign_parts_cross_form", bilinear_form(g, positive_part(u), negative_part(u)), 1e-12, "Q(u+, u-)");
    }
    check.record("positivity_preserving", positivity_preserving_check(g, trials, rng()), "Q(|f|) > Q(f)");

    // Variational principle.
    for (int t = 0; t < trials; ++t) {
        const std::size_t idx = std::uniform_int_distribution<std::size_t>(1, n)(rng);
        Vector v(n, 0.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t j = idx - 1; j < n; ++j) {
            const double c = normal(rng);
            for (std::size_t x = 0; x < n; ++x) {
                v[x] += c * es.vectors(x, j);
            }
        }
        check.guarded("variational", [&] {
            check.record("variational", check_variational(es, v, idx).holds, "Rayleigh quotient below lambda_n");
        });
        check.guarded("variational_equality", [&] {
            const auto vc = check_variational(es, es.vector(idx - 1), idx);
            check.record("variational_equality", vc.holds && vc.is_eigen_if_equal, "v_n not recognised");
        });
    }

    // Invariant sets: combinatorial unions of components, or the brute-force lattice on small graphs.
    std::vector<VertexSubset> invariant_sets;
    if (n <= options.oracle_limit) {
        check.guarded("invariance_oracle", [&] {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
                const auto a = VertexSubset::from_mask(n, mask);
                const auto cert = is_invariant_resolvent(g, g1, a);
                check.record("invariance_oracle", cert.invariant() == is_invariant_combinatorial(g, a),
                             "resolvent and combinatorial invariance disagree");
            }
            invariant_sets = invariant_subsets_bruteforce(*op);
            const std::size_t size = invariant_sets.size();
            const bool power_of_two = size > 0 && (size & (size - 1)) == 0;
            const auto at = atoms(invariant_sets);
            check.record("sigma_algebra", power_of_two && at == parts.components,
                         "invariant family is not generated by the components");
        });
    }
    if (invariant_sets.empty()) {
        invariant_sets = component_unions(parts, n);
    }
    for (const auto& a : invariant_sets) {
        for (int t = 0; t < std::max(1, trials / 2); ++t) {
            const Vector f = uniform_vector(rng, n, -1.0, 1.0);
            const double q = quadratic_form(g, f);
            const double split = quadratic_form(g, mask_vector(f, a)) + quadratic_form(g, mask_vector(f, a.complement()));
            check.at_most("invariant_splitting", std::abs(q - split) / (1.0 + q), 1e-10, "Q(f) - Q(1_A f) - Q(1_{X-A} f)");
        }
        if (a.empty()) {
            continue;
        }
        for (std::size_t k = 0; k < res.size(); ++k) {
            const Matrix restricted = restricted_resolvent(*op, a, alphas[k]);
            check.at_most("restricted_resolvent_block", max_abs_diff(restricted, block_on(res[k].matrix, a)), 1e-9,
                          "G^A - block of G on A");
        }
    }
    // Non-invariant sets: a crossing edge pair breaks the splitting.
    for (int t = 0; t < trials && !g.edges().empty(); ++t) {
        const auto& e = g.edges()[std::uniform_int_distribution<std::size_t>(0, g.edges().size() - 1)(rng)];
        VertexSubset a = random_nonempty_subset(rng, n);
        a.insert(e.u);
        a.erase(e.v);
        Vector f(n, 0.0);
        f[e.u] = 1.0;
        f[e.v] = 1.0;
        const double q = quadratic_form(g, f);
        const double split = quadratic_form(g, mask_vector(f, a)) + quadratic_form(g, mask_vector(f, a.complement()));
        const bool violated = std::abs(q - split) > 1e-10 * (1.0 + q);
        const auto cert = is_invariant_resolvent(g, g1, a);
        check.record("noninvariant_splitting_fails", violated && !cert.invariant() && !cert.crossing_edges.empty(),
                     "non-invariant set not detected");
    }

    // Components recovered from a strictly positive f.
    for (int t = 0; t < std::max(1, trials / 4); ++t) {
        const Vector f = uniform_vector(rng, n, 0.5, 1.5);
        check.guarded("positive_function_components", [&] {
            check.record("positive_function_components", gerlach_decompose(*op, f) == parts, "partition differs from components");
        });
    }

    // Projections onto coordinate subspaces.
    for (int t = 0; t < trials; ++t) {
        const VertexSubset a = random_nonempty_subset(rng, n);
        const Matrix p = q_projection(*op, a);
        const Matrix lhs = restricted_resolvent(*op, a, 1.0);
        check.at_most("projection_resolvent", max_abs_diff(lhs, p * g1.matrix), 1e-8, "G_1^A - P_A G_1");
        check.record("projection_domination", projection_domination_check(*op, a, 1, rng()), "P_A f > f");
        check.record("restriction_positivity", positivity_preserving_check(restrict(g, a), 1, rng()), "restriction not positivity preserving");
    }

    if (n <= options.transfer_limit) {
        const auto summary = invariance_transfer_exhaustive(g);
        for (std::size_t i = 0; i < summary.pairs; ++i) {
            check.record("invariance_transfer", i >= summary.failures, "invariance transfer failed");
        }
        check.record("invariance_transfer_lift_exercised", summary.lift_applied > 0, "lift never applied");
        check.record("invariance_transfer_descend_exercised", summary.descend_applied > 0, "descent never applied");
    }

    // Nodal checks: every eigenvalue, solver basis plus samples on degenerate clusters.
    auto& cs = result.courant;
    std::vector<std::size_t> ambiguous_starts;
    for (std::size_t idx = 1; idx <= n; ++idx) {
        const auto mult = multiplicity(es, idx);
        if (mult.ambiguous && std::find(ambiguous_starts.begin(), ambiguous_starts.end(), mult.first_index) ==
                                  ambiguous_starts.end()) {
            ambiguous_starts.push_back(mult.first_index);
        }
        std::vector<std::pair<Vector, EigenvectorSource>> reps;
        reps.emplace_back(es.vector(idx - 1), EigenvectorSource::solver_basis());
        if (mult.k > 1) {
            for (int s = 0; s < options.samples; ++s) {
                const std::uint64_t sseed = rng();
                reps.emplace_back(eigenspace_sample(es, idx, sseed), EigenvectorSource::random_rotation(sseed));
            }
        }
        for (std::size_t r = 0; r < reps.size(); ++r) {
            const auto& [f, source] = reps[r];
            const bool strong = grid.has_value();
            const auto report = courant_check_vector(es, idx, f, options.tau_rel, strong, source);
            ++cs.reports;
            cs.max_energy_defect = std::max(cs.max_energy_defect, report.energy_defect);
            if (report.l == report.bound) {
                ++cs.tight;
            }
            check.record("courant", report.passes,
                         "n=" + std::to_string(idx) + " l=" + std::to_string(report.l) + " bound=" +
                             std::to_string(report.bound) + " source=" + source.name());
            if (!report.passes) {
                ++cs.violations;
            }
            if (strong && mult.k == 1) {
                ++cs.strong_checked;
                if (!*report.strong_passes) {
                    ++cs.strong_violations;
                }
            }

            const auto& nd = report.decomposition;
            const auto cf = cross_form_matrix(g, f, nd);
            check.record("cross_form_nonneg", cf.nonnegative, "negative cross term");
            // Pieces f 1_i are m-orthogonal exactly when the domains are disjoint.
            std::vector<int> cover(n, 0);
            for (const auto& d : nd.domains()) {
                for (auto x : d.indices()) {
                    ++cover[x];
                }
            }
            double overlap = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                if (cover[x] > 1) {
                    overlap += g.measure()[x] * f[x] * f[x];
                }
            }
            check.at_most("domain_orthogonality", overlap, 0.0, "mass on overlapping domains");
            if (r == 0 || !large) {
                const auto bound = restricted_resolvent_bound(g, f, es.values[idx - 1], options.tau_rel * max_abs(f));
                if (bound.positive_checked || bound.negative_checked) {
                    check.record("restricted_resolvent_bound", bound.holds,
                                 describe("slack", -bound.min_slack, 1e-9));
                }
            }
        }
        // Energy identity and the sum identity at tau = 0.
        if (idx <= n && (!large || idx % 10 == 1)) {
            const Vector f = es.vector(idx - 1);
            const auto nd = nodal_decompose(g, f, 0.0);
            const double lambda = es.values[idx - 1];
            const auto zero = courant_check_vector(es, idx, f, 0.0);
            check.at_most("energy_identity", zero.energy_defect, 1e-9 * (1.0 + lambda), "Q(f 1_C, f) - lambda ||f 1_C||^2");
            std::normal_distribution<double> normal(0.0, 1.0);
            Vector coeffs(nd.count());
            for (auto& c : coeffs) {
                c = normal(rng);
            }
            Vector v(n, 0.0);
            const auto domains = nd.domains();
            for (std::size_t i = 0; i < domains.size(); ++i) {
                for (auto x : domains[i].indices()) {
                    v[x] += coeffs[i] * f[x];
                }
            }
            const double mu = std::uniform_real_distribution<double>(0.0, 2.0 * (1.0 + lambda))(rng);
            check.at_most("domain_sum_identity", sum_lemma_residual(g, f, nd, coeffs, mu) / (1.0 + std::abs(quadratic_form(g, v))),
                          1e-9, "sum identity residual");
        }
    }
    cs.ambiguous_clusters = ambiguous_starts.size();
    return result;
}

} // namespace nodalforms
