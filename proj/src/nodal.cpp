#include "nodalforms/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nodalforms/errors.hpp"
#include "nodalforms/invariance.hpp"

namespace nodalforms {

SignPattern sign_sets(std::span<const double> f, double tau)
{
    if (!(tau >= 0.0)) {
        throw PreconditionError("sign_sets: tau must be nonnegative");
    }
    SignPattern s{tau, VertexSubset(f.size()), VertexSubset(f.size()), VertexSubset(f.size())};
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (f[x] > tau) {
            s.positive.insert(x);
        } else if (f[x] < -tau) {
            s.negative.insert(x);
        } else {
            s.zero.insert(x);
        }
    }
    return s;
}

std::vector<VertexSubset> NodalDecomposition::domains() const
{
    std::vector<VertexSubset> out = positive_domains;
    out.insert(out.end(), negative_domains.begin(), negative_domains.end());
    return out;
}

namespace {

std::vector<VertexSubset> components_within(const WeightedGraph& g, const VertexSubset& s)
{
    std::vector<VertexSubset> out;
    if (s.empty()) {
        return out;
    }
    const auto idx = s.indices();
    for (const auto& local : connected_components(restrict(g, s)).components) {
        VertexSubset global(g.size());
        for (auto k : local.indices()) {
            global.insert(idx[k]);
        }
        out.push_back(std::move(global));
    }
    return out;
}

constexpr std::size_t kNoDomain = static_cast<std::size_t>(-1);

// Forms of the pieces f 1_{C_i} gathered in one pass over vertices and edges.
struct DomainForms {
    Matrix gram;     ///< Q(f 1_i, f 1_j)
    Vector against_f; ///< Q(f 1_i, f)
    Vector mass;     ///< ||f 1_i||_m^2
    std::vector<std::size_t> domain_of;
};

DomainForms domain_forms(const WeightedGraph& g, std::span<const double> f, const std::vector<VertexSubset>& domains)
{
    const std::size_t l = domains.size();
    DomainForms out{Matrix(l, l), Vector(l, 0.0), Vector(l, 0.0), std::vector<std::size_t>(g.size(), kNoDomain)};
    for (std::size_t d = 0; d < l; ++d) {
        for (std::size_t x : domains[d].indices()) {
            out.domain_of[x] = d;
        }
    }
    for (std::size_t x = 0; x < g.size(); ++x) {
        const std::size_t d = out.domain_of[x];
        if (d != kNoDomain) {
            const double ff = f[x] * f[x];
            out.gram(d, d) += g.killing()[x] * ff;
            out.against_f[d] += g.killing()[x] * ff;
            out.mass[d] += g.measure()[x] * ff;
        }
    }
    for (const auto& e : g.edges()) {
        const std::size_t du = out.domain_of[e.u];
        const std::size_t dv = out.domain_of[e.v];
        const double fu = f[e.u], fv = f[e.v];
        if (du != kNoDomain) {
            out.gram(du, du) += e.weight * fu * fu;
            out.against_f[du] += e.weight * fu * (fu - fv);
        }
        if (dv != kNoDomain) {
            out.gram(dv, dv) += e.weight * fv * fv;
            out.against_f[dv] += e.weight * fv * (fv - fu);
        }
        if (du != kNoDomain && dv != kNoDomain) {
            out.gram(du, dv) -= e.weight * fu * fv;
            out.gram(dv, du) -= e.weight * fu * fv;
        }
    }
    return out;
}

} // namespace

NodalDecomposition nodal_decompose(const WeightedGraph& g, std::span<const double> f, double tau)
{
    if (f.size() != g.size()) {
        throw DimensionError("nodal_decompose: length mismatch");
    }
    NodalDecomposition nd;
    nd.sign_pattern = sign_sets(f, tau);
    nd.positive_domains = components_within(g, nd.sign_pattern.positive);
    nd.negative_domains = components_within(g, nd.sign_pattern.negative);
    return nd;
}

std::string EigenvectorSource::name() const
{
    switch (kind) {
    case Kind::solver_basis:
        return "solver_basis";
    case Kind::random_rotation:
        return "random_rotation(" + std::to_string(seed) + ")";
    case Kind::supplied:
        return "supplied";
    }
    return "unknown";
}

Vector eigenspace_sample(const EigenSystem& es, std::size_t n, std::uint64_t seed)
{
    const auto mult = multiplicity(es, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector coeffs(mult.k);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (auto& c : coeffs) {
            c = normal(rng);
            norm2 += c * c;
        }
    } while (norm2 == 0.0);
    const double scale = 1.0 / std::sqrt(norm2);
    Vector f(es.size(), 0.0);
    for (std::size_t i = 0; i < mult.k; ++i) {
        const std::size_t col = mult.first_index - 1 + i;
        for (std::size_t x = 0; x < f.size(); ++x) {
            f[x] += coeffs[i] * scale * es.vectors(x, col);
        }
    }
    return f;
}

CourantReport courant_check_vector(const EigenSystem& es, std::size_t n, std::span<const double> f,
                                   double tau_rel, bool evaluate_strong, EigenvectorSource source)
{
    if (f.size() != es.size()) {
        throw DimensionError("courant_check: eigenfunction length mismatch");
    }
    if (!(tau_rel >= 0.0)) {
        throw PreconditionError("courant_check: tau must be nonnegative");
    }
    const auto mult = multiplicity(es, n);
    const auto& g = es.graph();

    CourantReport r;
    r.n = n;
    r.lambda = es.values[n - 1];
    r.k = mult.k;
    r.ambiguous = mult.ambiguous;
    r.tau = tau_rel;
    r.cluster_tol = es.cluster_tol;
    r.source = source;
    r.decomposition = nodal_decompose(g, f, tau_rel * max_abs(f));
    r.l = r.decomposition.count();
    r.bound = n + mult.k - 1;
    r.passes = r.l <= r.bound;
    if (evaluate_strong) {
        r.strong_passes = r.l <= n;
    }
    const auto forms = domain_forms(g, f, r.decomposition.domains());
    for (std::size_t d = 0; d < forms.mass.size(); ++d) {
        r.energy_defect = std::max(r.energy_defect, std::abs(forms.against_f[d] - r.lambda * forms.mass[d]));
    }
    const Vector on_zero = mask_vector(f, r.decomposition.sign_pattern.zero);
    r.zero_set_mass = m_inner(g, on_zero, on_zero);
    return r;
}

CourantReport courant_check(const EigenSystem& es, std::size_t n, double tau_rel,
                            EigenvectorSource source, bool evaluate_strong)
{
    if (n < 1 || n > es.size()) {
        throw IndexError("courant_check: index " + std::to_string(n) + " out of range 1.." +
                         std::to_string(es.size()));
    }
    Vector f;
    switch (source.kind) {
    case EigenvectorSource::Kind::solver_basis:
        f = es.vector(n - 1);
        break;
    case EigenvectorSource::Kind::random_rotation:
        f = eigenspace_sample(es, n, source.seed);
        break;
    case EigenvectorSource::Kind::supplied:
        throw PreconditionError("courant_check: use courant_check_vector for supplied eigenfunctions");
    }
    return courant_check_vector(es, n, f, tau_rel, evaluate_strong, source);
}

CrossForm cross_form_matrix(const WeightedGraph& g, std::span<const double> f,
                            const NodalDecomposition& nd)
{
    if (f.size() != g.size()) {
        throw DimensionError("cross_form_matrix: length mismatch");
    }
    const auto domains = nd.domains();
    const std::size_t l = domains.size();
    const auto forms = domain_forms(g, f, domains);

    CrossForm out;
    out.entries = forms.gram;
    out.min_entry = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            out.min_entry = i == 0 && j == 0 ? out.entries(i, j) : std::min(out.min_entry, out.entries(i, j));
        }
    }
    const auto& zero = nd.sign_pattern.zero;
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (zero.contains(x)) {
            out.truncation = std::max(out.truncation, std::abs(f[x]));
        } else {
            // Off the zero set each vertex lies in exactly one domain.
            const double rebuilt = forms.domain_of[x] == kNoDomain ? 0.0 : f[x];
            out.reconstruction_error = std::max(out.reconstruction_error, std::abs(f[x] - rebuilt));
        }
    }
    const double q = quadratic_form(g, f);
    out.nonnegative = out.min_entry >= -1e-10 * (1.0 + q);
    return out;
}

double sum_lemma_residual(const WeightedGraph& g, std::span<const double> f,
                          const NodalDecomposition& nd, std::span<const double> coeffs, double mu)
{
    const auto domains = nd.domains();
    const std::size_t l = domains.size();
    if (coeffs.size() != l) {
        throw DimensionError("sum_lemma_residual: expected " + std::to_string(l) + " coefficients");
    }
    if (f.size() != g.size()) {
        throw DimensionError("sum_lemma_residual: length mismatch");
    }
    const auto forms = domain_forms(g, f, domains);
    Vector v(f.size(), 0.0);
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (forms.domain_of[x] != kNoDomain) {
            v[x] = coeffs[forms.domain_of[x]] * f[x];
        }
    }
    const double lhs = quadratic_form(g, v) - mu * m_inner(g, v, v);
    double rhs = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        rhs += coeffs[i] * coeffs[i] * (forms.against_f[i] - mu * forms.mass[i]);
    }
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            if (i != j && forms.gram(i, j) != 0.0) {
                const double d = coeffs[i] - coeffs[j];
                rhs -= 0.5 * d * d * forms.gram(i, j);
            }
        }
    }
    return std::abs(lhs - rhs);
}

RestrictedResolventBound restricted_resolvent_bound(const WeightedGraph& g, std::span<const double> f,
                                                    double lambda, double tau)
{
    if (f.size() != g.size()) {
        throw DimensionError("restricted_resolvent_bound: length mismatch");
    }
    const auto signs = sign_sets(f, tau);
    RestrictedResolventBound out;
    out.min_slack = std::numeric_limits<double>::infinity();

    auto check_side = [&](const VertexSubset& side, double sign) {
        if (side.empty()) {
            return false;
        }
        const FormOperator sub(restrict(g, side));
        Vector part = restrict_vector(f, side);
        for (auto& v : part) {
            v = std::max(sign * v, 0.0);
        }
        const Vector applied = resolvent_apply(sub, 1.0, part);
        for (std::size_t i = 0; i < part.size(); ++i) {
            const double slack = applied[i] - part[i] / (1.0 + lambda);
            out.min_slack = std::min(out.min_slack, slack);
            if (slack < -1e-9) {
                out.holds = false;
            }
        }
        return true;
    };
    out.positive_checked = check_side(signs.positive, 1.0);
    out.negative_checked = check_side(signs.negative, -1.0);
    if (!out.positive_checked && !out.negative_checked) {
        out.min_slack = 0.0;
    }
    return out;
}

bool restricted_resolvent_bound_check(const EigenSystem& es, std::size_t n, double tau_rel)
{
    if (n < 1 || n > es.size()) {
        throw IndexError("restricted_resolvent_bound_check: index out of range");
    }
    const Vector f = es.vector(n - 1);
    return restricted_resolvent_bound(es.graph(), f, es.values[n - 1], tau_rel * max_abs(f)).holds;
}

} // namespace nodalforms
