#include "nodalforms/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "nodalforms/errors.hpp"
#include "nodalforms/families.hpp"
#include "nodalforms/invariance.hpp"
#include "nodalforms/io.hpp"
#include "nodalforms/render.hpp"

namespace nodalforms {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Loaded {
    WeightedGraph graph;
    std::optional<GridSpec> grid;
};

Loaded load_input(const fs::path& path, bool default_measure_one)
{
    const std::string text = read_text_file(path);
    if (looks_like_grid(text)) {
        GridSpec spec = load_grid(path);
        WeightedGraph g = build_grid_form(spec);
        return {std::move(g), std::move(spec)};
    }
    return {load_graph(path, default_measure_one), std::nullopt};
}

std::string padded(std::size_t value, std::size_t total)
{
    const std::size_t width = std::to_string(std::max<std::size_t>(total, 1)).size();
    std::ostringstream ss;
    ss << std::setw(static_cast<int>(width)) << std::setfill('0') << value;
    return ss.str();
}

ojson cluster_json(const Cluster& c)
{
    ojson j;
    j["first_index"] = c.start + 1;
    j["count"] = c.count;
    j["value"] = c.value;
    j["ambiguous"] = c.ambiguous;
    return j;
}

ojson labels_json(const WeightedGraph& g, const VertexSubset& s)
{
    ojson out = ojson::array();
    for (auto x : s.indices()) {
        out.push_back(g.label(x));
    }
    return out;
}

// Per-run status; folded into the exit code at the end.
struct Status {
    bool failed = false;
    bool ambiguous = false;

    int exit_code() const { return failed ? kExitFailure : ambiguous ? kExitAmbiguous : kExitOk; }
};

Status write_cluster_reports(const EigenSystem& es, const std::vector<std::size_t>& ns, const RunConfig& config,
                             bool strong, const std::optional<GridSpec>& grid, std::ostream& out)
{
    Status status;
    const auto& g = es.graph();
    std::size_t written = 0;
    for (const auto& cluster : es.clusters) {
        std::vector<std::size_t> members;
        for (auto n : ns) {
            if (n - 1 >= cluster.start && n - 1 < cluster.start + cluster.count) {
                members.push_back(n);
            }
        }
        if (members.empty()) {
            continue;
        }
        ojson reports = ojson::array();
        ojson diagnostics = ojson::array();
        const std::string stem = "cluster_" + padded(cluster.start + 1, es.size());
        for (auto n : members) {
            std::vector<CourantReport> batch;
            batch.push_back(courant_check(es, n, config.tau, EigenvectorSource::solver_basis(), strong));
            if (cluster.count > 1) {
                for (int s = 0; s < config.samples; ++s) {
                    const std::uint64_t seed = config.seed + 1000003ULL * n + static_cast<std::uint64_t>(s);
                    batch.push_back(courant_check(es, n, config.tau, EigenvectorSource::random_rotation(seed), strong));
                }
            }
            for (const auto& r : batch) {
                reports.push_back(report_to_json(r, g));
                ojson d;
                d["n"] = r.n;
                d["source"] = r.source.name();
                d["ambiguous"] = r.ambiguous;
                d["energy_defect"] = r.energy_defect;
                d["zero_set_mass"] = r.zero_set_mass;
                diagnostics.push_back(std::move(d));
                status.failed = status.failed || !r.passes;
                status.ambiguous = status.ambiguous || r.ambiguous;
            }
            if (config.render) {
                const Vector f = es.vector(n - 1);
                const std::string title = "n=" + std::to_string(n) + " lambda=" + std::to_string(batch[0].lambda) +
                                          " l=" + std::to_string(batch[0].l);
                const std::string svg = grid ? render_grid_svg(*grid, f, title)
                                             : render_graph_svg(g, f, batch[0].decomposition, title);
                write_text_file(config.out / (stem + "_n" + padded(n, es.size()) + ".svg"), svg);
            }
        }
        ojson file;
        file["seed"] = config.seed;
        file["cluster"] = cluster_json(cluster);
        file["reports"] = std::move(reports);
        file["diagnostics"] = std::move(diagnostics);
        write_text_file(config.out / (stem + ".json"), dump_json(file));
        ++written;
    }
    out << "wrote " << written << " cluster report file(s) to " << config.out.string() << "\n";
    return status;
}

int run_spectrum(const RunConfig& config, std::ostream& out)
{
    const Loaded in = load_input(config.input, config.default_measure_one);
    const EigenSystem es = eigensystem(assemble_operator(in.graph), config.cluster_tol);
    ojson j;
    j["seed"] = config.seed;
    j["input"] = config.input.filename().string();
    j["vertices"] = es.size();
    j["cluster_tol"] = es.cluster_tol;
    j["eigenvalues"] = es.values;
    j["clusters"] = ojson::array();
    Status status;
    for (const auto& c : es.clusters) {
        j["clusters"].push_back(cluster_json(c));
        status.ambiguous = status.ambiguous || c.ambiguous;
    }
    write_text_file(config.out / "spectrum.json", dump_json(j));
    for (std::size_t i = 0; i < es.size(); ++i) {
        out << "lambda_" << i + 1 << " = " << std::setprecision(12) << es.values[i] << "\n";
    }
    return status.exit_code();
}

int run_nodal(const RunConfig& config, std::ostream& out, bool grid_mode)
{
    const Loaded in = load_input(config.input, config.default_measure_one);
    if (grid_mode && !in.grid) {
        throw SchemaError(config.input.string() + ": grid mode needs a grid document");
    }
    const EigenSystem es = eigensystem(assemble_operator(in.graph), config.cluster_tol);
    const auto ns = parse_n_range(config.n_range, es.size());
    Status status = write_cluster_reports(es, ns, config, grid_mode, in.grid, out);
    if (grid_mode) {
        // Strong-bound violations are findings; only the n + k - 1 bound fails a run.
        std::size_t checked = 0, violations = 0;
        for (auto n : ns) {
            if (multiplicity(es, n).k == 1) {
                ++checked;
                if (courant_check(es, n, config.tau, EigenvectorSource::solver_basis(), true).l > n) {
                    ++violations;
                }
            }
        }
        out << "strong bound l <= n: " << checked - violations << "/" << checked << " simple eigenvalues\n";
    }
    return status.exit_code();
}

int run_invariance(const RunConfig& config, std::ostream& out)
{
    const Loaded in = load_input(config.input, config.default_measure_one);
    const auto& g = in.graph;
    const FormOperator op = assemble_operator(g);
    const auto lattice = invariant_subsets_bruteforce(op, config.alpha);
    const auto at = atoms(lattice);
    const auto parts = connected_components(g);
    bool agrees = true;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.size()); ++mask) {
        const auto a = VertexSubset::from_mask(g.size(), mask);
        const bool in_lattice = std::binary_search(lattice.begin(), lattice.end(), a);
        agrees = agrees && in_lattice == is_invariant_combinatorial(g, a);
    }
    ojson j;
    j["seed"] = config.seed;
    j["alpha"] = config.alpha;
    j["lattice_size"] = lattice.size();
    j["invariant_subsets"] = ojson::array();
    for (const auto& s : lattice) {
        j["invariant_subsets"].push_back(labels_json(g, s));
    }
    j["atoms"] = ojson::array();
    for (const auto& s : at) {
        j["atoms"].push_back(labels_json(g, s));
    }
    j["components"] = ojson::array();
    for (const auto& s : parts.components) {
        j["components"].push_back(labels_json(g, s));
    }
    j["combinatorial_agreement"] = agrees;
    j["atoms_are_components"] = at == parts.components;
    write_text_file(config.out / "invariance.json", dump_json(j));
    out << "invariant subsets: " << lattice.size() << ", components: " << parts.size() << "\n";
    return agrees && at == parts.components ? kExitOk : kExitFailure;
}

WeightedGraph family_member(const std::string& family, std::size_t n)
{
    if (family == "star") {
        return star_graph(n);
    }
    if (family == "path") {
        return path_graph(n);
    }
    if (family == "cycle") {
        return cycle_graph(n);
    }
    if (family == "complete") {
        return complete_graph(n);
    }
    throw PreconditionError("unknown family \"" + family + "\" (star, path, cycle, complete)");
}

int run_search_tight(const RunConfig& config, std::ostream& out)
{
    const std::size_t smallest = config.family == "star" || config.family == "cycle" ? 3 : 2;
    ojson instances = ojson::array();
    for (std::size_t size = smallest; size <= config.max_size; ++size) {
        const WeightedGraph g = family_member(config.family, size);
        const EigenSystem es = eigensystem(assemble_operator(g), config.cluster_tol);
        for (const auto& cluster : es.clusters) {
            const std::size_t n = cluster.start + 1;
            std::vector<std::pair<Vector, EigenvectorSource>> candidates;
            if (config.family == "star" && size >= 4 && n == 2) {
                candidates.emplace_back(star_alternating_leaves(size), EigenvectorSource::supplied());
            }
            for (std::size_t j = 0; j < cluster.count; ++j) {
                candidates.emplace_back(es.vector(cluster.start + j), EigenvectorSource::solver_basis());
            }
            for (int s = 0; cluster.count > 1 && s < config.samples; ++s) {
                const std::uint64_t seed = config.seed + 7919ULL * size + static_cast<std::uint64_t>(s);
                candidates.emplace_back(eigenspace_sample(es, n, seed), EigenvectorSource::random_rotation(seed));
            }
            for (const auto& [f, source] : candidates) {
                const auto r = courant_check_vector(es, n, f, config.tau, false, source);
                if (r.l == r.bound) {
                    ojson inst;
                    inst["graph"] = config.family + "_" + std::to_string(size);
                    inst["size"] = size;
                    inst["report"] = report_to_json(r, g);
                    inst["witness"] = f;
                    instances.push_back(std::move(inst));
                    break;
                }
            }
        }
    }
    ojson j;
    j["seed"] = config.seed;
    j["family"] = config.family;
    j["max_size"] = config.max_size;
    j["instances"] = std::move(instances);
    write_text_file(config.out / "tight.json", dump_json(j));
    out << "tight instances: " << j["instances"].size() << "\n";
    return kExitOk;
}

ojson tally_json(const LemmaTally& t)
{
    ojson j;
    j["passed"] = t.passed;
    j["failed"] = t.failed;
    j["failures"] = t.failures;
    return j;
}

ojson entry_json(const EntryResult& r, std::uint64_t seed)
{
    ojson j;
    j["seed"] = seed;
    j["name"] = r.name;
    j["vertices"] = r.vertices;
    j["edges"] = r.edges;
    j["components"] = r.components;
    j["eigenvalues"] = r.eigenvalues;
    ojson c;
    c["reports"] = r.courant.reports;
    c["violations"] = r.courant.violations;
    c["tight"] = r.courant.tight;
    c["ambiguous_clusters"] = r.courant.ambiguous_clusters;
    c["strong_checked"] = r.courant.strong_checked;
    c["strong_violations"] = r.courant.strong_violations;
    c["max_energy_defect"] = r.courant.max_energy_defect;
    j["courant"] = std::move(c);
    j["lemmas"] = ojson::object();
    for (const auto& [name, t] : r.lemmas) {
        j["lemmas"][name] = tally_json(t);
    }
    return j;
}

std::size_t worker_count(std::size_t jobs)
{
    std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NODALFORMS_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) {
                workers = std::min<std::size_t>(workers, static_cast<std::size_t>(cap));
            }
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::min(workers, jobs));
}

int run_corpus(const RunConfig& config, std::ostream& out)
{
    const std::string dir = config.input.empty() ? std::string("builtin") : config.input.string();
    const CorpusSummary s = corpus_run(dir, config, out);
    out << "entries: " << s.entries << ", errors: " << s.errors.size() << ", courant violations: "
        << s.courant_violations << "/" << s.courant_reports << "\n";
    for (const auto& [name, t] : s.lemmas) {
        out << "  " << std::left << std::setw(28) << name << t.passed << " passed, " << t.failed << " failed\n";
    }
    if (!s.all_pass()) {
        return kExitFailure;
    }
    return s.ambiguous_clusters > 0 ? kExitAmbiguous : kExitOk;
}

} // namespace

Mode parse_mode(const std::string& name)
{
    if (name == "spectrum") return Mode::spectrum;
    if (name == "nodal") return Mode::nodal;
    if (name == "invariance") return Mode::invariance;
    if (name == "corpus") return Mode::corpus;
    if (name == "search-tight") return Mode::search_tight;
    if (name == "grid") return Mode::grid;
    throw PreconditionError("unknown mode \"" + name + "\"");
}

std::string mode_name(Mode mode)
{
    switch (mode) {
    case Mode::spectrum: return "spectrum";
    case Mode::nodal: return "nodal";
    case Mode::invariance: return "invariance";
    case Mode::corpus: return "corpus";
    case Mode::search_tight: return "search-tight";
    case Mode::grid: return "grid";
    }
    return "unknown";
}

void RunConfig::validate() const
{
    if (!(tau > 0.0) || !(cluster_tol > 0.0) || !(alpha > 0.0)) {
        throw PreconditionError("--tau, --cluster-tol and --alpha must be positive");
    }
    if (samples < 0) {
        throw PreconditionError("--samples must be nonnegative");
    }
}

std::vector<std::size_t> parse_n_range(const std::string& spec, std::size_t dim)
{
    std::size_t first = 1, last = dim;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || s.front() == '-') {
            throw PreconditionError("bad --n value \"" + spec + "\"");
        }
        return static_cast<std::size_t>(v);
    };
    if (spec != "all") {
        const auto dots = spec.find("..");
        if (dots == std::string::npos) {
            first = last = number(spec);
        } else {
            first = number(spec.substr(0, dots));
            last = number(spec.substr(dots + 2));
        }
    }
    if (first < 1 || last > dim || first > last) {
        throw IndexError("--n range " + spec + " outside 1.." + std::to_string(dim));
    }
    std::vector<std::size_t> out;
    for (std::size_t n = first; n <= last; ++n) {
        out.push_back(n);
    }
    return out;
}

bool CorpusSummary::all_pass() const
{
    if (!errors.empty() || courant_violations > 0) {
        return false;
    }
    return std::all_of(lemmas.begin(), lemmas.end(), [](const auto& kv) { return kv.second.failed == 0; });
}

CorpusSummary corpus_run(const std::string& dir, const RunConfig& config, std::ostream& log)
{
    struct Job {
        std::string name;
        std::optional<fs::path> file;
        std::optional<CorpusEntry> entry;
    };
    std::vector<Job> jobs;
    if (dir == "builtin") {
        for (auto& e : builtin_corpus(config.seed)) {
            jobs.push_back({e.name, std::nullopt, std::move(e)});
        }
    } else {
        if (!fs::is_directory(dir)) {
            throw Error("corpus directory not found: " + dir);
        }
        std::vector<fs::path> files;
        for (const auto& de : fs::directory_iterator(dir)) {
            if (de.is_regular_file() && de.path().extension() == ".json") {
                files.push_back(de.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            jobs.push_back({f.stem().string(), f, std::nullopt});
        }
    }

    const fs::path entry_dir = config.out / "entries";
    fs::create_directories(entry_dir);
    SuiteOptions options;
    options.tau_rel = config.tau;
    options.cluster_tol = config.cluster_tol;
    options.samples = config.samples;
    options.seed = config.seed;

    std::vector<std::optional<EntryResult>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            auto& job = jobs[i];
            try {
                if (!job.entry) {
                    Loaded in = load_input(*job.file, config.default_measure_one);
                    job.entry = CorpusEntry{job.name, std::move(in.graph), std::move(in.grid)};
                }
                EntryResult r = run_property_suite(job.name, job.entry->graph, job.entry->grid, options);
                write_text_file(entry_dir / (job.name + ".json"), dump_json(entry_json(r, config.seed)));
                results[i] = std::move(r);
            } catch (const std::exception& e) {
                errors[i] = e.what();
                std::lock_guard lock(log_mutex);
                log << "error: " << job.name << ": " << e.what() << "\n";
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = worker_count(jobs.size());
    for (std::size_t w = 0; w + 1 < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    CorpusSummary s;
    ojson entries = ojson::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!results[i]) {
            s.errors.emplace_back(jobs[i].file ? jobs[i].file->filename().string() : jobs[i].name, errors[i]);
            continue;
        }
        const auto& r = *results[i];
        ++s.entries;
        for (const auto& [name, t] : r.lemmas) {
            s.lemmas[name] += t;
        }
        s.courant_reports += r.courant.reports;
        s.courant_violations += r.courant.violations;
        s.ambiguous_clusters += r.courant.ambiguous_clusters;
        s.strong_checked += r.courant.strong_checked;
        s.strong_violations += r.courant.strong_violations;
        entries.push_back(r.name);
    }

    ojson j;
    j["seed"] = config.seed;
    j["source"] = dir == "builtin" ? std::string("builtin") : fs::path(dir).filename().string();
    j["entries"] = std::move(entries);
    ojson courant;
    courant["reports"] = s.courant_reports;
    courant["violations"] = s.courant_violations;
    courant["ambiguous_clusters"] = s.ambiguous_clusters;
    courant["strong_checked"] = s.strong_checked;
    courant["strong_violations"] = s.strong_violations;
    j["courant"] = std::move(courant);
    j["lemmas"] = ojson::object();
    for (const auto& [name, t] : s.lemmas) {
        j["lemmas"][name] = tally_json(t);
    }
    j["errors"] = ojson::array();
    for (const auto& [file, message] : s.errors) {
        j["errors"].push_back({{"input", file}, {"message", message}});
    }
    j["all_pass"] = s.all_pass();
    write_text_file(config.out / "summary.json", dump_json(j));
    return s;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        config.validate();
        fs::create_directories(config.out);
        switch (config.mode) {
        case Mode::spectrum:
            return run_spectrum(config, out);
        case Mode::nodal:
            return run_nodal(config, out, false);
        case Mode::grid:
            return run_nodal(config, out, true);
        case Mode::invariance:
            return run_invariance(config, out);
        case Mode::corpus:
            return run_corpus(config, out);
        case Mode::search_tight:
            return run_search_tight(config, out);
        }
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitFailure;
}

} // namespace nodalforms
