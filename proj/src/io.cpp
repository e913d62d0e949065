#include "nodalforms/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nodalforms/errors.hpp"

namespace nodalforms {

using nlohmann::json;

namespace {

class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {}

    std::map<std::string, int> run()
    {
        value("");
        return std::move(lines_);
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void advance()
    {
        if (peek() == '\n') {
            ++line_;
        }
        ++pos_;
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) {
            advance();
        }
    }

    std::string string_token()
    {
        std::string out;
        advance();
        while (pos_ < text_.size() && peek() != '"') {
            if (peek() == '\\') {
                advance();
                const char esc = peek();
                out.push_back(esc == 'n' ? '\n' : esc == 't' ? '\t' : esc);
            } else {
                out.push_back(peek());
            }
            advance();
        }
        advance();
        return out;
    }

    static std::string escape(const std::string& key)
    {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    void value(const std::string& pointer)
    {
        skip_ws();
        lines_[pointer] = line_;
        const char c = peek();
        if (c == '{') {
            advance();
            skip_ws();
            while (pos_ < text_.size() && peek() != '}') {
                const std::string key = string_token();
                skip_ws();
                advance(); // ':'
                value(pointer + "/" + escape(key));
                skip_ws();
                if (peek() == ',') {
                    advance();
                    skip_ws();
                }
            }
            advance();
        } else if (c == '[') {
            advance();
            skip_ws();
            std::size_t index = 0;
            while (pos_ < text_.size() && peek() != ']') {
                value(pointer + "/" + std::to_string(index++));
                skip_ws();
                if (peek() == ',') {
                    advance();
                }
                skip_ws();
            }
            advance();
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(peek()) == std::string_view::npos) {
                advance();
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

int line_of_offset(std::string_view text, std::size_t offset)
{
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
        }
    }
    return line;
}

json parse_document(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw SchemaError(e.what(), line_of_offset(text, at));
    }
}

class Schema {
public:
    explicit Schema(std::string_view text) : lines_(json_value_lines(text)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& message) const
    {
        auto it = lines_.find(pointer);
        const int line = it == lines_.end() ? 0 : it->second;
        throw SchemaError("line " + std::to_string(line) + ": " + (pointer.empty() ? "/" : pointer) + ": " + message,
                          line);
    }

    void only_keys(const json& obj, const std::string& pointer, std::set<std::string> allowed) const
    {
        if (!obj.is_object()) {
            fail(pointer, "expected an object");
        }
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.count(key)) {
                fail(pointer + "/" + key, "unknown field \"" + key + "\"");
            }
        }
    }

    double number(const json& obj, const std::string& pointer, const std::string& key) const
    {
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            fail(pointer + "/" + key, "expected a number");
        }
        return v.get<double>();
    }

    std::string string(const json& obj, const std::string& pointer, const std::string& key) const
    {
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            fail(pointer + "/" + key, "expected a string");
        }
        return v.get<std::string>();
    }

    const json& array(const json& obj, const std::string& pointer, const std::string& key) const
    {
        if (!obj.contains(key)) {
            fail(pointer, "missing field \"" + key + "\"");
        }
        const auto& v = obj.at(key);
        if (!v.is_array()) {
            fail(pointer + "/" + key, "expected an array");
        }
        return v;
    }

private:
    std::map<std::string, int> lines_;
};

} // namespace

std::map<std::string, int> json_value_lines(std::string_view text)
{
    return LineScanner(text).run();
}

WeightedGraph parse_graph_json(std::string_view text, bool default_measure_one)
{
    const json doc = parse_document(text);
    const Schema schema(text);
    schema.only_keys(doc, "", {"vertices", "edges"});

    std::vector<std::string> labels;
    Vector m, c;
    std::map<std::string, std::size_t> index;
    const auto& vertices = schema.array(doc, "", "vertices");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const std::string p = "/vertices/" + std::to_string(i);
        const auto& v = vertices[i];
        schema.only_keys(v, p, {"label", "m", "c"});
        if (!v.contains("label")) {
            schema.fail(p, "missing field \"label\"");
        }
        const std::string label = schema.string(v, p, "label");
        if (!index.emplace(label, i).second) {
            schema.fail(p + "/label", "duplicate label \"" + label + "\"");
        }
        double mass = 1.0;
        if (v.contains("m")) {
            mass = schema.number(v, p, "m");
        } else if (!default_measure_one) {
            schema.fail(p, "missing field \"m\" (use --default-measure-one for m = 1)");
        }
        if (!(mass > 0.0) || !std::isfinite(mass)) {
            schema.fail(p + (v.contains("m") ? "/m" : ""), "measure must be finite and positive");
        }
        const double kill = v.contains("c") ? schema.number(v, p, "c") : 0.0;
        if (!(kill >= 0.0) || !std::isfinite(kill)) {
            schema.fail(p + "/c", "killing term must be finite and nonnegative");
        }
        labels.push_back(label);
        m.push_back(mass);
        c.push_back(kill);
    }

    std::vector<Edge> edges;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    if (doc.contains("edges")) {
        const auto& list = schema.array(doc, "", "edges");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = "/edges/" + std::to_string(i);
            const auto& e = list[i];
            schema.only_keys(e, p, {"u", "v", "b"});
            for (const char* key : {"u", "v", "b"}) {
                if (!e.contains(key)) {
                    schema.fail(p, std::string("missing field \"") + key + "\"");
                }
            }
            auto endpoint = [&](const char* key) {
                const std::string label = schema.string(e, p, key);
                auto it = index.find(label);
                if (it == index.end()) {
                    schema.fail(p + "/" + key, "unknown vertex \"" + label + "\"");
                }
                return it->second;
            };
            const std::size_t u = endpoint("u");
            const std::size_t v = endpoint("v");
            const double b = schema.number(e, p, "b");
            if (u == v) {
                schema.fail(p, "self-loop on \"" + labels[u] + "\"");
            }
            if (!(b > 0.0) || !std::isfinite(b)) {
                schema.fail(p + "/b", "edge weight must be finite and positive");
            }
            if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
                schema.fail(p, "duplicate edge");
            }
            edges.push_back({u, v, b});
        }
    }
    if (labels.empty()) {
        schema.fail("/vertices", "graph needs at least one vertex");
    }
    return WeightedGraph(std::move(labels), std::move(m), std::move(c), std::move(edges));
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

WeightedGraph load_graph(const std::filesystem::path& path, bool default_measure_one)
{
    const std::string text = read_text_file(path);
    try {
        return parse_graph_json(text, default_measure_one);
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ":" + e.what(), e.line());
    }
}

Vector read_field_file(const std::filesystem::path& path, std::size_t expected)
{
    std::istringstream in(read_text_file(path));
    Vector out;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) {
                throw std::invalid_argument(token);
            }
        } catch (const std::exception&) {
            throw SchemaError(path.string() + ": not a number: \"" + token + "\"");
        }
    }
    if (out.size() != expected) {
        throw SchemaError(path.string() + ": expected " + std::to_string(expected) + " values, found " +
                          std::to_string(out.size()));
    }
    return out;
}

bool looks_like_grid(std::string_view text)
{
    try {
        const json doc = json::parse(text);
        return doc.is_object() && doc.contains("dims");
    } catch (const json::parse_error&) {
        return false;
    }
}

GridSpec parse_grid_json(std::string_view text, const std::filesystem::path& base_dir)
{
    const json doc = parse_document(text);
    const Schema schema(text);
    schema.only_keys(doc, "", {"dims", "shape", "h", "a", "V", "mask", "mu"});
    for (const char* key : {"dims", "shape", "h"}) {
        if (!doc.contains(key)) {
            schema.fail("", std::string("missing field \"") + key + "\"");
        }
    }
    if (!doc["dims"].is_number_integer()) {
        schema.fail("/dims", "expected an integer");
    }
    const int dims = doc["dims"].get<int>();
    if (dims != 1 && dims != 2) {
        schema.fail("/dims", "dims must be 1 or 2");
    }
    const auto& shape = schema.array(doc, "", "shape");
    if (shape.size() != static_cast<std::size_t>(dims)) {
        schema.fail("/shape", "shape needs " + std::to_string(dims) + " entries");
    }
    std::vector<std::size_t> extent;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (!shape[i].is_number_integer() || shape[i].get<long long>() < 1) {
            schema.fail("/shape/" + std::to_string(i), "expected a positive integer");
        }
        extent.push_back(shape[i].get<std::size_t>());
    }
    const double h = schema.number(doc, "", "h");
    if (!(h > 0.0) || !std::isfinite(h)) {
        schema.fail("/h", "mesh width must be positive");
    }
    GridSpec spec = dims == 1 ? GridSpec::interval(extent[0], h) : GridSpec::rectangle(extent[0], extent[1], h);

    auto field = [&](const char* key) -> std::optional<Vector> {
        const auto& v = doc[key];
        if (v.is_number()) {
            return Vector(spec.cells(), v.get<double>());
        }
        if (v.is_string()) {
            try {
                return read_field_file(base_dir / v.get<std::string>(), spec.cells());
            } catch (const Error& e) {
                schema.fail(std::string("/") + key, e.what());
            }
        }
        schema.fail(std::string("/") + key, "expected a number or a field file name");
    };
    if (doc.contains("a")) {
        const auto& v = doc["a"];
        if (v.is_number()) {
            const double a = v.get<double>();
            if (!(a > 0.0) || !std::isfinite(a)) {
                schema.fail("/a", "conductivity must be positive");
            }
            std::fill(spec.a_x.begin(), spec.a_x.end(), a);
            std::fill(spec.a_y.begin(), spec.a_y.end(), a);
        } else {
            spec.set_conductivity_cells(*field("a"));
        }
    }
    if (doc.contains("V")) {
        spec.potential = *field("V");
    }
    if (doc.contains("mask") && !doc["mask"].is_null()) {
        if (!doc["mask"].is_string()) {
            schema.fail("/mask", "expected a file name or null");
        }
        Vector mask;
        try {
            mask = read_field_file(base_dir / doc["mask"].get<std::string>(), spec.cells());
        } catch (const Error& e) {
            schema.fail("/mask", e.what());
        }
        for (std::size_t i = 0; i < mask.size(); ++i) {
            spec.mask[i] = mask[i] != 0.0 ? 1 : 0;
        }
    }
    if (doc.contains("mu")) {
        const auto& mu = schema.array(doc, "", "mu");
        if (mu.size() != 2 || !mu[0].is_number() || !mu[1].is_number()) {
            schema.fail("/mu", "expected [mu1, mu2]");
        }
        spec.mu1 = mu[0].get<double>();
        spec.mu2 = mu[1].get<double>();
        if (!(spec.mu1 > 0.0) || !(spec.mu1 <= spec.mu2)) {
            schema.fail("/mu", "need 0 < mu1 <= mu2");
        }
    }
    try {
        spec.validate();
    } catch (const EmptyDomain&) {
        throw;
    } catch (const Error& e) {
        schema.fail("", e.what());
    }
    return spec;
}

GridSpec load_grid(const std::filesystem::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return parse_grid_json(text, path.parent_path());
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ":" + e.what(), e.line());
    }
}

nlohmann::ordered_json report_to_json(const CourantReport& r, const WeightedGraph& g)
{
    auto domains = [&](const std::vector<VertexSubset>& list) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& d : list) {
            nlohmann::ordered_json labels = nlohmann::ordered_json::array();
            for (auto x : d.indices()) {
                labels.push_back(g.label(x));
            }
            out.push_back(std::move(labels));
        }
        return out;
    };
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["lambda"] = r.lambda;
    j["k"] = r.k;
    j["l"] = r.l;
    j["bound"] = r.bound;
    j["passes"] = r.passes;
    j["strong_passes"] = r.strong_passes ? nlohmann::ordered_json(*r.strong_passes) : nlohmann::ordered_json(nullptr);
    j["tau"] = r.tau;
    j["cluster_tol"] = r.cluster_tol;
    j["source"] = r.source.name();
    j["positive_domains"] = domains(r.decomposition.positive_domains);
    j["negative_domains"] = domains(r.decomposition.negative_domains);
    return j;
}

nlohmann::ordered_json graph_to_json(const WeightedGraph& g)
{
    nlohmann::ordered_json j;
    j["vertices"] = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < g.size(); ++x) {
        j["vertices"].push_back({{"label", g.label(x)}, {"m", g.measure()[x]}, {"c", g.killing()[x]}});
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges()) {
        j["edges"].push_back({{"u", g.label(e.u)}, {"v", g.label(e.v)}, {"b", e.weight}});
    }
    return j;
}

std::string dump_json(const nlohmann::ordered_json& j)
{
    return j.dump(2) + "\n";
}

} // namespace nodalforms
