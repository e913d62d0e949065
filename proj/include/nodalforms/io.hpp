#ifndef NODALFORMS_IO_HPP
#define NODALFORMS_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nodalforms/elliptic.hpp"
#include "nodalforms/forms.hpp"
#include "nodalforms/nodal.hpp"
#include "nodalforms/spectral.hpp"

namespace nodalforms {

/// Line (1-based) of every value in a JSON document, keyed by JSON pointer.
/// The text must already be valid JSON.
std::map<std::string, int> json_value_lines(std::string_view text);

/// {"vertices": [{"label", "m", "c"}], "edges": [{"u", "v", "b"}]}. Unknown
/// fields are rejected; "c" defaults to 0 and "m" to 1 only when allowed.
/// Errors carry the line of the offending value.
WeightedGraph parse_graph_json(std::string_view text, bool default_measure_one = false);
WeightedGraph load_graph(const std::filesystem::path& path, bool default_measure_one = false);

/// {"dims", "shape", "h", "a", "V", "mask"} with optional "mu": [mu1, mu2].
/// "a" and "V" are numbers or field file names, "mask" a file name or null;
/// file names resolve against `base_dir`.
GridSpec parse_grid_json(std::string_view text, const std::filesystem::path& base_dir);
GridSpec load_grid(const std::filesystem::path& path);

/// Whitespace-separated numbers, row-major (x fastest).
Vector read_field_file(const std::filesystem::path& path, std::size_t expected);

/// True when the document has a top-level "dims" key.
bool looks_like_grid(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

nlohmann::ordered_json report_to_json(const CourantReport& r, const WeightedGraph& g);
nlohmann::ordered_json graph_to_json(const WeightedGraph& g);

/// Two-space indented dump with a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

} // namespace nodalforms

#endif
