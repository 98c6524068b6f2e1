#include "multinet/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "multinet/errors.hpp"

namespace multinet {

using nlohmann::json;

namespace {

std::string location(const fs::path& path, std::size_t line) { return path.string() + ":" + std::to_string(line); }

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out)
{
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string_view to_string(RescalePolicy p)
{
    switch (p) {
        case RescalePolicy::automatic: return "automatic";
        case RescalePolicy::always: return "always";
        case RescalePolicy::never: return "never";
    }
    return "automatic";
}

RescalePolicy parse_rescale(const std::string& text)
{
    if (text == "automatic") return RescalePolicy::automatic;
    if (text == "always") return RescalePolicy::always;
    if (text == "never") return RescalePolicy::never;
    throw ValidationError("unknown rescale policy '" + text + "'");
}

std::string_view to_string(NodeOrdering o)
{
    switch (o) {
        case NodeOrdering::financialisation: return "financialisation";
        case NodeOrdering::alphabetical: return "alphabetical";
        case NodeOrdering::file_order: return "file-order";
    }
    return "financialisation";
}

template <class T>
T required(const json& j, const char* key, const fs::path& path)
{
    if (!j.contains(key)) throw ValidationError(path.string() + ": manifest lacks '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": manifest field '" + key + "': " + e.what());
    }
}

std::string substitute(std::string pattern, const std::string& key, const std::string& value)
{
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos + value.size()))
        pattern.replace(pos, key.size(), value);
    return pattern;
}

}  // namespace

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string format_number(double v)
{
    if (!is_defined(v)) return "NA";
    if (v == 0.0) return "0";  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_exact(double v)
{
    if (!is_defined(v)) return "NA";
    if (v == 0.0) return "0";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& source)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1;
    auto end_row = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
        if (!(row.size() == 1 && trim(row[0]).empty())) rows.push_back(std::move(row));
        row.clear();
    };
    std::size_t start = text.compare(0, 3, "\xEF\xBB\xBF") == 0 ? 3 : 0;
    for (std::size_t k = start; k < text.size(); ++k) {
        const char c = text[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
            field_started = false;
        } else if (c == '\n') {
            end_row();
            ++line;
        } else if (c != '\r') {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw ValidationError(source + ":" + std::to_string(line) + ": unterminated quoted field");
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

std::string matrix_csv(const Matrix& values, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const std::string& corner)
{
    std::string out = csv_escape(corner);
    for (const auto& c : col_labels) out += "," + csv_escape(c);
    out += "\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out += csv_escape(row_labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + format_number(values(i, j));
        out += "\n";
    }
    return out;
}

NodeTable read_nodes(const fs::path& path)
{
    const auto rows = parse_csv(read_text(path), path.string());
    if (rows.empty()) throw ValidationError(path.string() + ": empty node file");
    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < rows[0].size(); ++c) column[trim(rows[0][c])] = c;
    for (const char* key : {"id", "financialisation"})
        if (!column.count(key)) throw ValidationError(path.string() + ": node file lacks column '" + key + "'");
    const auto name_col = column.count("name") ? std::optional<std::size_t>(column["name"]) : std::nullopt;

    std::vector<NodeEntry> entries;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto cell = [&](std::size_t c) { return c < row.size() ? trim(row[c]) : std::string(); };
        NodeEntry e;
        e.id = cell(column["id"]);
        if (name_col) e.name = cell(*name_col);
        const auto score = cell(column["financialisation"]);
        if (!parse_double(score, e.financialisation))
            throw ValidationError(location(path, r + 1) + ": bad financialisation value '" + score + "'");
        entries.push_back(std::move(e));
    }
    try {
        return NodeTable(std::move(entries));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_nodes(const NodeTable& nodes, const fs::path& path)
{
    std::string out = "id,name,financialisation\n";
    for (const auto& e : nodes.entries())
        out += csv_escape(e.id) + "," + csv_escape(e.name) + "," + format_exact(e.financialisation) + "\n";
    write_text(path, out);
}

MatrixFile read_matrix_csv(const fs::path& path, const NodeTable& nodes)
{
    const auto rows = parse_csv(read_text(path), path.string());
    const auto n = nodes.size();
    if (rows.empty()) throw ValidationError(path.string() + ": empty matrix file");

    auto node_of = [&](const std::string& raw, const std::string& where) {
        const auto id = trim(raw);
        const auto k = nodes.find(id);
        if (!k) throw ValidationError(where + ": unknown node '" + id + "'");
        return *k;
    };

    const auto& header = rows[0];
    if (header.size() != n + 1)
        throw ValidationError(location(path, 1) + ": expected " + std::to_string(n) + " node columns, found " +
                              std::to_string(header.size() - 1));
    std::vector<std::size_t> col_node(n);
    std::vector<bool> seen(n, false);
    for (std::size_t c = 0; c < n; ++c) {
        col_node[c] = node_of(header[c + 1], location(path, 1));
        if (seen[col_node[c]]) throw ValidationError(location(path, 1) + ": duplicate column '" + header[c + 1] + "'");
        seen[col_node[c]] = true;
    }
    if (rows.size() != n + 1)
        throw ValidationError(path.string() + ": expected " + std::to_string(n) + " data rows, found " +
                              std::to_string(rows.size() - 1));

    MatrixFile out{Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), 0};
    std::fill(seen.begin(), seen.end(), false);
    for (std::size_t r = 1; r <= n; ++r) {
        const auto& row = rows[r];
        const auto where = location(path, r + 1);
        if (row.size() != n + 1)
            throw ValidationError(where + ": expected " + std::to_string(n + 1) + " fields, found " +
                                  std::to_string(row.size()));
        const auto i = node_of(row[0], where);
        if (seen[i]) throw ValidationError(where + ": duplicate row '" + trim(row[0]) + "'");
        seen[i] = true;
        for (std::size_t c = 0; c < n; ++c) {
            const auto text = trim(row[c + 1]);
            double v = 0.0;
            if (!text.empty() && text != "NA" && !parse_double(text, v))
                throw ValidationError(where + ", column " + nodes[col_node[c]].id + ": not a number '" + text + "'");
            if (!std::isfinite(v))
                throw ValidationError(where + ", column " + nodes[col_node[c]].id + ": non-finite weight");
            if (v < 0.0)
                throw ValidationError(where + ", row " + nodes[i].id + ", column " + nodes[col_node[c]].id +
                                      ": negative weight " + text);
            const auto j = col_node[c];
            if (i == j) {
                if (v != 0.0) ++out.zeroed_diagonal;
                continue;
            }
            out.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return out;
}

Manifest load_manifest(const fs::path& path)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
    Manifest m;
    m.base_dir = path.parent_path();
    m.nodes_file = required<std::string>(j, "nodes_file", path);
    m.periods = required<std::vector<std::string>>(j, "periods", path);
    if (j.contains("ordering")) m.ordering = parse_node_ordering(required<std::string>(j, "ordering", path));

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        if (s.contains("tol")) m.solver.tol = required<double>(s, "tol", path);
        if (s.contains("max_iter")) m.solver.max_iter = required<int>(s, "max_iter", path);
        if (s.contains("damping")) m.solver.damping = required<double>(s, "damping", path);
        if (s.contains("rescale_target")) m.solver.rescale_target = required<double>(s, "rescale_target", path);
        if (s.contains("rescale")) m.solver.rescale = parse_rescale(required<std::string>(s, "rescale", path));
    }
    if (j.contains("aggregation")) {
        const auto& a = j["aggregation"];
        if (a.contains("financial")) m.financial_aggregate = required<std::vector<std::string>>(a, "financial", path);
        if (a.contains("environmental"))
            m.environmental_aggregate = required<std::vector<std::string>>(a, "environmental", path);
    }

    for (const auto& l : required<json>(j, "layers", path)) {
        ManifestLayer layer;
        layer.spec.id = required<std::string>(l, "id", path);
        layer.spec.name = l.value("name", "");
        layer.spec.units = l.value("units", "");
        layer.spec.kind = parse_layer_kind(l.value("kind", "other"));
        if (l.contains("files")) {
            for (const auto& [period, file] : l["files"].items()) layer.files[period] = file.get<std::string>();
        } else if (l.contains("file_pattern")) {
            const auto pattern = required<std::string>(l, "file_pattern", path);
            for (const auto& p : m.periods)
                layer.files[p] = substitute(substitute(pattern, "{layer}", layer.spec.id), "{period}", p);
        } else {
            throw ValidationError(path.string() + ": layer '" + layer.spec.id + "' lists no files");
        }
        for (const auto& p : m.periods)
            if (!layer.files.count(p))
                throw ValidationError(path.string() + ": layer '" + layer.spec.id + "' has no file for period " + p);
        if (layer.files.size() != m.periods.size())
            throw ValidationError(path.string() + ": layer '" + layer.spec.id + "' lists files for unknown periods");
        m.layers.push_back(std::move(layer));
    }
    if (m.layers.empty()) throw ValidationError(path.string() + ": manifest lists no layers");
    return m;
}

void write_manifest(const Manifest& m, const fs::path& path)
{
    json j;
    j["nodes_file"] = m.nodes_file.generic_string();
    j["periods"] = m.periods;
    j["ordering"] = std::string(to_string(m.ordering));
    j["solver"] = {{"tol", m.solver.tol},
                   {"max_iter", m.solver.max_iter},
                   {"damping", m.solver.damping},
                   {"rescale_target", m.solver.rescale_target},
                   {"rescale", std::string(to_string(m.solver.rescale))}};
    if (!m.financial_aggregate.empty() || !m.environmental_aggregate.empty())
        j["aggregation"] = {{"financial", m.financial_aggregate}, {"environmental", m.environmental_aggregate}};
    json layers = json::array();
    for (const auto& l : m.layers) {
        json files = json::object();
        for (const auto& p : m.periods) files[p] = l.files.at(p).generic_string();
        layers.push_back({{"id", l.spec.id},
                          {"name", l.spec.name},
                          {"kind", std::string(to_string(l.spec.kind))},
                          {"units", l.spec.units},
                          {"files", files}});
    }
    j["layers"] = layers;
    write_text(path, j.dump(2) + "\n");
}

Ingested ingest(const Manifest& m)
{
    const auto nodes = read_nodes(m.resolve(m.nodes_file));
    std::vector<Matrix> weights;
    std::vector<LayerSpec> specs;
    for (const auto& l : m.layers) specs.push_back(l.spec);

    std::size_t zeroed = 0;
    std::vector<std::string> warnings;
    for (const auto& period : m.periods)
        for (const auto& l : m.layers) {
            const auto file = m.resolve(l.files.at(period));
            auto read = read_matrix_csv(file, nodes);
            if (read.zeroed_diagonal > 0) {
                warnings.push_back(file.generic_string() + ": zeroed " + std::to_string(read.zeroed_diagonal) +
                                   " nonzero diagonal entries");
                zeroed += read.zeroed_diagonal;
            }
            weights.push_back(std::move(read.weights));
        }
    MultiplexTensor tensor(m.periods, specs, nodes, std::move(weights));
    const auto order = tensor.nodes().ordering(m.ordering);
    return {tensor.reordered(order), zeroed, std::move(warnings)};
}

void export_tensor(const MultiplexTensor& tensor, const fs::path& dir, const SolverConfig& solver)
{
    Manifest m;
    m.base_dir = dir;
    m.nodes_file = "nodes.csv";
    m.periods = tensor.periods();
    m.ordering = NodeOrdering::file_order;
    m.solver = solver;
    write_nodes(tensor.nodes(), dir / m.nodes_file);

    std::vector<std::string> ids;
    for (const auto& e : tensor.nodes().entries()) ids.push_back(e.id);
    for (std::size_t k = 0; k < tensor.layer_count(); ++k) {
        ManifestLayer layer{tensor.layers()[k], {}};
        for (std::size_t t = 0; t < tensor.period_count(); ++t) {
            const fs::path rel = fs::path("matrices") / (layer.spec.id + "_" + tensor.periods()[t] + ".csv");
            const Matrix& w = tensor.layer(t, k);
            std::string out = "id";
            for (const auto& id : ids) out += "," + csv_escape(id);
            out += "\n";
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                out += csv_escape(ids[static_cast<std::size_t>(i)]);
                for (Eigen::Index j = 0; j < w.cols(); ++j) out += "," + format_exact(w(i, j));
                out += "\n";
            }
            write_text(dir / rel, out);
            layer.files[tensor.periods()[t]] = rel;
        }
        m.layers.push_back(std::move(layer));
    }
    write_manifest(m, dir / "manifest.json");
}

}  // namespace multinet
