#include "spn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spn/errors.hpp"

namespace spn::io {
namespace fs = std::filesystem;
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view text, const std::string& source, std::size_t row, std::size_t col) {
    const std::string cell = trim(text);
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    if (!cell.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (cell.empty() || ec != std::errc{} || ptr != end) {
        std::ostringstream msg;
        msg << source << ": cannot parse '" << cell << "' at row " << row << ", column " << col;
        throw SchemaError(msg.str());
    }
    return v;
}

std::vector<double> parse_row(const std::string& line, const std::string& source, std::size_t row) {
    std::vector<double> values;
    std::size_t start = 0;
    for (std::size_t col = 0;; ++col) {
        const std::size_t comma = line.find(',', start);
        const std::string_view cell = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        values.push_back(parse_double(cell, source, row, col));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

template <typename T>
T required(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key)) throw SchemaError(std::string("manifest is missing field '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("manifest field '") + key + "': " + e.what());
    }
}

std::size_t index_of(const std::vector<std::string>& list, const std::string& value, const char* what) {
    const auto it = std::find(list.begin(), list.end(), value);
    if (it == list.end()) throw SchemaError(std::string("manifest references unknown ") + what + " '" + value + "'");
    return static_cast<std::size_t>(it - list.begin());
}

std::vector<std::optional<fs::path>> parse_cells(const nlohmann::json& entries, const Manifest& m,
                                                 const fs::path& base_dir, const char* field) {
    if (!entries.is_array()) throw SchemaError(std::string("manifest field '") + field + "' must be an array");
    const std::size_t J = m.conditions.size();
    std::vector<std::optional<fs::path>> cells(m.subjects.size() * J);
    for (const auto& entry : entries) {
        const auto subject = required<std::string>(entry, "subject");
        const auto condition = required<std::string>(entry, "condition");
        const fs::path path = required<std::string>(entry, "path");
        const std::size_t cell = index_of(m.subjects, subject, "subject") * J + index_of(m.conditions, condition, "condition");
        if (cells[cell]) {
            throw SchemaError("manifest lists cell (" + subject + ", " + condition + ") more than once in '" + field + "'");
        }
        cells[cell] = path.is_absolute() ? path : base_dir / path;
    }
    return cells;
}

void check_unique(const std::vector<std::string>& list, const char* what) {
    std::set<std::string> seen(list.begin(), list.end());
    if (seen.size() != list.size()) throw SchemaError(std::string("duplicate ") + what + " identifiers in manifest");
}

const fs::path& require_cell(const std::vector<std::optional<fs::path>>& cells, const Manifest& m, std::size_t s,
                             std::size_t c) {
    const auto& cell = cells[s * m.conditions.size() + c];
    const std::string where = "(" + m.subjects[s] + ", " + m.conditions[c] + ")";
    if (!cell) throw IncompleteDesignError("no file for cell " + where);
    if (!fs::exists(*cell)) throw IncompleteDesignError("missing file for cell " + where + ": " + cell->string());
    return *cell;
}

nlohmann::ordered_json nodes_to_json(const std::vector<Node>& nodes) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const Node& n : nodes) {
        nlohmann::ordered_json node;
        node["label"] = n.label;
        if (n.coords) node["coords"] = *n.coords;
        out.push_back(std::move(node));
    }
    return out;
}

std::vector<Node> nodes_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw SchemaError("'nodes' must be an array");
    std::vector<Node> nodes;
    for (const auto& entry : doc) {
        Node n;
        if (entry.is_string()) {
            n.label = entry.get<std::string>();
        } else {
            n.label = required<std::string>(entry, "label");
            if (entry.contains("coords") && !entry.at("coords").is_null()) n.coords = required<Coord>(entry, "coords");
        }
        nodes.push_back(std::move(n));
    }
    return nodes;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string dot_nodes(const std::vector<Node>& nodes) {
    std::string out;
    for (const Node& n : nodes) {
        out += "  " + quoted(n.label);
        if (n.coords) {
            const Coord& c = *n.coords;
            out += " [pos=\"" + format_number(c[0]) + "," + format_number(c[1]) + "," + format_number(c[2]) + "!\"]";
        }
        out += ";\n";
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

SquareMatrix parse_matrix_csv(std::istream& in, const std::string& source) {
    std::vector<double> values;
    std::size_t n = 0;
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row = parse_row(line, source, rows);
        if (rows == 0) n = row.size();
        if (row.size() != n) {
            std::ostringstream msg;
            msg << source << ": row " << rows << " has " << row.size() << " columns, expected " << n;
            throw SchemaError(msg.str());
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows != n || n == 0) {
        std::ostringstream msg;
        msg << source << ": expected a square matrix, got " << rows << " rows of " << n << " columns";
        throw SchemaError(msg.str());
    }
    return SquareMatrix(n, std::move(values));
}

SquareMatrix read_matrix_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    return parse_matrix_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const SquareMatrix& m) {
    std::string text;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j) text += ',';
            text += format_number(m(i, j));
        }
        text += '\n';
    }
    out << text;
}

std::vector<double> read_vector_csv(const fs::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (rows++ > 0) throw SchemaError(path.string() + ": signal files hold a single row");
        values = parse_row(line, path.string(), 0);
    }
    if (values.empty()) throw SchemaError(path.string() + ": empty signal file");
    return values;
}

Manifest parse_manifest(const nlohmann::json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw SchemaError("manifest must be a JSON object");
    if (required<int>(doc, "schema") != kManifestSchema)
        throw SchemaError("unsupported manifest schema; expected " + std::to_string(kManifestSchema));

    Manifest m;
    m.subjects = required<std::vector<std::string>>(doc, "subjects");
    m.conditions = required<std::vector<std::string>>(doc, "conditions");
    check_unique(m.subjects, "subject");
    check_unique(m.conditions, "condition");
    if (!doc.contains("nodes")) throw SchemaError("manifest is missing field 'nodes'");
    m.nodes = nodes_from_json(doc.at("nodes"));
    m.files = parse_cells(doc.contains("files") ? doc.at("files") : nlohmann::json::array(), m, base_dir, "files");
    if (doc.contains("signals")) {
        m.signal_files = parse_cells(doc.at("signals"), m, base_dir, "signals");
    }

    if (doc.contains("options")) {
        const auto& o = doc.at("options");
        if (o.contains("standardize")) m.options.standardize = required<bool>(o, "standardize");
        if (o.contains("absolute"))
            m.options.negatives = required<bool>(o, "absolute") ? NegativePolicy::absolute : NegativePolicy::reject;
        if (o.contains("base_rate")) m.options.base_rate = required<double>(o, "base_rate");
        if (o.contains("density_grid")) m.options.density_grid = required<std::vector<std::size_t>>(o, "density_grid");
        if (o.contains("seed")) m.options.seed = required<std::uint64_t>(o, "seed");
        if (o.contains("correction")) {
            const auto c = required<std::string>(o, "correction");
            if (c == "fdr") m.options.correction = Correction::fdr;
            else if (c == "none") m.options.correction = Correction::none;
            else throw SchemaError("unknown correction '" + c + "'");
        }
    }
    if (!(m.options.base_rate > 0.0 && m.options.base_rate < 1.0))
        throw ValidationError("base_rate must lie in (0, 1)");
    return m;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in = open_input(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return parse_manifest(doc, path.parent_path());
}

StudyDataset load_dataset(const Manifest& m) {
    StudyDataset data;
    data.subject_ids = m.subjects;
    data.condition_labels = m.conditions;
    data.nodes = m.nodes;
    const std::size_t nv = m.nodes.size();
    for (std::size_t s = 0; s < m.subjects.size(); ++s) {
        for (std::size_t c = 0; c < m.conditions.size(); ++c) {
            const fs::path& path = require_cell(m.files, m, s, c);
            SquareMatrix raw = read_matrix_csv(path);
            if (raw.size() != nv) {
                std::ostringstream msg;
                msg << path.string() << ": matrix is " << raw.size() << "x" << raw.size() << " but the manifest lists "
                    << nv << " nodes";
                throw SchemaError(msg.str());
            }
            for (std::size_t i = 0; i < nv; ++i) {
                for (std::size_t j = 0; j < nv; ++j) {
                    const double r = raw(i, j);
                    if (!(r >= -1.0 && r <= 1.0)) {
                        std::ostringstream msg;
                        msg << path.string() << ": entry (" << i << ", " << j << ") = " << r << " is outside [-1, 1]";
                        throw DataError(msg.str());
                    }
                }
                if (raw(i, i) != 0.0 && raw(i, i) != 1.0) {
                    std::ostringstream msg;
                    msg << path.string() << ": diagonal entry " << i << " must be 0 or 1";
                    throw DataError(msg.str());
                }
                raw(i, i) = 0.0;
            }
            try {
                data.correlations.push_back(symmetrized(raw));
            } catch (const ValidationError& e) {
                throw DataError(path.string() + ": " + e.what());
            }
        }
    }
    data.validate();
    return data;
}

StudyDataset load_dataset(const fs::path& manifest_path) { return load_dataset(load_manifest(manifest_path)); }

NodeSignalDataset load_node_signals(const Manifest& m) {
    if (m.signal_files.empty()) throw SchemaError("manifest has no 'signals' entries");
    NodeSignalDataset data;
    data.subject_ids = m.subjects;
    data.condition_labels = m.conditions;
    data.nodes = m.nodes;
    for (std::size_t s = 0; s < m.subjects.size(); ++s) {
        for (std::size_t c = 0; c < m.conditions.size(); ++c) {
            const fs::path& path = require_cell(m.signal_files, m, s, c);
            std::vector<double> v = read_vector_csv(path);
            if (v.size() != m.nodes.size())
                throw SchemaError(path.string() + ": signal length does not match the node table");
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!std::isfinite(v[i]))
                    throw DataError(path.string() + ": non-finite signal at node " + std::to_string(i));
            data.signals.push_back(std::move(v));
        }
    }
    data.validate();
    return data;
}

WeightedGraph association_graph(const SquareMatrix& association, std::vector<Node> nodes, NegativePolicy policy) {
    SquareMatrix w = symmetrized(association);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w(i, i) = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (w(i, j) >= 0.0) continue;
            if (policy == NegativePolicy::absolute) {
                w(i, j) = -w(i, j);
            } else {
                std::ostringstream msg;
                msg << "negative association " << w(i, j) << " at (" << i << ", " << j
                    << "); rerun with absolute values enabled or remove negative weights";
                throw DataError(msg.str());
            }
        }
    }
    return WeightedGraph(std::move(w), std::move(nodes));
}

WeightedGraph standardize_weights(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = g.weight(i, j);
            if (w <= 0.0) continue;
            lo = any ? std::min(lo, w) : w;
            hi = any ? std::max(hi, w) : w;
            any = true;
        }
    if (!any || !(hi > lo)) throw DegenerateError("standardization needs at least two distinct positive weights");

    const double delta = (hi - lo) * 1e-6;
    SquareMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double w = g.weight(i, j);
            out(i, j) = w > 0.0 ? (w - lo + delta) / (hi - lo + delta) : 0.0;
        }
    return WeightedGraph(std::move(out), g.nodes());
}

GraphFormat parse_format(const std::string& name) {
    if (name == "dot") return GraphFormat::dot;
    if (name == "json") return GraphFormat::json;
    if (name == "csv") return GraphFormat::csv;
    throw ValidationError("unknown format '" + name + "' (expected dot, json or csv)");
}

nlohmann::ordered_json graph_to_json(const BinaryGraph& g) {
    nlohmann::ordered_json doc;
    doc["type"] = "binary";
    doc["nodes"] = nodes_to_json(g.nodes());
    doc["edge_count"] = g.edge_count();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < g.node_count(); ++j) row.push_back(g.has_edge(i, j) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    doc["adjacency"] = std::move(rows);
    return doc;
}

nlohmann::ordered_json graph_to_json(const WeightedGraph& g) {
    nlohmann::ordered_json doc;
    doc["type"] = "weighted";
    doc["nodes"] = nodes_to_json(g.nodes());
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto r = g.weights().row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    doc["weights"] = std::move(rows);
    return doc;
}

AnyGraph graph_from_json(const nlohmann::json& doc) {
    const auto type = required<std::string>(doc, "type");
    std::vector<Node> nodes = nodes_from_json(doc.at("nodes"));
    const std::size_t n = nodes.size();
    if (type == "binary") {
        const auto adj = required<std::vector<std::vector<int>>>(doc, "adjacency");
        if (adj.size() != n) throw SchemaError("adjacency size does not match node table");
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            if (adj[i].size() != n) throw SchemaError("adjacency is not square");
            for (std::size_t j = 0; j < n; ++j) {
                if (adj[i][j] != adj[j][i] || (adj[i][j] != 0 && adj[i][j] != 1) || (i == j && adj[i][j] != 0))
                    throw SchemaError("adjacency must be a symmetric hollow 0/1 matrix");
                if (j > i && adj[i][j]) edges.push_back({i, j});
            }
        }
        BinaryGraph g(std::move(nodes), edges);
        if (doc.contains("edge_count") && required<std::size_t>(doc, "edge_count") != g.edge_count())
            throw SchemaError("edge_count does not match adjacency");
        return g;
    }
    if (type == "weighted") {
        const auto rows = required<std::vector<std::vector<double>>>(doc, "weights");
        if (rows.size() != n) throw SchemaError("weights size does not match node table");
        SquareMatrix w(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) throw SchemaError("weights are not square");
            for (std::size_t j = 0; j < n; ++j) w(i, j) = rows[i][j];
        }
        return WeightedGraph(std::move(w), std::move(nodes));
    }
    throw SchemaError("unknown graph type '" + type + "'");
}

std::string to_dot(const BinaryGraph& g, const std::string& name) {
    std::string out = "graph " + quoted(name) + " {\n" + dot_nodes(g.nodes());
    for (const Edge& e : g.edges()) out += "  " + quoted(g.nodes()[e.i].label) + " -- " + quoted(g.nodes()[e.j].label) + ";\n";
    out += "}\n";
    return out;
}

std::string to_dot(const WeightedGraph& g, const std::string& name) {
    std::string out = "graph " + quoted(name) + " {\n" + dot_nodes(g.nodes());
    for (const Edge& e : g.edges()) {
        out += "  " + quoted(g.nodes()[e.i].label) + " -- " + quoted(g.nodes()[e.j].label) +
               " [weight=" + format_number(g.weight(e.i, e.j)) + "];\n";
    }
    out += "}\n";
    return out;
}

std::string render_graph(const AnyGraph& g, GraphFormat format) {
    return std::visit(
        [format](const auto& graph) -> std::string {
            switch (format) {
                case GraphFormat::dot: return to_dot(graph);
                case GraphFormat::json: return graph_to_json(graph).dump(2) + "\n";
                case GraphFormat::csv: {
                    std::ostringstream out;
                    if constexpr (std::is_same_v<std::decay_t<decltype(graph)>, BinaryGraph>) {
                        write_matrix_csv(out, graph.adjacency_matrix());
                    } else {
                        write_matrix_csv(out, graph.weights());
                    }
                    return out.str();
                }
            }
            return {};
        },
        g);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

void export_graph(const AnyGraph& g, GraphFormat format, const fs::path& path) {
    write_text(path, render_graph(g, format));
}

}  // namespace spn::io
