#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "spn/graph.hpp"
#include "spn/spn_builder.hpp"

namespace spn::io {

inline constexpr int kManifestSchema = 1;

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

/// Headerless, comma-separated, row-major square matrix.
SquareMatrix read_matrix_csv(const std::filesystem::path& path);
SquareMatrix parse_matrix_csv(std::istream& in, const std::string& source);
void write_matrix_csv(std::ostream& out, const SquareMatrix& m);

/// One comma-separated row of numbers (node signals).
std::vector<double> read_vector_csv(const std::filesystem::path& path);

enum class NegativePolicy { reject, absolute };

struct ManifestOptions {
    bool standardize = false;
    NegativePolicy negatives = NegativePolicy::reject;
    double base_rate = 0.05;
    Correction correction = Correction::fdr;
    std::vector<std::size_t> density_grid;
    std::uint64_t seed = 0;
};

struct Manifest {
    std::vector<std::string> subjects;
    std::vector<std::string> conditions;
    std::vector<Node> nodes;
    /// Matrix file per cell, index subject * J + condition; resolved against
    /// the manifest directory.
    std::vector<std::optional<std::filesystem::path>> files;
    /// Optional node-signal files, same layout.
    std::vector<std::optional<std::filesystem::path>> signal_files;
    ManifestOptions options;
};

/// Parses and checks the manifest. Missing cells are reported by load_dataset,
/// not here, so partially filled manifests can still be inspected.
Manifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// Reads every matrix named by the manifest: checks dimensions, symmetry (then
/// symmetrizes), range [-1, 1], and a diagonal of 0 or 1 (stored as 0).
StudyDataset load_dataset(const Manifest& manifest);
StudyDataset load_dataset(const std::filesystem::path& manifest_path);

NodeSignalDataset load_node_signals(const Manifest& manifest);

/// Weighted graph from a signed association matrix. With NegativePolicy::reject
/// a negative entry raises DataError; with absolute the magnitudes are used.
WeightedGraph association_graph(const SquareMatrix& association, std::vector<Node> nodes, NegativePolicy policy);

/// Min-max rescaling of the positive weights onto (0, 1]. Zeros stay zero.
/// Throws DegenerateError unless at least two distinct positive weights exist.
WeightedGraph standardize_weights(const WeightedGraph& g);

enum class GraphFormat { dot, json, csv };

GraphFormat parse_format(const std::string& name);

using AnyGraph = std::variant<BinaryGraph, WeightedGraph>;

nlohmann::ordered_json graph_to_json(const BinaryGraph& g);
nlohmann::ordered_json graph_to_json(const WeightedGraph& g);
AnyGraph graph_from_json(const nlohmann::json& doc);

std::string to_dot(const BinaryGraph& g, const std::string& name = "G");
std::string to_dot(const WeightedGraph& g, const std::string& name = "G");

std::string render_graph(const AnyGraph& g, GraphFormat format);

/// Writes the graph in the given format. Throws IoError naming the path.
void export_graph(const AnyGraph& g, GraphFormat format, const std::filesystem::path& path);

/// Writes `text` to `path`, replacing it. Throws IoError naming the path.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace spn::io
