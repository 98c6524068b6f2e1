#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "multinet/core.hpp"
#include "multinet/nullmodel.hpp"

namespace multinet {

namespace fs = std::filesystem;

struct ManifestLayer {
    LayerSpec spec;
    std::map<std::string, fs::path> files;  // period label -> matrix CSV
};

struct Manifest {
    fs::path base_dir;  // relative paths resolve against this
    fs::path nodes_file;
    std::vector<std::string> periods;
    NodeOrdering ordering = NodeOrdering::financialisation;
    std::vector<ManifestLayer> layers;
    SolverConfig solver;
    std::vector<std::string> financial_aggregate;      // empty: every financial layer except TD
    std::vector<std::string> environmental_aggregate;  // empty: every environmental layer

    fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }
};

Manifest load_manifest(const fs::path& path);
void write_manifest(const Manifest& manifest, const fs::path& path);

NodeTable read_nodes(const fs::path& path);
void write_nodes(const NodeTable& nodes, const fs::path& path);

struct MatrixFile {
    Matrix weights;                   // rows and columns in NodeTable order
    std::size_t zeroed_diagonal = 0;  // nonzero self-loops that were dropped
};

/// First row and column hold node ids; cell (i, j) is the flow i -> j.
/// Blank and NA cells read as 0.
MatrixFile read_matrix_csv(const fs::path& path, const NodeTable& nodes);

struct Ingested {
    MultiplexTensor tensor;
    std::size_t zeroed_diagonal = 0;
    std::vector<std::string> warnings;
};

/// Reads every referenced file and returns the tensor in canonical node order.
Ingested ingest(const Manifest& manifest);

/// Writes the tensor as a manifest plus CSV files that ingest back exactly.
void export_tensor(const MultiplexTensor& tensor, const fs::path& dir, const SolverConfig& solver = {});

/// Fixed formatting shared by every artifact: %.12g, NA for undefined.
std::string format_number(double v);
/// Shortest text that parses back to exactly `v`.
std::string format_exact(double v);

std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& source);

std::string matrix_csv(const Matrix& values, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const std::string& corner = "id");

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace multinet
