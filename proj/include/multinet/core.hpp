#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace multinet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Marker for statistics that are undefined for a given input. Always NaN,
/// so it can never be mistaken for a legitimate 0.
inline constexpr double undefined = std::numeric_limits<double>::quiet_NaN();
inline bool is_defined(double v) { return v == v; }

enum class LayerKind { financial, environmental, other };

std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view text);

struct LayerSpec {
    std::string id;
    std::string name;
    LayerKind kind = LayerKind::other;
    std::string units;
};

struct NodeEntry {
    std::string id;
    std::string name;
    double financialisation = 0.0;  // percent
};

enum class NodeOrdering { financialisation, alphabetical, file_order };

NodeOrdering parse_node_ordering(std::string_view text);

class NodeTable {
public:
    NodeTable() = default;
    explicit NodeTable(std::vector<NodeEntry> entries);

    std::size_t size() const { return entries_.size(); }
    const NodeEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<NodeEntry>& entries() const { return entries_; }

    std::optional<std::size_t> find(std::string_view id) const;

    /// Permutation `p` such that entry p[k] is the k-th node in the given
    /// ordering. Financialisation ascends, ties keep their file order;
    /// alphabetical sorts by id.
    std::vector<std::size_t> ordering(NodeOrdering mode) const;

    NodeTable permuted(std::span<const std::size_t> order) const;

private:
    std::vector<NodeEntry> entries_;
};

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> order);

/// The T x K x N x N weight tensor. Immutable once built; every layer matrix
/// is nonnegative with a zero diagonal.
class MultiplexTensor {
public:
    /// `weights` is period-major: weights[t * K + k].
    MultiplexTensor(std::vector<std::string> periods, std::vector<LayerSpec> layers,
                    NodeTable nodes, std::vector<Matrix> weights);

    std::size_t period_count() const { return periods_.size(); }
    std::size_t layer_count() const { return layers_.size(); }
    std::size_t node_count() const { return nodes_.size(); }

    const std::vector<std::string>& periods() const { return periods_; }
    const std::vector<LayerSpec>& layers() const { return layers_; }
    const NodeTable& nodes() const { return nodes_; }

    const Matrix& layer(std::size_t t, std::size_t k) const { return weights_[t * layers_.size() + k]; }

    std::size_t layer_index(std::string_view id) const;
    std::size_t period_index(std::string_view label) const;
    std::vector<std::size_t> layers_of_kind(LayerKind kind) const;

    /// Elementwise mean of layer k over all periods.
    Matrix time_average(std::size_t k) const;

    /// Node k of the result is node order[k] of this tensor.
    MultiplexTensor reordered(std::span<const std::size_t> order) const;
    MultiplexTensor with_periods(std::span<const std::size_t> keep) const;
    MultiplexTensor without_period(std::string_view label) const;

    bool operator==(const MultiplexTensor& other) const;

private:
    std::vector<std::string> periods_;
    std::vector<LayerSpec> layers_;
    NodeTable nodes_;
    std::vector<Matrix> weights_;
};

/// Throws ValidationError unless `w` is square, finite, nonnegative and has
/// a zero diagonal.
void validate_layer(const Matrix& w);

Matrix binary_projection(const Matrix& w);

/// Min-based split of every dyad into its reciprocated part and the two
/// non-reciprocated remainders.
struct DyadDecomposition {
    Matrix right;   // w_ij - min(w_ij, w_ji)
    Matrix left;    // w_ji - min(w_ij, w_ji)
    Matrix mutual;  // min(w_ij, w_ji), symmetric
};

DyadDecomposition decompose_dyads(const Matrix& w);

struct LayerSummary {
    double total_weight = 0.0;
    long link_count = 0;
    long mutual_link_count = 0;
    double connectance = 0.0;
    double mean_weight = 0.0;
    Vector out_strength;     // sum_j right_ij
    Vector in_strength;      // sum_j left_ij
    Vector mutual_strength;  // sum_j mutual_ij
    Vector imbalance;        // export - import
};

LayerSummary layer_summary(const Matrix& w);

/// Export minus import per node: sum_j w_ij - sum_j w_ji.
Vector imbalance(const Matrix& w);

/// One imbalance vector per period for the named layer.
std::vector<Vector> imbalance_series(const MultiplexTensor& tensor, std::string_view layer_id);

}  // namespace multinet
