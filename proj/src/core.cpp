#include "multinet/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "multinet/errors.hpp"

namespace multinet {

std::string_view to_string(LayerKind kind)
{
    switch (kind) {
    case LayerKind::financial: return "financial";
    case LayerKind::environmental: return "environmental";
    case LayerKind::other: return "other";
    }
    return "other";
}

LayerKind parse_layer_kind(std::string_view text)
{
    if (text == "financial") return LayerKind::financial;
    if (text == "environmental") return LayerKind::environmental;
    if (text == "other") return LayerKind::other;
    throw ValidationError("unknown layer kind '" + std::string(text) + "'");
}

NodeOrdering parse_node_ordering(std::string_view text)
{
    if (text == "financialisation") return NodeOrdering::financialisation;
    if (text == "alphabetical") return NodeOrdering::alphabetical;
    if (text == "file-order") return NodeOrdering::file_order;
    throw ValidationError("unknown node ordering '" + std::string(text) + "'");
}

NodeTable::NodeTable(std::vector<NodeEntry> entries) : entries_(std::move(entries))
{
    std::set<std::string_view> seen;
    for (const auto& e : entries_) {
        if (e.id.empty())
            throw ValidationError("node id must be nonempty");
        if (!seen.insert(e.id).second)
            throw ValidationError("duplicate node id '" + e.id + "'");
        if (!std::isfinite(e.financialisation))
            throw ValidationError("node '" + e.id + "' has a non-finite financialisation score");
    }
}

std::optional<std::size_t> NodeTable::find(std::string_view id) const
{
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].id == id) return i;
    return std::nullopt;
}

std::vector<std::size_t> NodeTable::ordering(NodeOrdering mode) const
{
    std::vector<std::size_t> order(entries_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    switch (mode) {
    case NodeOrdering::file_order:
        break;
    case NodeOrdering::alphabetical:
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return entries_[a].id < entries_[b].id; });
        break;
    case NodeOrdering::financialisation:
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return entries_[a].financialisation < entries_[b].financialisation;
        });
        break;
    }
    return order;
}

NodeTable NodeTable::permuted(std::span<const std::size_t> order) const
{
    std::vector<NodeEntry> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(entries_.at(i));
    return NodeTable(std::move(out));
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> order)
{
    std::vector<std::size_t> inv(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) inv[order[k]] = k;
    return inv;
}

void validate_layer(const Matrix& w)
{
    if (w.rows() != w.cols())
        throw ValidationError("layer matrix is not square (" + std::to_string(w.rows()) + "x" +
                              std::to_string(w.cols()) + ")");
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            const double v = w(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("invalid weight at (" + std::to_string(i) + "," + std::to_string(j) +
                                      "): weights must be finite and nonnegative");
        }
        if (w(i, i) != 0.0)
            throw ValidationError("nonzero diagonal entry at node " + std::to_string(i));
    }
}

MultiplexTensor::MultiplexTensor(std::vector<std::string> periods, std::vector<LayerSpec> layers,
                                 NodeTable nodes, std::vector<Matrix> weights)
    : periods_(std::move(periods)), layers_(std::move(layers)), nodes_(std::move(nodes)),
      weights_(std::move(weights))
{
    if (weights_.size() != periods_.size() * layers_.size())
        throw ValidationError("tensor has " + std::to_string(weights_.size()) + " layer matrices, expected " +
                              std::to_string(periods_.size() * layers_.size()));
    std::set<std::string_view> ids;
    for (const auto& l : layers_)
        if (l.id.empty() || !ids.insert(l.id).second)
            throw ValidationError("layer ids must be unique and nonempty ('" + l.id + "')");
    std::set<std::string_view> labels;
    for (const auto& p : periods_)
        if (!labels.insert(p).second) throw ValidationError("duplicate period label '" + p + "'");

    const auto n = static_cast<Eigen::Index>(nodes_.size());
    for (const auto& w : weights_) {
        if (w.rows() != n || w.cols() != n)
            throw ValidationError("layer matrix dimension does not match the node table");
        validate_layer(w);
    }
}

std::size_t MultiplexTensor::layer_index(std::string_view id) const
{
    for (std::size_t k = 0; k < layers_.size(); ++k)
        if (layers_[k].id == id) return k;
    throw LookupError("unknown layer '" + std::string(id) + "'");
}

std::size_t MultiplexTensor::period_index(std::string_view label) const
{
    for (std::size_t t = 0; t < periods_.size(); ++t)
        if (periods_[t] == label) return t;
    throw LookupError("unknown period '" + std::string(label) + "'");
}

std::vector<std::size_t> MultiplexTensor::layers_of_kind(LayerKind kind) const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < layers_.size(); ++k)
        if (layers_[k].kind == kind) out.push_back(k);
    return out;
}

Matrix MultiplexTensor::time_average(std::size_t k) const
{
    const auto n = static_cast<Eigen::Index>(node_count());
    Matrix sum = Matrix::Zero(n, n);
    if (periods_.empty()) return sum;
    for (std::size_t t = 0; t < periods_.size(); ++t) sum += layer(t, k);
    return sum / static_cast<double>(periods_.size());
}

MultiplexTensor MultiplexTensor::reordered(std::span<const std::size_t> order) const
{
    const auto n = node_count();
    if (order.size() != n) throw ValidationError("permutation length does not match node count");
    std::vector<bool> hit(n, false);
    for (auto i : order) {
        if (i >= n || hit[i]) throw ValidationError("node order is not a permutation");
        hit[i] = true;
    }
    std::vector<Matrix> out;
    out.reserve(weights_.size());
    const auto sn = static_cast<Eigen::Index>(n);
    for (const auto& w : weights_) {
        Matrix p(sn, sn);
        for (Eigen::Index a = 0; a < sn; ++a)
            for (Eigen::Index b = 0; b < sn; ++b)
                p(a, b) = w(static_cast<Eigen::Index>(order[a]), static_cast<Eigen::Index>(order[b]));
        out.push_back(std::move(p));
    }
    return MultiplexTensor(periods_, layers_, nodes_.permuted(order), std::move(out));
}

MultiplexTensor MultiplexTensor::with_periods(std::span<const std::size_t> keep) const
{
    std::vector<std::string> periods;
    std::vector<Matrix> out;
    for (auto t : keep) {
        if (t >= periods_.size()) throw LookupError("period index out of range");
        periods.push_back(periods_[t]);
        for (std::size_t k = 0; k < layers_.size(); ++k) out.push_back(layer(t, k));
    }
    return MultiplexTensor(std::move(periods), layers_, nodes_, std::move(out));
}

MultiplexTensor MultiplexTensor::without_period(std::string_view label) const
{
    const auto drop = period_index(label);
    std::vector<std::size_t> keep;
    for (std::size_t t = 0; t < periods_.size(); ++t)
        if (t != drop) keep.push_back(t);
    return with_periods(keep);
}

bool MultiplexTensor::operator==(const MultiplexTensor& other) const
{
    if (periods_ != other.periods_ || layers_.size() != other.layers_.size() ||
        nodes_.size() != other.nodes_.size())
        return false;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const auto& a = layers_[k];
        const auto& b = other.layers_[k];
        if (a.id != b.id || a.name != b.name || a.kind != b.kind || a.units != b.units) return false;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = other.nodes_[i];
        if (a.id != b.id || a.name != b.name || a.financialisation != b.financialisation) return false;
    }
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] != other.weights_[i]) return false;
    return true;
}

Matrix binary_projection(const Matrix& w)
{
    return (w.array() > 0.0).cast<double>().matrix();
}

DyadDecomposition decompose_dyads(const Matrix& w)
{
    validate_layer(w);
    DyadDecomposition d;
    d.mutual = w.cwiseMin(w.transpose());
    d.right = w - d.mutual;
    d.left = w.transpose() - d.mutual;
    return d;
}

Vector imbalance(const Matrix& w)
{
    return w.rowwise().sum() - w.colwise().sum().transpose();
}

LayerSummary layer_summary(const Matrix& w)
{
    const auto dyads = decompose_dyads(w);
    const auto n = w.rows();
    if (n < 2) throw DegenerateNetworkError("layer summary needs at least two nodes");

    LayerSummary s;
    const double cells = static_cast<double>(n) * static_cast<double>(n - 1);
    s.total_weight = w.sum();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || w(i, j) <= 0.0) continue;
            ++s.link_count;
            if (w(j, i) > 0.0) ++s.mutual_link_count;
        }
    s.connectance = static_cast<double>(s.link_count) / cells;
    s.mean_weight = s.total_weight / cells;
    s.out_strength = dyads.right.rowwise().sum();
    s.in_strength = dyads.left.rowwise().sum();
    s.mutual_strength = dyads.mutual.rowwise().sum();
    s.imbalance = imbalance(w);
    return s;
}

std::vector<Vector> imbalance_series(const MultiplexTensor& tensor, std::string_view layer_id)
{
    const auto k = tensor.layer_index(layer_id);
    std::vector<Vector> out;
    out.reserve(tensor.period_count());
    for (std::size_t t = 0; t < tensor.period_count(); ++t) out.push_back(imbalance(tensor.layer(t, k)));
    return out;
}

}  // namespace multinet
