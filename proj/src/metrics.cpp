#include "multinet/metrics.hpp"

#include <cmath>

#include "multinet/errors.hpp"

namespace multinet {

std::string_view to_string(Direction d)
{
    return d == Direction::synergic ? "syn" : "rev";
}

Direction parse_direction(std::string_view text)
{
    if (text == "syn" || text == "synergic") return Direction::synergic;
    if (text == "rev" || text == "reverse") return Direction::reverse;
    throw ValidationError("unknown direction '" + std::string(text) + "' (expected syn or rev)");
}

namespace {

double pearson_off_diagonal(const Matrix& a, const Matrix& b, Direction direction, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("layer dimensions differ");
    const auto n = a.rows();
    if (n < 2) throw DegenerateNetworkError("correlation needs at least two nodes");
    const double cells = static_cast<double>(n) * static_cast<double>(n - 1);

    auto b_at = [&](Eigen::Index i, Eigen::Index j) {
        return direction == Direction::synergic ? b(i, j) : b(j, i);
    };

    double mean_a = 0.0, mean_b = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                mean_a += a(i, j);
                mean_b += b(i, j);
            }
    mean_a /= cells;
    mean_b /= cells;

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double da = a(i, j) - mean_a;
            const double db = b_at(i, j) - mean_b;
            cov += da * db;
            var_a += da * da;
            var_b += db * db;
        }
    if (var_a <= 0.0 || var_b <= 0.0)
        throw UndefinedError(std::string(what) + ": zero variance in " +
                             (var_a <= 0.0 ? "the first" : "the second") + " layer");
    return cov / (std::sqrt(var_a) * std::sqrt(var_b));
}

double off_diagonal_sum_sq(const Matrix& w)
{
    return w.squaredNorm() - w.diagonal().squaredNorm();
}

}  // namespace

double pearson_pair(const Matrix& a, const Matrix& b, Direction direction)
{
    return pearson_off_diagonal(a, b, direction, "pearson");
}

double pearson_binary_pair(const Matrix& a, const Matrix& b, Direction direction)
{
    try {
        return pearson_off_diagonal(binary_projection(a), binary_projection(b), direction, "binary pearson");
    } catch (const UndefinedError& e) {
        throw UndefinedError(std::string(e.what()) + " (layer is empty or complete)");
    }
}

BinaryReciprocity binary_reciprocity(const Matrix& w)
{
    const auto s = layer_summary(w);
    if (s.link_count == 0) throw UndefinedError("binary reciprocity: layer has no links");
    BinaryReciprocity out;
    out.r = static_cast<double>(s.mutual_link_count) / static_cast<double>(s.link_count);
    out.connectance = s.connectance;
    if (out.connectance < 1.0) out.rho = (out.r - out.connectance) / (1.0 - out.connectance);
    return out;
}

WeightedReciprocity weighted_reciprocity_pearson(const Matrix& w)
{
    validate_layer(w);
    const auto n = w.rows();
    if (n < 2) throw DegenerateNetworkError("reciprocity needs at least two nodes");
    const double sum_sq = off_diagonal_sum_sq(w);
    if (sum_sq <= 0.0) throw UndefinedError("weighted reciprocity: all-zero layer");
    const double cells = static_cast<double>(n) * static_cast<double>(n - 1);
    const double mean = w.sum() / cells;

    WeightedReciprocity out;
    out.r = w.cwiseProduct(w.transpose()).sum() / sum_sq;
    out.connectance = mean * mean * cells / sum_sq;
    if (out.connectance < 1.0) out.rho = (out.r - out.connectance) / (1.0 - out.connectance);
    return out;
}

double weighted_reciprocity_min(const Matrix& w)
{
    validate_layer(w);
    const double total = w.sum();
    if (total <= 0.0) throw UndefinedError("weighted reciprocity: all-zero layer");
    return w.cwiseMin(w.transpose()).sum() / total;
}

CrossLayerStats cross_product_stats(const Matrix& a, const Matrix& b)
{
    validate_layer(a);
    validate_layer(b);
    if (a.rows() != b.rows()) throw ValidationError("layer dimensions differ");
    CrossLayerStats s;
    s.total_a = a.sum();
    s.total_b = b.sum();
    if (s.total_a <= 0.0 || s.total_b <= 0.0)
        throw UndefinedError("cross-product statistics: zero total weight");
    const double norm = s.total_a * s.total_b;
    s.r = a.cwiseProduct(b.transpose()).sum() / norm;
    s.m = a.cwiseProduct(b).sum() / norm;
    return s;
}

LocalStats local_stats(const Matrix& a, const Matrix& b, LocalKind kind)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw ValidationError("layer dimensions differ");
    const auto n = a.rows();
    const Vector out_a = a.rowwise().sum();
    // Reciprocity pairs A's exports with B's imports of the same node,
    // multiplexity pairs the exports of both layers.
    const Matrix b_oriented = kind == LocalKind::reciprocity ? Matrix(b.transpose()) : b;
    const Vector norm_b = b_oriented.rowwise().sum();

    LocalStats out;
    out.kind = kind;
    out.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = out_a(i) * norm_b(i);
        for (Eigen::Index j = 0; j < n; ++j)
            out.values(i, j) = norm > 0.0 ? a(i, j) * b_oriented(i, j) / norm : undefined;
    }
    return out;
}

PearsonMatrix pearson_matrix(const MultiplexTensor& tensor, std::size_t period, Direction direction,
                             Representation representation)
{
    const auto k = static_cast<Eigen::Index>(tensor.layer_count());
    PearsonMatrix out;
    out.direction = direction;
    out.representation = representation;
    out.time = tensor.periods().at(period);
    out.values.resize(k, k);
    for (Eigen::Index p = 0; p < k; ++p)
        for (Eigen::Index q = 0; q < k; ++q) {
            const auto& a = tensor.layer(period, static_cast<std::size_t>(p));
            const auto& b = tensor.layer(period, static_cast<std::size_t>(q));
            try {
                out.values(p, q) = representation == Representation::weighted
                                       ? pearson_pair(a, b, direction)
                                       : pearson_binary_pair(a, b, direction);
            } catch (const UndefinedError&) {
                out.values(p, q) = undefined;
            }
        }
    return out;
}

PearsonMatrix averaged_pearson_matrix(const MultiplexTensor& tensor, Direction direction,
                                      Representation representation, Averaging averaging)
{
    const auto k = static_cast<Eigen::Index>(tensor.layer_count());
    if (tensor.period_count() == 0) throw InsufficientSampleError("no periods to average");
    PearsonMatrix out;
    out.direction = direction;
    out.representation = representation;
    out.time = "average";

    if (averaging == Averaging::pooled) {
        std::vector<Matrix> avg;
        for (std::size_t q = 0; q < tensor.layer_count(); ++q) avg.push_back(tensor.time_average(q));
        out.values.resize(k, k);
        for (Eigen::Index p = 0; p < k; ++p)
            for (Eigen::Index q = 0; q < k; ++q) {
                try {
                    out.values(p, q) = representation == Representation::weighted
                                           ? pearson_pair(avg[p], avg[q], direction)
                                           : pearson_binary_pair(avg[p], avg[q], direction);
                } catch (const UndefinedError&) {
                    out.values(p, q) = undefined;
                }
            }
        return out;
    }

    out.values = Matrix::Zero(k, k);
    for (std::size_t t = 0; t < tensor.period_count(); ++t)
        out.values += pearson_matrix(tensor, t, direction, representation).values;  // NaN propagates
    out.values /= static_cast<double>(tensor.period_count());
    return out;
}

CrossStatsMatrix cross_stats_matrix(const MultiplexTensor& tensor, std::size_t period)
{
    const auto k = static_cast<Eigen::Index>(tensor.layer_count());
    CrossStatsMatrix out{Matrix(k, k), Matrix(k, k)};
    for (Eigen::Index p = 0; p < k; ++p)
        for (Eigen::Index q = 0; q < k; ++q) {
            try {
                const auto s = cross_product_stats(tensor.layer(period, static_cast<std::size_t>(p)),
                                                   tensor.layer(period, static_cast<std::size_t>(q)));
                out.r(p, q) = s.r;
                out.m(p, q) = s.m;
            } catch (const UndefinedError&) {
                out.r(p, q) = undefined;
                out.m(p, q) = undefined;
            }
        }
    return out;
}

}  // namespace multinet
