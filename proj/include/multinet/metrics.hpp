#pragma once

#include <string>

#include "multinet/core.hpp"

namespace multinet {

/// Synergic compares w^A_ij with w^B_ij, reverse compares w^A_ij with w^B_ji.
enum class Direction { synergic, reverse };
enum class Representation { weighted, binary };

/// How a statistic is "averaged over the period".
enum class Averaging {
    mean_of_periods,  // arithmetic mean of the per-period values
    pooled,           // value computed on the time-averaged weight matrices
};

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// Pearson coefficient over the N(N-1) off-diagonal cells. Throws
/// UndefinedError when either layer has zero variance.
double pearson_pair(const Matrix& a, const Matrix& b, Direction direction);

/// Pearson on the binary projections a_ij = 1[w_ij > 0].
double pearson_binary_pair(const Matrix& a, const Matrix& b, Direction direction);

struct BinaryReciprocity {
    double r = 0.0;            // L<->/L
    double connectance = 0.0;  // L/(N(N-1))
    double rho = undefined;    // (r - c)/(1 - c), undefined for complete graphs
};

BinaryReciprocity binary_reciprocity(const Matrix& w);

struct WeightedReciprocity {
    double r = 0.0;
    double connectance = 0.0;  // c^w
    double rho = undefined;
};

WeightedReciprocity weighted_reciprocity_pearson(const Matrix& w);

/// W<->/W: share of the total weight that is reciprocated.
double weighted_reciprocity_min(const Matrix& w);

struct CrossLayerStats {
    double r = 0.0;  // sum w^A_ij w^B_ji / (W^A W^B)
    double m = 0.0;  // sum w^A_ij w^B_ij / (W^A W^B)
    double total_a = 0.0;
    double total_b = 0.0;
};

CrossLayerStats cross_product_stats(const Matrix& a, const Matrix& b);

enum class LocalKind { reciprocity, multiplexity };

/// Dyadic version of the cross-product statistics, normalised on the row
/// node's strengths. Entries whose normalisation is zero are `undefined`.
struct LocalStats {
    Matrix values;
    LocalKind kind = LocalKind::reciprocity;
};

LocalStats local_stats(const Matrix& a, const Matrix& b, LocalKind kind);

struct PearsonMatrix {
    Matrix values;  // K x K, undefined where a pair has zero variance
    Direction direction = Direction::synergic;
    Representation representation = Representation::weighted;
    std::string time;  // period label or "average"
};

PearsonMatrix pearson_matrix(const MultiplexTensor& tensor, std::size_t period, Direction direction,
                             Representation representation);

/// Mean of per-period matrices (entries undefined in any period stay
/// undefined) or the correlation of time-averaged layers.
PearsonMatrix averaged_pearson_matrix(const MultiplexTensor& tensor, Direction direction,
                                      Representation representation, Averaging averaging);

/// K x K matrices of r (reverse) and m (synergic) for one period.
struct CrossStatsMatrix {
    Matrix r;
    Matrix m;
};

CrossStatsMatrix cross_stats_matrix(const MultiplexTensor& tensor, std::size_t period);

}  // namespace multinet
