#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "multinet/core.hpp"

namespace multinet {

/// Largest connected component of the mutual positive-significance graph.
struct BackboneGraph {
    Mask directed_adj;  // A: significant (positive) local correlations
    Mask mutual_adj;    // U = A AND A^T (elementwise), symmetric
    std::vector<std::size_t> component_members;  // ascending node indices
    std::vector<std::pair<std::size_t, std::size_t>> directed_edges;  // A restricted to the component
    std::size_t tied_components = 0;  // other components as large as the chosen one
    bool empty() const { return component_members.empty(); }
};

/// Backbone of a significance mask; the diagonal is ignored.
BackboneGraph extract_backbone(const Mask& significant);

/// Backbone of local values: an entry is significant when defined and > 0.
BackboneGraph extract_backbone(const Matrix& local_values);

/// Connected components of an undirected adjacency mask, each sorted, ordered
/// by first member. Singletons included.
std::vector<std::vector<std::size_t>> connected_components(const Mask& undirected);

struct LinkCounts {
    Eigen::MatrixXi out_count;  // N x T
    Eigen::MatrixXi in_count;   // N x T
};

/// masks[t][pair] is the significance mask of one layer pair in period t.
LinkCounts link_counts(const std::vector<std::vector<Mask>>& masks, std::size_t node_count);

struct JackknifeEstimate {
    std::string statistic_name;
    double point = 0.0;
    std::vector<std::string> left_out;  // period dropped for each replicate
    std::vector<double> leave_one_out;
    double variance = 0.0;
    double std_error = 0.0;
};

using TensorStatistic = std::function<double(const MultiplexTensor&)>;

/// Leave-one-period-out jackknife; needs at least three periods.
JackknifeEstimate jackknife(std::string name, const TensorStatistic& statistic, const MultiplexTensor& tensor);

/// Variance ((n-1)/n) sum (theta_(t) - mean)^2 of given replicate values.
double jackknife_variance(const std::vector<double>& leave_one_out);

}  // namespace multinet
