#pragma once

#include <string>
#include <vector>

#include "multinet/analysis.hpp"
#include "multinet/core.hpp"

namespace multinet {

/// Heatmap on a fixed diverging scale over [-1, 1]: blue for negative,
/// white at 0, yellow for positive. Values beyond the range saturate and NA
/// cells are grey. The observed min and max are printed under the grid.
std::string heatmap_svg(const Matrix& values, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const std::string& title);

std::string backbone_graphml(const BackboneGraph& g, const NodeTable& nodes, const std::string& graph_id);
std::string backbone_dot(const BackboneGraph& g, const NodeTable& nodes, const std::string& graph_id);

std::string xml_escape(const std::string& s);

}  // namespace multinet
