#include "multinet/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "multinet/errors.hpp"

namespace multinet {

std::vector<std::vector<std::size_t>> connected_components(const Mask& undirected)
{
    const auto n = static_cast<std::size_t>(undirected.rows());
    std::vector<int> label(n, -1);
    std::vector<std::vector<std::size_t>> components;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (label[seed] >= 0) continue;
        const int id = static_cast<int>(components.size());
        std::vector<std::size_t> members{seed};
        label[seed] = id;
        for (std::size_t head = 0; head < members.size(); ++head) {
            const auto v = members[head];
            for (std::size_t w = 0; w < n; ++w)
                if (w != v && label[w] < 0 &&
                    undirected(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w))) {
                    label[w] = id;
                    members.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        components.push_back(std::move(members));
    }
    return components;
}

BackboneGraph extract_backbone(const Mask& significant)
{
    if (significant.rows() != significant.cols()) throw ValidationError("significance mask is not square");
    const auto n = significant.rows();
    BackboneGraph g;
    g.directed_adj = significant;
    for (Eigen::Index i = 0; i < n; ++i) g.directed_adj(i, i) = false;
    g.mutual_adj = g.directed_adj && g.directed_adj.transpose();

    std::size_t best = 0;
    const std::vector<std::size_t>* chosen = nullptr;
    const auto components = connected_components(g.mutual_adj);
    // Components come ordered by smallest member, so the first of a given
    // size wins ties.
    for (const auto& c : components) {
        if (c.size() < 2) continue;
        if (c.size() > best) {
            best = c.size();
            chosen = &c;
            g.tied_components = 0;
        } else if (c.size() == best) {
            ++g.tied_components;
        }
    }
    if (!chosen) return g;

    g.component_members = *chosen;
    for (auto i : g.component_members)
        for (auto j : g.component_members)
            if (g.directed_adj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                g.directed_edges.emplace_back(i, j);
    return g;
}

BackboneGraph extract_backbone(const Matrix& local_values)
{
    return extract_backbone(Mask(local_values.array() > 0.0));
}

LinkCounts link_counts(const std::vector<std::vector<Mask>>& masks, std::size_t node_count)
{
    const auto n = static_cast<Eigen::Index>(node_count);
    const auto periods = static_cast<Eigen::Index>(masks.size());
    LinkCounts out{Eigen::MatrixXi::Zero(n, periods), Eigen::MatrixXi::Zero(n, periods)};
    for (Eigen::Index t = 0; t < periods; ++t) {
        for (const auto& mask : masks[static_cast<std::size_t>(t)]) {
            if (mask.rows() != n || mask.cols() != n)
                throw ValidationError("significance masks do not share the node set");
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    if (i != j && mask(i, j)) {
                        ++out.out_count(i, t);
                        ++out.in_count(j, t);
                    }
        }
    }
    return out;
}

double jackknife_variance(const std::vector<double>& leave_one_out)
{
    const auto n = static_cast<double>(leave_one_out.size());
    if (leave_one_out.size() < 2) throw InsufficientSampleError("jackknife needs at least two replicates");
    double mean = 0.0;
    for (double v : leave_one_out) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : leave_one_out) ss += (v - mean) * (v - mean);
    return (n - 1.0) / n * ss;
}

JackknifeEstimate jackknife(std::string name, const TensorStatistic& statistic, const MultiplexTensor& tensor)
{
    const auto periods = tensor.period_count();
    if (periods < 3)
        throw InsufficientSampleError("jackknife needs at least 3 periods, got " + std::to_string(periods));
    JackknifeEstimate est;
    est.statistic_name = std::move(name);
    est.point = statistic(tensor);
    for (std::size_t drop = 0; drop < periods; ++drop) {
        std::vector<std::size_t> keep;
        for (std::size_t t = 0; t < periods; ++t)
            if (t != drop) keep.push_back(t);
        est.left_out.push_back(tensor.periods()[drop]);
        est.leave_one_out.push_back(statistic(tensor.with_periods(keep)));
    }
    est.variance = jackknife_variance(est.leave_one_out);
    est.std_error = std::sqrt(est.variance);
    return est;
}

}  // namespace multinet
