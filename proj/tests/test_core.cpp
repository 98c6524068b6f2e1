#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "multinet/core.hpp"
#include "multinet/errors.hpp"

using namespace multinet;

namespace {

Matrix two_node(double w12, double w21)
{
    Matrix w(2, 2);
    w << 0, w12, w21, 0;
    return w;
}

}  // namespace

TEST_CASE("decompose_dyads on the three dyad shapes")
{
    SUBCASE("fully symmetric")
    {
        const auto d = decompose_dyads(two_node(5, 5));
        CHECK(d.mutual(0, 1) == 5);
        CHECK(d.right(0, 1) == 0);
        CHECK(d.left(0, 1) == 0);
    }
    SUBCASE("partly reciprocated")
    {
        const auto d = decompose_dyads(two_node(2, 1));
        CHECK(d.mutual(0, 1) == 1);
        CHECK(d.right(0, 1) == 1);
        CHECK(d.left(0, 1) == 0);
    }
    SUBCASE("fully asymmetric")
    {
        const auto d = decompose_dyads(two_node(3, 0));
        CHECK(d.mutual(0, 1) == 0);
        CHECK(d.right(0, 1) == 3);
        CHECK(d.left(0, 1) == 0);
    }
}

TEST_CASE("decompose_dyads rejects invalid layers")
{
    CHECK_THROWS_AS(decompose_dyads(two_node(-1, 2)), ValidationError);
    Matrix w = two_node(1, 1);
    w(0, 0) = 3;
    CHECK_THROWS_AS(decompose_dyads(w), ValidationError);
}

TEST_CASE("decompose_dyads invariants on random layers")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix w = testing::random_real_layer(rng, 7, 0.6);
        const auto d = decompose_dyads(w);
        CHECK((d.right + d.mutual - w).cwiseAbs().maxCoeff() <= 1e-15 * w.maxCoeff());
        CHECK(d.mutual == d.mutual.transpose());
        CHECK(d.right.cwiseProduct(d.right.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.left == d.right.transpose());
    }
}

TEST_CASE("decompose_dyads reconstructs integer layers exactly")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix w = testing::random_integer_layer(rng, 6, 20, 0.7);
        const auto d = decompose_dyads(w);
        CHECK(d.right + d.mutual == w);
    }
}

TEST_CASE("layer_summary examples")
{
    SUBCASE("three nodes with one mutual dyad")
    {
        Matrix w = Matrix::Zero(3, 3);
        w(0, 1) = 1;
        w(1, 0) = 1;
        w(1, 2) = 1;
        const auto s = layer_summary(w);
        CHECK(s.link_count == 3);
        CHECK(s.mutual_link_count == 2);
        CHECK(s.connectance == doctest::Approx(0.5));
    }
    SUBCASE("complete equal-weight graph")
    {
        Matrix w = Matrix::Ones(3, 3);
        w.diagonal().setZero();
        const auto s = layer_summary(w);
        CHECK(s.connectance == 1.0);
        CHECK(s.mutual_link_count == 6);
        CHECK(s.mean_weight == 1.0);
    }
    SUBCASE("empty graph")
    {
        const auto s = layer_summary(Matrix::Zero(4, 4));
        CHECK(s.link_count == 0);
        CHECK(s.mutual_link_count == 0);
        CHECK(s.connectance == 0.0);
        CHECK(s.out_strength.isZero());
        CHECK(s.in_strength.isZero());
        CHECK(s.mutual_strength.isZero());
    }
    SUBCASE("single node is degenerate")
    {
        CHECK_THROWS_AS(layer_summary(Matrix::Zero(1, 1)), DegenerateNetworkError);
    }
}

TEST_CASE("layer_summary invariants")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix w = testing::random_integer_layer(rng, 6, 9, 0.5);
        const auto s = layer_summary(w);
        CHECK(s.connectance >= 0.0);
        CHECK(s.connectance <= 1.0);
        CHECK(s.mutual_link_count <= s.link_count);
        CHECK(s.link_count <= 6 * 5);
        CHECK(s.imbalance.sum() == 0.0);  // integer weights: exact
        CHECK((s.out_strength + s.mutual_strength - w.rowwise().sum()).isZero());
        CHECK((s.in_strength + s.mutual_strength - w.colwise().sum().transpose()).isZero());
    }
}

TEST_CASE("complete environmental-style layer has unit connectance")
{
    std::mt19937_64 rng(8);
    Matrix w = testing::random_real_layer(rng, 10, 1.0);
    CHECK(layer_summary(w).connectance == 1.0);
}

TEST_CASE("imbalance_series")
{
    SUBCASE("hand values")
    {
        CHECK(imbalance(two_node(3, 1)) == Vector{{2.0, -2.0}});
        Matrix star = Matrix::Zero(3, 3);
        star(0, 1) = 1;
        star(0, 2) = 1;
        CHECK(imbalance(star) == Vector{{2.0, -1.0, -1.0}});
        CHECK(imbalance(two_node(4, 4)).isZero());
    }
    SUBCASE("over a tensor")
    {
        const auto tensor = testing::small_tensor({1.0, 2.0, 3.0});
        const auto series = imbalance_series(tensor, "L1");
        REQUIRE(series.size() == 3);
        for (const auto& v : series) CHECK(v.sum() == 0.0);
        CHECK(series[1](0) == 2.0 * series[0](0));
        CHECK_THROWS_AS(imbalance_series(tensor, "nope"), LookupError);
    }
}

TEST_CASE("node table ordering")
{
    NodeTable nodes({{"USA", "United States", 31.7}, {"CZE", "Czech Republic", 16.2}, {"GBR", "United Kingdom", 27.0}});
    CHECK(nodes.ordering(NodeOrdering::financialisation) == std::vector<std::size_t>{1, 2, 0});
    CHECK(nodes.ordering(NodeOrdering::alphabetical) == std::vector<std::size_t>{1, 2, 0});
    CHECK(nodes.ordering(NodeOrdering::file_order) == std::vector<std::size_t>{0, 1, 2});

    NodeTable tied({{"BLX", "Bel-Lux", 29.1}, {"AUS", "Australia", 29.1}, {"NZL", "New Zealand", 27.8}});
    CHECK(tied.ordering(NodeOrdering::financialisation) == std::vector<std::size_t>{2, 0, 1});

    CHECK_THROWS_AS(NodeTable({{"A", "a", 1}, {"A", "b", 2}}), ValidationError);
    CHECK_THROWS_AS(NodeTable({{"", "a", 1}}), ValidationError);
}

TEST_CASE("reordering is a bit-exact permutation")
{
    std::mt19937_64 rng(3);
    std::vector<std::string> periods{"p1", "p2"};
    std::vector<LayerSpec> layers{{"a", "A", LayerKind::financial, ""}, {"b", "B", LayerKind::other, ""}};
    std::vector<NodeEntry> entries;
    for (int i = 0; i < 6; ++i) entries.push_back({"n" + std::to_string(i), "", static_cast<double>((i * 7) % 5)});
    std::vector<Matrix> weights;
    for (int k = 0; k < 4; ++k) weights.push_back(testing::random_real_layer(rng, 6, 0.7));
    const MultiplexTensor tensor(periods, layers, NodeTable(entries), weights);

    const auto order = tensor.nodes().ordering(NodeOrdering::financialisation);
    const auto sorted = tensor.reordered(order);
    for (std::size_t a = 0; a + 1 < sorted.node_count(); ++a)
        CHECK(sorted.nodes()[a].financialisation <= sorted.nodes()[a + 1].financialisation);
    const auto restored = sorted.reordered(inverse_permutation(order));
    CHECK(restored == tensor);
    CHECK_FALSE(sorted == tensor);
}

TEST_CASE("tensor validation and period selection")
{
    NodeTable nodes({{"a", "", 0}, {"b", "", 1}});
    std::vector<LayerSpec> layers{{"x", "", LayerKind::other, ""}};
    CHECK_THROWS_AS(MultiplexTensor({"t"}, layers, nodes, {Matrix::Zero(3, 3)}), ValidationError);
    CHECK_THROWS_AS(MultiplexTensor({"t", "u"}, layers, nodes, {Matrix::Zero(2, 2)}), ValidationError);
    CHECK_THROWS_AS(MultiplexTensor({"t"}, layers, nodes, {two_node(-1, 0)}), ValidationError);

    const auto tensor = testing::small_tensor({1.0, 2.0, 3.0});
    const auto dropped = tensor.without_period("2001");
    CHECK(dropped.periods() == std::vector<std::string>{"2000", "2002"});
    CHECK(dropped.layer(1, 0) == tensor.layer(2, 0));
    CHECK_THROWS_AS(tensor.without_period("1999"), LookupError);
    CHECK(tensor.time_average(0) == tensor.layer(1, 0));
}
