#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "multinet/errors.hpp"
#include "multinet/metrics.hpp"

using namespace multinet;

namespace {

Matrix two_node(double w12, double w21)
{
    Matrix w(2, 2);
    w << 0, w12, w21, 0;
    return w;
}

// Textbook Pearson over paired samples.
double reference_pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

std::pair<std::vector<double>, std::vector<double>> off_diagonal_pairs(const Matrix& a, const Matrix& b)
{
    std::vector<double> x, y;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j) {
                x.push_back(a(i, j));
                y.push_back(b(i, j));
            }
    return {x, y};
}

}  // namespace

TEST_CASE("pearson_pair examples")
{
    std::mt19937_64 rng(1);
    const Matrix a = testing::random_real_layer(rng, 6, 0.5);
    CHECK(pearson_pair(a, a, Direction::synergic) == doctest::Approx(1.0).epsilon(1e-14));

    Matrix sym = testing::random_real_layer(rng, 5, 0.6);
    sym = (sym + Matrix(sym.transpose())).eval();
    CHECK(pearson_pair(sym, sym, Direction::reverse) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(pearson_pair(two_node(1, 0), two_node(0, 1), Direction::reverse) == doctest::Approx(1.0));
    CHECK(pearson_pair(two_node(1, 0), two_node(0, 1), Direction::synergic) == doctest::Approx(-1.0));
}

TEST_CASE("pearson_pair matches a textbook reference")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = testing::random_real_layer(rng, 7, 0.6);
        const Matrix b = testing::random_real_layer(rng, 7, 0.6);
        auto [x, y] = off_diagonal_pairs(a, b);
        CHECK(pearson_pair(a, b, Direction::synergic) == doctest::Approx(reference_pearson(x, y)).epsilon(1e-12));
        auto [xr, yr] = off_diagonal_pairs(a, b.transpose());
        CHECK(pearson_pair(a, b, Direction::reverse) == doctest::Approx(reference_pearson(xr, yr)).epsilon(1e-12));
    }
}

TEST_CASE("pearson_pair reports zero variance")
{
    Matrix flat = Matrix::Ones(3, 3);
    flat.diagonal().setZero();
    std::mt19937_64 rng(3);
    const Matrix a = testing::random_real_layer(rng, 3, 1.0);
    CHECK_THROWS_AS(pearson_pair(a, flat, Direction::synergic), UndefinedError);
    CHECK_THROWS_AS(pearson_pair(Matrix::Zero(3, 3), a, Direction::reverse), UndefinedError);
}

TEST_CASE("pearson_binary_pair")
{
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = 2;
    a(1, 2) = 5;
    a(2, 0) = 0.5;
    Matrix b = Matrix::Ones(3, 3) - binary_projection(a);
    b.diagonal().setZero();
    CHECK(pearson_binary_pair(a, a, Direction::synergic) == doctest::Approx(1.0));
    CHECK(pearson_binary_pair(a, b, Direction::synergic) == doctest::Approx(-1.0));

    Matrix complete = Matrix::Ones(3, 3);
    complete.diagonal().setZero();
    CHECK_THROWS_AS(pearson_binary_pair(a, complete, Direction::synergic), UndefinedError);
    CHECK_THROWS_AS(pearson_binary_pair(Matrix::Zero(3, 3), a, Direction::synergic), UndefinedError);
}

TEST_CASE("binary_reciprocity")
{
    SUBCASE("three node example")
    {
        Matrix w = Matrix::Zero(3, 3);
        w(0, 1) = 1;
        w(1, 0) = 1;
        w(1, 2) = 1;
        const auto br = binary_reciprocity(w);
        CHECK(br.r == doctest::Approx(2.0 / 3.0));
        CHECK(br.connectance == doctest::Approx(0.5));
        CHECK(br.rho == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("symmetric graph")
    {
        Matrix w = Matrix::Zero(4, 4);
        w(0, 1) = w(1, 0) = 2;
        w(2, 3) = w(3, 2) = 1;
        const auto br = binary_reciprocity(w);
        CHECK(br.r == 1.0);
        CHECK(br.rho == doctest::Approx(1.0));
    }
    SUBCASE("triangular graph")
    {
        Matrix w = Matrix::Zero(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) w(i, j) = 1;
        const auto br = binary_reciprocity(w);
        CHECK(br.r == 0.0);
        CHECK(br.rho == doctest::Approx(-br.connectance / (1 - br.connectance)).epsilon(1e-12));
    }
    SUBCASE("complete graph leaves rho undefined")
    {
        Matrix w = Matrix::Ones(3, 3);
        w.diagonal().setZero();
        CHECK_FALSE(is_defined(binary_reciprocity(w).rho));
    }
    SUBCASE("empty graph")
    {
        CHECK_THROWS_AS(binary_reciprocity(Matrix::Zero(3, 3)), UndefinedError);
    }
}

TEST_CASE("binary rho equals reverse binary self-pearson")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix w = testing::random_binary_layer(rng, 8, 0.4);
        double pearson;
        try {
            pearson = pearson_binary_pair(w, w, Direction::reverse);
        } catch (const UndefinedError&) {
            continue;
        }
        CHECK(std::abs(binary_reciprocity(w).rho - pearson) < 1e-12);
    }
}

TEST_CASE("weighted reciprocity measures")
{
    std::mt19937_64 rng(5);
    Matrix sym = testing::random_real_layer(rng, 5, 0.8);
    sym += Matrix(sym.transpose());

    const auto wr = weighted_reciprocity_pearson(sym);
    CHECK(wr.r == doctest::Approx(1.0));
    CHECK(wr.rho == doctest::Approx(1.0));
    CHECK(weighted_reciprocity_min(sym) == doctest::Approx(1.0));

    const auto two = weighted_reciprocity_pearson(two_node(2, 1));
    CHECK(two.r == doctest::Approx(0.8));
    CHECK(two.connectance == doctest::Approx(0.9));
    CHECK(two.rho == doctest::Approx(-1.0));
    CHECK(weighted_reciprocity_min(two_node(2, 1)) == doctest::Approx(2.0 / 3.0));

    Matrix one_way = Matrix::Zero(4, 4);
    one_way(0, 1) = 3;
    one_way(1, 2) = 1;
    one_way(3, 0) = 2;
    CHECK(weighted_reciprocity_pearson(one_way).r == 0.0);
    CHECK(weighted_reciprocity_min(one_way) == 0.0);

    CHECK_THROWS_AS(weighted_reciprocity_pearson(Matrix::Zero(3, 3)), UndefinedError);
    CHECK_THROWS_AS(weighted_reciprocity_min(Matrix::Zero(3, 3)), UndefinedError);
    Matrix equal = Matrix::Ones(3, 3);
    equal.diagonal().setZero();
    CHECK_FALSE(is_defined(weighted_reciprocity_pearson(equal).rho));
}

TEST_CASE("weighted rho equals reverse weighted self-pearson")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix w = testing::random_real_layer(rng, 6, 0.5);
        CHECK(weighted_reciprocity_pearson(w).rho ==
              doctest::Approx(pearson_pair(w, w, Direction::reverse)).epsilon(1e-10));
    }
}

TEST_CASE("cross_product_stats")
{
    const auto s = cross_product_stats(two_node(2, 1), two_node(3, 4));
    CHECK(s.r == doctest::Approx(11.0 / 21.0));
    CHECK(s.m == doctest::Approx(10.0 / 21.0));

    const auto scaled = cross_product_stats(2.0 * two_node(2, 1), 5.0 * two_node(3, 4));
    CHECK(scaled.r == doctest::Approx(s.r).epsilon(1e-14));

    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = 1;
    a(1, 2) = 2;
    const auto t = cross_product_stats(a, a.transpose());
    CHECK(t.m == 0.0);
    CHECK(t.r > 0.0);

    CHECK_THROWS_AS(cross_product_stats(Matrix::Zero(3, 3), a), UndefinedError);
}

TEST_CASE("self cross reciprocity is 1 only for a single mutual dyad")
{
    Matrix single = Matrix::Zero(4, 4);
    single(1, 3) = single(3, 1) = 2.5;
    CHECK(cross_product_stats(single, single).r == doctest::Approx(0.5));
    // all weight on one mutual dyad, counted from both ends: r = 2 w^2 / (2w)^2
    Matrix lone = Matrix::Zero(2, 2);
    lone(0, 1) = 1.0;
    CHECK(cross_product_stats(lone, lone.transpose()).r == 1.0);

    std::mt19937_64 rng(7);
    Matrix sym = testing::random_real_layer(rng, 5, 1.0);
    sym += Matrix(sym.transpose());
    CHECK(cross_product_stats(sym, sym).r < 1.0);
}

TEST_CASE("cross statistics are scale free")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> factor(1e-3, 1e3);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix a = testing::random_real_layer(rng, 6, 0.5);
        const Matrix b = testing::random_real_layer(rng, 6, 0.5);
        const auto base = cross_product_stats(a, b);
        const auto scaled = cross_product_stats(factor(rng) * a, factor(rng) * b);
        CHECK(std::abs(scaled.r - base.r) <= 1e-12 * base.r);
        CHECK(std::abs(scaled.m - base.m) <= 1e-12 * base.m);
    }
}

TEST_CASE("local_stats")
{
    SUBCASE("all weight on one dyad")
    {
        const auto l = local_stats(two_node(3, 0), two_node(0, 7), LocalKind::reciprocity);
        CHECK(l.values(0, 1) == doctest::Approx(1.0));
    }
    SUBCASE("hand computed normalisation")
    {
        Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
        a(0, 1) = 2;
        a(0, 2) = 2;
        b(1, 0) = 4;
        b(2, 0) = 4;
        const auto l = local_stats(a, b, LocalKind::reciprocity);
        CHECK(l.values(0, 1) == doctest::Approx(0.25));
        // nodes 1 and 2 export nothing in A
        CHECK_FALSE(is_defined(l.values(1, 0)));
    }
    SUBCASE("zero numerator stays a defined zero")
    {
        Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
        a(0, 1) = 1;
        b(1, 0) = 1;
        b(2, 0) = 1;
        const auto l = local_stats(a, b, LocalKind::reciprocity);
        CHECK(l.values(0, 2) == 0.0);
    }
    SUBCASE("multiplexity uses aligned exports")
    {
        Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
        a(0, 1) = 1;
        a(0, 2) = 3;
        b(0, 1) = 2;
        b(0, 2) = 2;
        const auto l = local_stats(a, b, LocalKind::multiplexity);
        CHECK(l.values(0, 1) == doctest::Approx(2.0 / 16.0));
        CHECK(l.values(0, 2) == doctest::Approx(6.0 / 16.0));
    }
}

TEST_CASE("local statistics bounds and direction symmetry")
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        const Matrix a = testing::random_real_layer(rng, 5, 0.6);
        const Matrix b = testing::random_real_layer(rng, 5, 0.6);
        for (auto kind : {LocalKind::reciprocity, LocalKind::multiplexity}) {
            const auto l = local_stats(a, b, kind);
            for (Eigen::Index k = 0; k < l.values.size(); ++k) {
                const double v = l.values.data()[k];
                if (is_defined(v)) CHECK((v >= 0.0 && v <= 1.0));
            }
        }
        // Brute force: r^AB_ij and r^BA_ji share the numerator w^A_ij w^B_ji;
        // undoing each side's own normalisation must give the same number.
        const auto ab = local_stats(a, b, LocalKind::reciprocity).values;
        const auto ba = local_stats(b, a, LocalKind::reciprocity).values;
        for (Eigen::Index i = 0; i < 5; ++i)
            for (Eigen::Index j = 0; j < 5; ++j) {
                if (i == j || !is_defined(ab(i, j)) || !is_defined(ba(j, i))) continue;
                double out_a_i = 0, in_b_i = 0, out_b_j = 0, in_a_j = 0;
                for (Eigen::Index k = 0; k < 5; ++k) {
                    out_a_i += a(i, k);
                    in_b_i += b(k, i);
                    out_b_j += b(j, k);
                    in_a_j += a(k, j);
                }
                CHECK(ab(i, j) * out_a_i * in_b_i == doctest::Approx(ba(j, i) * out_b_j * in_a_j).epsilon(1e-12));
                CHECK(ab(i, j) * out_a_i * in_b_i == doctest::Approx(a(i, j) * b(j, i)).epsilon(1e-12));
            }
    }
}

TEST_CASE("pearson matrices over a tensor")
{
    const auto tensor = testing::small_tensor({1.0, 2.0, 3.0});
    const auto syn = pearson_matrix(tensor, 0, Direction::synergic, Representation::weighted);
    CHECK(syn.values(0, 0) == doctest::Approx(1.0));
    CHECK(syn.values(1, 1) == doctest::Approx(1.0));
    CHECK(syn.values(0, 1) == doctest::Approx(syn.values(1, 0)));

    const auto rev = averaged_pearson_matrix(tensor, Direction::reverse, Representation::weighted,
                                             Averaging::mean_of_periods);
    // Scaling a layer does not change its correlations, so every period agrees.
    CHECK(rev.values(0, 1) ==
          doctest::Approx(pearson_pair(tensor.layer(0, 0), tensor.layer(0, 1), Direction::reverse)));
    const auto pooled = averaged_pearson_matrix(tensor, Direction::reverse, Representation::weighted,
                                                Averaging::pooled);
    CHECK(pooled.values(0, 1) == doctest::Approx(rev.values(0, 1)));

    const auto cross = cross_stats_matrix(tensor, 0);
    CHECK(cross.r(0, 1) == doctest::Approx(cross.r(1, 0)));
    CHECK(cross.m(0, 1) == doctest::Approx(cross.m(1, 0)));
}

TEST_CASE("binary pearson matrix marks complete layers undefined")
{
    NodeTable nodes({{"a", "", 0}, {"b", "", 0}, {"c", "", 0}});
    Matrix complete = Matrix::Ones(3, 3);
    complete.diagonal().setZero();
    Matrix sparse = Matrix::Zero(3, 3);
    sparse(0, 1) = 1;
    sparse(2, 1) = 1;
    const MultiplexTensor tensor({"t"}, {{"s", "", LayerKind::financial, ""}, {"e", "", LayerKind::environmental, ""}},
                                 nodes, {sparse, complete});
    const auto m = pearson_matrix(tensor, 0, Direction::synergic, Representation::binary);
    CHECK(m.values(0, 0) == doctest::Approx(1.0));
    CHECK_FALSE(is_defined(m.values(0, 1)));
    CHECK_FALSE(is_defined(m.values(1, 1)));
}
