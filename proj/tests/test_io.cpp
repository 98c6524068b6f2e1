#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "multinet/errors.hpp"
#include "multinet/io.hpp"

using namespace multinet;

namespace {

fs::path workdir(const std::string& name)
{
    const auto dir = fs::current_path() / "test_io_work" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_small_manifest(const fs::path& dir)
{
    write_text(dir / "nodes.csv",
               "id,name,financialisation\n"
               "CZE,Czech Republic,16.2\n"
               "USA,United States,31.7\n"
               "GBR,United Kingdom,27.0\n");
    // Columns deliberately out of file order.
    write_text(dir / "a_1.csv", "id,USA,CZE,GBR\nCZE,1,0,2\nUSA,0,0,3\nGBR,4,5,0\n");
    write_text(dir / "a_2.csv", "id,CZE,USA,GBR\nCZE,0,1,NA\nUSA,2,0,\nGBR,0,1,0\n");
    write_text(dir / "b_1.csv", "id,CZE,USA,GBR\nCZE,7,1.5,2\nUSA,0,0,3\nGBR,4,5,9\n");
    write_text(dir / "b_2.csv", "id,CZE,USA,GBR\nCZE,0,1,1\nUSA,1,0,1\nGBR,1,1,0\n");
    write_text(dir / "manifest.json", R"({
  "nodes_file": "nodes.csv",
  "periods": ["1", "2"],
  "ordering": "financialisation",
  "layers": [
    {"id": "a", "kind": "financial", "files": {"1": "a_1.csv", "2": "a_2.csv"}},
    {"id": "b", "kind": "environmental", "file_pattern": "{layer}_{period}.csv"}
  ]
})");
}

}  // namespace

TEST_CASE("ingest builds the tensor in canonical order")
{
    const auto dir = workdir("small");
    write_small_manifest(dir);
    const auto ingested = ingest(load_manifest(dir / "manifest.json"));
    const auto& t = ingested.tensor;
    CHECK(t.period_count() == 2);
    CHECK(t.layer_count() == 2);
    CHECK(t.node_count() == 3);
    CHECK(t.layer(0, 0).rows() == 3);

    // Financialisation 16.2, 31.7, 27.0 ranks the file rows 1, 3, 2.
    const auto nodes = read_nodes(dir / "nodes.csv");
    const auto order = nodes.ordering(NodeOrdering::financialisation);
    const auto position = inverse_permutation(order);
    CHECK(std::vector<std::size_t>{position[0] + 1, position[1] + 1, position[2] + 1} ==
          std::vector<std::size_t>{1, 3, 2});
    CHECK(t.nodes()[0].id == "CZE");
    CHECK(t.nodes()[1].id == "GBR");
    CHECK(t.nodes()[2].id == "USA");

    // a_1: CZE->USA = 1, GBR->CZE = 5, USA->GBR = 3, in canonical order CZE, GBR, USA.
    const Matrix& a1 = t.layer(0, 0);
    CHECK(a1(0, 2) == 1.0);
    CHECK(a1(1, 0) == 5.0);
    CHECK(a1(1, 2) == 4.0);
    CHECK(a1(2, 1) == 3.0);
    CHECK(t.layer(1, 0)(0, 1) == 0.0);  // NA cell
    CHECK(t.layers()[1].kind == LayerKind::environmental);

    CHECK(ingested.zeroed_diagonal == 2);
    REQUIRE(ingested.warnings.size() == 1);
    CHECK(ingested.warnings[0].find("b_1.csv") != std::string::npos);
    CHECK(t.layer(0, 1).diagonal().isZero());
}

TEST_CASE("matrix parse errors name the file and position")
{
    const auto dir = workdir("errors");
    const NodeTable nodes({{"X", "", 1}, {"Y", "", 2}});

    write_text(dir / "neg.csv", "id,X,Y\nX,0,1\nY,-2,0\n");
    try {
        read_matrix_csv(dir / "neg.csv", nodes);
        FAIL("negative weight accepted");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("neg.csv:3") != std::string::npos);
        CHECK(msg.find("row Y") != std::string::npos);
        CHECK(msg.find("column X") != std::string::npos);
    }

    write_text(dir / "unknown.csv", "id,X,Z\nX,0,1\nY,2,0\n");
    CHECK_THROWS_WITH_AS(read_matrix_csv(dir / "unknown.csv", nodes), doctest::Contains("unknown node 'Z'"),
                         ValidationError);
    write_text(dir / "short.csv", "id,X,Y\nX,0,1\n");
    CHECK_THROWS_AS(read_matrix_csv(dir / "short.csv", nodes), ValidationError);
    write_text(dir / "ragged.csv", "id,X,Y\nX,0,1,4\nY,2,0\n");
    CHECK_THROWS_AS(read_matrix_csv(dir / "ragged.csv", nodes), ValidationError);
    write_text(dir / "text.csv", "id,X,Y\nX,0,abc\nY,2,0\n");
    CHECK_THROWS_AS(read_matrix_csv(dir / "text.csv", nodes), ValidationError);
    CHECK_THROWS_AS(read_matrix_csv(dir / "missing.csv", nodes), IoError);
}

TEST_CASE("manifest validation")
{
    const auto dir = workdir("manifest");
    write_text(dir / "m1.json", R"({"periods": ["1"], "layers": []})");
    CHECK_THROWS_AS(load_manifest(dir / "m1.json"), ValidationError);
    write_text(dir / "m2.json", R"({"nodes_file": "n.csv", "periods": ["1", "2"],
        "layers": [{"id": "a", "files": {"1": "a.csv"}}]})");
    CHECK_THROWS_AS(load_manifest(dir / "m2.json"), ValidationError);
    write_text(dir / "m3.json", "{not json");
    CHECK_THROWS_AS(load_manifest(dir / "m3.json"), ValidationError);
    write_text(dir / "m4.json", R"({"nodes_file": "n.csv", "periods": ["1"], "ordering": "random",
        "layers": [{"id": "a", "files": {"1": "a.csv"}}]})");
    CHECK_THROWS_AS(load_manifest(dir / "m4.json"), ValidationError);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1 + 0.2) == "0.3");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(undefined) == "NA");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_exact(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("csv quoting")
{
    const auto rows = parse_csv("id,name\n\"a,b\",\"say \"\"hi\"\"\"\r\n\n", "t");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "a,b");
    CHECK(rows[1][1] == "say \"hi\"");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("plain") == "plain");
    CHECK_THROWS_AS(parse_csv("\"open", "t"), ValidationError);
}

TEST_CASE("export and re-ingest is exact")
{
    std::mt19937_64 rng(51);
    std::vector<NodeEntry> entries;
    for (int i = 0; i < 7; ++i) entries.push_back({"n" + std::to_string(i), "Node, " + std::to_string(i), 10.0 + (i * 3) % 5 + 0.1});
    std::vector<LayerSpec> layers{{"x", "X layer", LayerKind::financial, "USD"},
                                  {"y", "Y layer", LayerKind::environmental, "t"}};
    std::vector<Matrix> weights;
    for (int k = 0; k < 6; ++k) weights.push_back(testing::random_real_layer(rng, 7, 0.6) * 1e3);
    const MultiplexTensor original({"2001", "2002", "2003"}, layers, NodeTable(entries), weights);

    const auto dir = workdir("roundtrip");
    export_tensor(original, dir);
    const auto back = ingest(load_manifest(dir / "manifest.json"));
    CHECK(back.tensor == original);
    CHECK(back.zeroed_diagonal == 0);

    // A second export of the re-ingested tensor is byte-identical.
    const auto again = workdir("roundtrip2");
    export_tensor(back.tensor, again);
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir);
        CHECK(read_text(entry.path()) == read_text(again / rel));
    }
}
