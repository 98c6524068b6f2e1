#include "multinet/demo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>

#include "multinet/io.hpp"

namespace multinet {

namespace {

struct Country {
    const char* id;
    const char* name;
    double financialisation;
};

// Ascending financialisation; ties listed in ranking order.
constexpr Country countries[] = {
    {"CZE", "Czech Republic", 16.2}, {"NOR", "Norway", 16.9},        {"SVK", "Slovak Republic", 17.1},
    {"POL", "Poland", 18.1},         {"ISL", "Iceland", 18.9},       {"MEX", "Mexico", 19.0},
    {"KOR", "Korea", 19.3},          {"ESP", "Spain", 19.5},         {"TUR", "Turkey", 19.5},
    {"SVN", "Slovenia", 20.2},       {"PRT", "Portugal", 20.3},      {"GRC", "Greece", 20.6},
    {"HUN", "Hungary", 20.9},        {"FIN", "Finland", 21.0},       {"IRL", "Ireland", 21.3},
    {"AUT", "Austria", 21.5},        {"DNK", "Denmark", 22.3},       {"EST", "Estonia", 22.4},
    {"CHL", "Chile", 23.1},          {"CHE", "Switzerland", 24.0},   {"ITA", "Italy", 24.7},
    {"JPN", "Japan", 24.9},          {"SWE", "Sweden", 24.9},        {"CAN", "Canada", 25.0},
    {"GBR", "United Kingdom", 27.0}, {"NLD", "Netherlands", 27.3},   {"DEU", "Germany", 27.5},
    {"NZL", "New Zealand", 27.8},    {"BLX", "Bel-Lux", 29.1},       {"AUS", "Australia", 29.1},
    {"ISR", "Israel", 30.5},         {"FRA", "France", 30.7},        {"USA", "United States", 31.7},
};

constexpr int node_count = static_cast<int>(std::size(countries));
constexpr int first_year = 2002;
constexpr int period_count = 9;

// Portable draws: the standard distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double normal()
    {
        const double u = 1.0 - uniform();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
    }
    double lognormal(double sigma) { return std::exp(sigma * normal()); }
    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

using Grid = std::vector<std::vector<double>>;

Grid zeros() { return Grid(node_count, std::vector<double>(node_count, 0.0)); }

// Six significant digits keeps the files small and the values exact on reread.
double round6(double v)
{
    if (v == 0.0) return 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::stod(buf);
}

}  // namespace

const std::vector<std::string>& demo_planted_hubs()
{
    static const std::vector<std::string> hubs{"GBR", "DEU", "BLX", "FRA", "USA"};
    return hubs;
}

void write_demo(const fs::path& dir)
{
    Rng rng(20021010);
    std::vector<bool> hub(node_count, false);
    for (int i = 0; i < node_count; ++i)
        hub[static_cast<std::size_t>(i)] =
            std::find(demo_planted_hubs().begin(), demo_planted_hubs().end(), countries[i].id) !=
            demo_planted_hubs().end();
    auto both_hubs = [&](int i, int j) { return hub[static_cast<std::size_t>(i)] && hub[static_cast<std::size_t>(j)]; };

    std::vector<double> size(node_count);
    for (int i = 0; i < node_count; ++i) size[static_cast<std::size_t>(i)] = rng.lognormal(0.4);
    auto g = [&](int i) { return size[static_cast<std::size_t>(i)]; };

    // Fixed topologies; weights are redrawn every period.
    auto sparse_mask = [&](double density) {
        Grid m = zeros();
        for (int i = 0; i < node_count; ++i)
            for (int j = 0; j < node_count; ++j)
                if (i != j && rng.chance(density)) m[i][j] = 1.0;
        return m;
    };
    const Grid fdi_mask = sparse_mask(0.55);
    const Grid sd_mask = sparse_mask(0.5);
    const Grid ld_mask = sparse_mask(0.45);

    // Equity: mutual block between the hubs, every other dyad one-way.
    Grid equity_mask = zeros();
    for (int i = 0; i < node_count; ++i)
        for (int j = i + 1; j < node_count; ++j) {
            if (both_hubs(i, j)) {
                equity_mask[i][j] = equity_mask[j][i] = 1.0;
            } else if (rng.chance(0.7)) {
                // Mostly from the more financialised node to the less financialised one.
                const bool down = rng.chance(0.7);
                const int from = down ? j : i;  // j is at least as financialised
                const int to = down ? i : j;
                equity_mask[from][to] = 1.0;
            }
        }

    struct Layer {
        const char* id;
        const char* name;
        const char* kind;
        const char* units;
    };
    const Layer layers[] = {
        {"FDI", "Foreign direct investment", "financial", "USD million"},
        {"Equity", "Equity securities", "financial", "USD million"},
        {"SD", "Short-term debt securities", "financial", "USD million"},
        {"LD", "Long-term debt securities", "financial", "USD million"},
        {"TD", "Total debt securities", "financial", "USD million"},
        {"NOx", "Nitrogen oxides embodied in trade", "environmental", "tonnes"},
        {"PM10", "Particulate matter embodied in trade", "environmental", "tonnes"},
        {"SO2", "Sulfur dioxide embodied in trade", "environmental", "tonnes"},
        {"CO2", "CO2 equivalent embodied in trade", "environmental", "kt"},
        {"Water", "Water footprint of trade", "environmental", "Mm3"},
    };
    const double env_scale[] = {120.0, 40.0, 60.0, 900.0, 300.0};

    std::vector<NodeEntry> entries;
    for (const auto& c : countries) entries.push_back({c.id, c.name, c.financialisation});
    const NodeTable nodes(entries);

    Manifest manifest;
    manifest.base_dir = dir;
    manifest.nodes_file = "nodes.csv";
    manifest.ordering = NodeOrdering::financialisation;
    manifest.financial_aggregate = {"FDI", "Equity", "SD", "LD"};
    manifest.environmental_aggregate = {"NOx", "PM10", "SO2", "CO2", "Water"};
    for (int t = 0; t < period_count; ++t) manifest.periods.push_back(std::to_string(first_year + t));
    for (const auto& l : layers) {
        ManifestLayer ml;
        ml.spec = {l.id, l.name, parse_layer_kind(l.kind), l.units};
        for (const auto& p : manifest.periods) ml.files[p] = fs::path("matrices") / (std::string(l.id) + "_" + p + ".csv");
        manifest.layers.push_back(std::move(ml));
    }

    std::string header = "id";
    for (const auto& c : countries) header += std::string(",") + c.id;
    header += "\n";
    auto write_grid = [&](const Grid& w, const fs::path& rel) {
        std::string out = header;
        for (int i = 0; i < node_count; ++i) {
            out += countries[i].id;
            for (int j = 0; j < node_count; ++j) out += "," + format_exact(w[i][j]);
            out += "\n";
        }
        write_text(dir / rel, out);
    };

    for (int t = 0; t < period_count; ++t) {
        const double growth = 1.0 + 0.04 * t;
        auto draw = [&](const Grid& mask, double scale, double sigma) {
            Grid w = zeros();
            for (int i = 0; i < node_count; ++i)
                for (int j = 0; j < node_count; ++j)
                    if (mask[i][j] > 0.0) w[i][j] = round6(scale * growth * g(i) * g(j) * rng.lognormal(sigma));
            return w;
        };
        std::vector<Grid> grids;
        grids.push_back(draw(fdi_mask, 50.0, 1.0));
        Grid equity = draw(equity_mask, 5.0, 1.0);
        for (int i = 0; i < node_count; ++i)
            for (int j = 0; j < node_count; ++j)
                if (i != j && both_hubs(i, j)) equity[i][j] = round6(30.0 * growth * g(i) * g(j) * rng.lognormal(0.3));
        grids.push_back(equity);
        grids.push_back(draw(sd_mask, 20.0, 1.0));
        grids.push_back(draw(ld_mask, 30.0, 1.0));
        Grid td = zeros();
        for (int i = 0; i < node_count; ++i)
            for (int j = 0; j < node_count; ++j) td[i][j] = round6(grids[2][i][j] + grids[3][i][j]);
        grids.push_back(td);

        for (int e = 0; e < 5; ++e) {
            Grid w = zeros();
            for (int i = 0; i < node_count; ++i)
                for (int j = 0; j < node_count; ++j) {
                    if (i == j) continue;
                    double v = env_scale[e] * growth * std::pow(g(i) * g(j), 0.8) * rng.lognormal(0.5);
                    if (e == 0 && both_hubs(i, j)) v *= 10.0;
                    w[i][j] = round6(v);
                }
            grids.push_back(w);
        }
        for (std::size_t k = 0; k < grids.size(); ++k)
            write_grid(grids[k], manifest.layers[k].files.at(manifest.periods[static_cast<std::size_t>(t)]));
    }
    write_nodes(nodes, dir / manifest.nodes_file);
    write_manifest(manifest, dir / "manifest.json");
}

}  // namespace multinet
