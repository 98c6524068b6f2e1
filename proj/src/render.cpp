#include "multinet/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "multinet/io.hpp"

namespace multinet {

namespace {

struct Rgb {
    double r, g, b;
};

constexpr Rgb blue{33, 102, 172};
constexpr Rgb white{255, 255, 255};
constexpr Rgb yellow{230, 171, 2};

Rgb mix(Rgb a, Rgb b, double t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

std::string hex(Rgb c)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

std::string color_for(double v)
{
    if (!is_defined(v)) return "#bdbdbd";
    const double t = std::clamp(v, -1.0, 1.0);
    return hex(t < 0 ? mix(white, blue, -t) : mix(white, yellow, t));
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string heatmap_svg(const Matrix& values, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const std::string& title)
{
    const double cell = 18.0, left = 120.0, top = 110.0;
    const double width = left + cell * static_cast<double>(values.cols()) + 90.0;
    const double height = top + cell * static_cast<double>(values.rows()) + 60.0;

    double lo = undefined, hi = undefined;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double v = values.data()[k];
        if (!is_defined(v)) continue;
        lo = is_defined(lo) ? std::min(lo, v) : v;
        hi = is_defined(hi) ? std::max(hi, v) : v;
    }

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    s += "<title>" + xml_escape(title) + "</title>\n";
    s += "<text x=\"" + num(left) + "\" y=\"16\" font-size=\"13\">" + xml_escape(title) + "</text>\n";
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const double x = left + cell * (static_cast<double>(j) + 0.6);
        s += "<text transform=\"translate(" + num(x) + "," + num(top - 4) + ") rotate(-60)\">" +
             xml_escape(col_labels[static_cast<std::size_t>(j)]) + "</text>\n";
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        const double y = top + cell * static_cast<double>(i);
        s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(y + cell * 0.7) + "\" text-anchor=\"end\">" +
             xml_escape(row_labels[static_cast<std::size_t>(i)]) + "</text>\n";
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double v = values(i, j);
            s += "<rect x=\"" + num(left + cell * static_cast<double>(j)) + "\" y=\"" + num(y) + "\" width=\"" +
                 num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + color_for(v) +
                 "\" stroke=\"#ffffff\" stroke-width=\"0.5\"><title>" +
                 xml_escape(row_labels[static_cast<std::size_t>(i)] + " / " +
                            col_labels[static_cast<std::size_t>(j)] + ": " + format_number(v)) +
                 "</title></rect>\n";
        }
    }

    // Colour bar from -1 to 1.
    const double bar_x = left + cell * static_cast<double>(values.cols()) + 20.0;
    const double bar_h = std::max(cell * static_cast<double>(values.rows()), 100.0);
    const int steps = 20;
    for (int k = 0; k < steps; ++k) {
        const double v = 1.0 - 2.0 * (k + 0.5) / steps;
        s += "<rect x=\"" + num(bar_x) + "\" y=\"" + num(top + bar_h * k / steps) + "\" width=\"12\" height=\"" +
             num(bar_h / steps + 0.2) + "\" fill=\"" + color_for(v) + "\"/>\n";
    }
    s += "<text x=\"" + num(bar_x + 16) + "\" y=\"" + num(top + 8) + "\">1</text>\n";
    s += "<text x=\"" + num(bar_x + 16) + "\" y=\"" + num(top + bar_h / 2 + 3) + "\">0</text>\n";
    s += "<text x=\"" + num(bar_x + 16) + "\" y=\"" + num(top + bar_h) + "\">-1</text>\n";

    const double foot = top + std::max(cell * static_cast<double>(values.rows()), bar_h) + 24.0;
    s += "<text x=\"" + num(left) + "\" y=\"" + num(foot) + "\">min " + format_number(lo) + "  max " +
         format_number(hi) + "  (grey: NA)</text>\n";
    s += "</svg>\n";
    return s;
}

std::string backbone_graphml(const BackboneGraph& g, const NodeTable& nodes, const std::string& graph_id)
{
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
         "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
         "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
    s += "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n";
    s += "  <key id=\"fin\" for=\"node\" attr.name=\"financialisation\" attr.type=\"double\"/>\n";
    s += "  <key id=\"mutual\" for=\"edge\" attr.name=\"mutual\" attr.type=\"boolean\"/>\n";
    s += "  <graph id=\"" + xml_escape(graph_id) + "\" edgedefault=\"directed\">\n";
    for (auto i : g.component_members) {
        const auto& e = nodes[i];
        s += "    <node id=\"" + xml_escape(e.id) + "\">\n";
        s += "      <data key=\"name\">" + xml_escape(e.name) + "</data>\n";
        s += "      <data key=\"fin\">" + format_number(e.financialisation) + "</data>\n";
        s += "    </node>\n";
    }
    std::size_t k = 0;
    for (auto [i, j] : g.directed_edges) {
        const bool mutual = g.mutual_adj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        s += "    <edge id=\"e" + std::to_string(k++) + "\" source=\"" + xml_escape(nodes[i].id) + "\" target=\"" +
             xml_escape(nodes[j].id) + "\">\n";
        s += std::string("      <data key=\"mutual\">") + (mutual ? "true" : "false") + "</data>\n";
        s += "    </edge>\n";
    }
    s += "  </graph>\n</graphml>\n";
    return s;
}

std::string backbone_dot(const BackboneGraph& g, const NodeTable& nodes, const std::string& graph_id)
{
    auto quote = [](const std::string& t) {
        std::string out = "\"";
        for (char c : t) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::string s = "digraph " + quote(graph_id) + " {\n";
    for (auto i : g.component_members)
        s += "  " + quote(nodes[i].id) + " [label=" + quote(nodes[i].name.empty() ? nodes[i].id : nodes[i].name) +
             "];\n";
    for (auto [i, j] : g.directed_edges) s += "  " + quote(nodes[i].id) + " -> " + quote(nodes[j].id) + ";\n";
    s += "}\n";
    return s;
}

}  // namespace multinet
