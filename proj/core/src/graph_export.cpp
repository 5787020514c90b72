#include "pnet/graph_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pnet/io.hpp"

namespace pnet {

GraphFormat graph_format_from_string(const std::string& name) {
    if (name == "dot") return GraphFormat::dot;
    if (name == "graphml") return GraphFormat::graphml;
    throw ArgumentError("unknown graph format '" + name + "' (dot, graphml)");
}

std::string to_string(GraphFormat f) {
    return f == GraphFormat::dot ? "dot" : "graphml";
}

void GraphData::validate() const {
    const auto n = static_cast<Eigen::Index>(ids.size());
    if (weights.rows() != n || weights.cols() != n) {
        throw DataError("graph matrix must be square and match the node ids");
    }
    if (weights != weights.transpose()) {
        throw DataError("graph matrix is not symmetric");
    }
    if (!weights.allFinite()) {
        throw DataError("graph matrix has non-finite entries");
    }
    if (labels && labels->size() != ids.size()) {
        throw DataError("node labels are not aligned with the graph");
    }
    if (scores && scores->size() != ids.size()) {
        throw DataError("node scores are not aligned with the graph");
    }
}

double linear_map(double value, double lo, double hi, double out_lo, double out_hi) {
    if (!(hi > lo)) return 0.5 * (out_lo + out_hi);
    const double t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
    return out_lo + t * (out_hi - out_lo);
}

namespace {

struct Rgb {
    int r, g, b;
};

Rgb parse_color(const std::string& hex) {
    unsigned r = 0, g = 0, b = 0;
    if (hex.size() != 7 || hex[0] != '#' || std::sscanf(hex.c_str() + 1, "%2x%2x%2x", &r, &g, &b) != 3) {
        throw ArgumentError("expected a #RRGGBB color, got '" + hex + "'");
    }
    return {static_cast<int>(r), static_cast<int>(g), static_cast<int>(b)};
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
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

struct Edge {
    std::size_t u, v;
    double weight;
};

struct NodeStyle {
    std::string shape;
    std::optional<std::string> fill;
};

}  // namespace

std::string mix_color(const std::string& from, const std::string& to, double t) {
    const Rgb a = parse_color(from);
    const Rgb b = parse_color(to);
    t = std::clamp(t, 0.0, 1.0);
    auto mix = [t](int x, int y) { return static_cast<int>(std::lround(x + t * (y - x))); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b));
    return buf;
}

std::string render_graph(const GraphData& g, const GraphExportSpec& spec, GraphSummary* summary) {
    g.validate();
    if (!(spec.min_width > 0.0) || spec.max_width < spec.min_width) {
        throw ArgumentError("edge widths must satisfy 0 < min_width <= max_width");
    }
    const std::size_t n = g.ids.size();
    std::vector<Edge> edges;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const double w = g.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (w == 0.0) continue;
            edges.push_back({i, j, w});
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });

    double score_lo = 0.0, score_hi = 0.0;
    if (g.scores && !g.scores->empty()) {
        const auto [mn, mx] = std::minmax_element(g.scores->begin(), g.scores->end());
        score_lo = *mn;
        score_hi = *mx;
    }
    std::vector<NodeStyle> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i].shape = !g.labels ? "ellipse" : ((*g.labels)[i] ? "square" : "circle");
        if (g.scores) {
            nodes[i].fill = mix_color(spec.fill_low, spec.fill_high,
                                      linear_map((*g.scores)[i], score_lo, score_hi, 0.0, 1.0));
        }
    }
    auto width = [&](double w) { return linear_map(w, lo, hi, spec.min_width, spec.max_width); };
    auto color = [&](double w) { return mix_color(spec.low_color, spec.high_color, linear_map(w, lo, hi, 0.0, 1.0)); };

    std::string out;
    if (spec.format == GraphFormat::dot) {
        out += "graph pnet {\n";
        out += "  node [style=filled, fillcolor=\"#FFFFFF\"];\n";
        for (std::size_t i = 0; i < n; ++i) {
            out += "  " + dot_quote(g.ids[i]) + " [shape=" + nodes[i].shape;
            if (g.labels) out += ", label_class=" + std::string((*g.labels)[i] ? "1" : "0");
            if (g.scores) {
                out += ", score=" + dot_quote(io::format_double((*g.scores)[i]));
                out += ", fillcolor=" + dot_quote(*nodes[i].fill);
            }
            out += "];\n";
        }
        for (const auto& e : edges) {
            out += "  " + dot_quote(g.ids[e.u]) + " -- " + dot_quote(g.ids[e.v]);
            out += " [w=" + dot_quote(io::format_double(e.weight));
            out += ", penwidth=" + fixed(width(e.weight));
            out += ", color=" + dot_quote(color(e.weight)) + "];\n";
        }
        out += "}\n";
    } else {
        out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n";
        out += "    xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n";
        out += "    xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
               "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
        out += "  <key id=\"shape\" for=\"node\" attr.name=\"shape\" attr.type=\"string\"/>\n";
        if (g.labels) out += "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"int\"/>\n";
        if (g.scores) {
            out += "  <key id=\"score\" for=\"node\" attr.name=\"score\" attr.type=\"double\"/>\n";
            out += "  <key id=\"fill\" for=\"node\" attr.name=\"fill\" attr.type=\"string\"/>\n";
        }
        out += "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
        out += "  <key id=\"width\" for=\"edge\" attr.name=\"width\" attr.type=\"double\"/>\n";
        out += "  <key id=\"color\" for=\"edge\" attr.name=\"color\" attr.type=\"string\"/>\n";
        out += "  <graph id=\"pnet\" edgedefault=\"undirected\">\n";
        for (std::size_t i = 0; i < n; ++i) {
            out += "    <node id=\"" + xml_escape(g.ids[i]) + "\">\n";
            out += "      <data key=\"shape\">" + nodes[i].shape + "</data>\n";
            if (g.labels) out += "      <data key=\"label\">" + std::string((*g.labels)[i] ? "1" : "0") + "</data>\n";
            if (g.scores) {
                out += "      <data key=\"score\">" + io::format_double((*g.scores)[i]) + "</data>\n";
                out += "      <data key=\"fill\">" + *nodes[i].fill + "</data>\n";
            }
            out += "    </node>\n";
        }
        for (const auto& e : edges) {
            out += "    <edge source=\"" + xml_escape(g.ids[e.u]) + "\" target=\"" + xml_escape(g.ids[e.v]) + "\">\n";
            out += "      <data key=\"weight\">" + io::format_double(e.weight) + "</data>\n";
            out += "      <data key=\"width\">" + fixed(width(e.weight)) + "</data>\n";
            out += "      <data key=\"color\">" + color(e.weight) + "</data>\n";
            out += "    </edge>\n";
        }
        out += "  </graph>\n</graphml>\n";
    }
    if (summary != nullptr) {
        *summary = {n, edges.size()};
    }
    return out;
}

GraphSummary export_graph(const GraphData& g, const GraphExportSpec& spec, const std::filesystem::path& path) {
    GraphSummary summary;
    io::write_text_atomic(path, render_graph(g, spec, &summary));
    return summary;
}

}  // namespace pnet
