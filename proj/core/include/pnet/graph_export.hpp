#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pnet/dataset.hpp"

namespace pnet {

enum class GraphFormat { dot, graphml };

GraphFormat graph_format_from_string(const std::string& name);
std::string to_string(GraphFormat f);

struct GraphExportSpec {
    GraphFormat format = GraphFormat::dot;
    double min_width = 0.5;
    double max_width = 5.0;
    std::string low_color = "#3B4CC0";   // weakest edge
    std::string high_color = "#B40426";  // strongest edge
    std::string fill_low = "#FFFFFF";    // lowest score
    std::string fill_high = "#2CA02C";   // highest score
};

/// A weighted sample graph with optional per-node labels and scores.
struct GraphData {
    std::vector<std::string> ids;
    Matrix weights;
    std::optional<std::vector<bool>> labels;
    std::optional<std::vector<double>> scores;

    /// Square, symmetric, aligned metadata; throws DataError otherwise.
    void validate() const;
};

struct GraphSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
};

/// Linear map of `value` from [lo, hi] onto [out_lo, out_hi]; a degenerate
/// input range maps to the midpoint.
double linear_map(double value, double lo, double hi, double out_lo, double out_hi);

/// "#RRGGBB" at fraction t in [0, 1] between two "#RRGGBB" colors.
std::string mix_color(const std::string& from, const std::string& to, double t);

/// Nonzero off-diagonal pairs become edges; width and color follow the
/// weight over the observed edge-weight range. Positives are squares,
/// negatives circles, unlabelled nodes ellipses; scores set the fill.
std::string render_graph(const GraphData& g, const GraphExportSpec& spec, GraphSummary* summary = nullptr);

GraphSummary export_graph(const GraphData& g, const GraphExportSpec& spec, const std::filesystem::path& path);

}  // namespace pnet
