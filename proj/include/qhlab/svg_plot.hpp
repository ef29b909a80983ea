#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qhlab/csv_io.hpp"

namespace qhlab {

// One line on a panel, drawn from two named columns of the panel's table.
struct PlotSeries {
    std::string label;
    std::string x_column;
    std::string y_column;
};

// One coordinate frame. If csv_path is empty the panel reads the default
// table handed to emit_plot; otherwise it reads its own file. log_x/log_y
// plot log10 of the data (all values must then be positive).
struct PanelSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::filesystem::path csv_path;
    bool log_x = false;
    bool log_y = false;
};

// A row of panels sharing one figure. Pixel sizes are per panel.
struct PlotSpec {
    std::vector<PanelSpec> panels;
    double panel_width = 560.0;
    double panel_height = 420.0;
};

// Renders the named CSV (plus any per-panel CSVs) to a self-contained SVG.
// Output bytes depend only on the input tables and the spec: fixed palette,
// fixed tick rule, "%.6g" coordinates, no timestamps. Throws UsageError on a
// missing column, an empty table, or non-positive data under a log axis.
void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
               const std::filesystem::path& out_path);

}  // namespace qhlab
