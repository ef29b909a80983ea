#include "qhlab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "qhlab/errors.hpp"

namespace qhlab {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen_if_degenerate() {
        if (!(lo < hi)) {
            const double pad = std::max(1.0, std::abs(lo)) * 0.5;
            lo -= pad;
            hi += pad;
        }
    }
};

// Ticks at multiples of a 1/2/5 decade step chosen to yield about 5 labels.
std::vector<double> nice_ticks(const Range& r) {
    const double span = r.hi - r.lo;
    const double raw = span / 4.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double nice : {1.0, 2.0, 5.0}) {
        if (raw <= nice * mag * (1.0 + 1e-12)) {
            step = nice * mag;
            break;
        }
    }
    std::vector<double> ticks;
    const double start = std::ceil(r.lo / step - 1e-9) * step;
    for (double t = start; t <= r.hi + step * 1e-9; t += step) {
        const double snapped = (std::abs(t) < step * 1e-6) ? 0.0 : t;
        ticks.push_back(snapped);
    }
    return ticks;
}

struct PreparedSeries {
    std::string label;
    std::string color;
    std::vector<double> x, y;
};

std::vector<double> maybe_log(std::vector<double> v, bool log_scale, const std::string& axis) {
    if (!log_scale) return v;
    for (double& e : v) {
        if (!(e > 0.0))
            throw UsageError("plot: non-positive value on log " + axis + " axis");
        e = std::log10(e);
    }
    return v;
}

void escape_into(std::string& out, const std::string& text) {
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
}

std::string escaped(const std::string& text) {
    std::string out;
    escape_into(out, text);
    return out;
}

}  // namespace

void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
               const std::filesystem::path& out_path) {
    if (spec.panels.empty()) throw UsageError("plot: spec has no panels");

    CsvTable default_table;
    bool default_loaded = false;

    const double margin_l = 70.0, margin_r = 18.0, margin_t = 40.0, margin_b = 52.0;
    const double width = spec.panel_width, height = spec.panel_height;
    const double total_w = width * static_cast<double>(spec.panels.size());

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(total_w) +
           "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(total_w) + " " +
           num(height) + "\">\n";
    svg += "<rect width=\"" + num(total_w) + "\" height=\"" + num(height) +
           "\" fill=\"#ffffff\"/>\n";

    for (std::size_t p = 0; p < spec.panels.size(); ++p) {
        const PanelSpec& panel = spec.panels[p];
        if (panel.series.empty()) throw UsageError("plot: panel has no series");

        const CsvTable* table;
        CsvTable own_table;
        if (panel.csv_path.empty()) {
            if (!default_loaded) {
                default_table = read_csv(csv_path);
                default_loaded = true;
            }
            table = &default_table;
        } else {
            own_table = read_csv(panel.csv_path);
            table = &own_table;
        }
        if (table->rows.empty()) throw UsageError("plot: table has no data rows");

        std::vector<PreparedSeries> prepared;
        Range rx, ry;
        for (std::size_t s = 0; s < panel.series.size(); ++s) {
            PreparedSeries ps;
            ps.label = panel.series[s].label;
            ps.color = kPalette[s % kPaletteSize];
            ps.x = maybe_log(table->column(panel.series[s].x_column), panel.log_x, "x");
            ps.y = maybe_log(table->column(panel.series[s].y_column), panel.log_y, "y");
            for (double v : ps.x) rx.include(v);
            for (double v : ps.y) ry.include(v);
            prepared.push_back(std::move(ps));
        }
        rx.widen_if_degenerate();
        ry.widen_if_degenerate();

        const double x0 = width * static_cast<double>(p);
        const double plot_x = x0 + margin_l, plot_y = margin_t;
        const double plot_w = width - margin_l - margin_r;
        const double plot_h = height - margin_t - margin_b;
        const auto sx = [&](double v) {
            return plot_x + (v - rx.lo) / (rx.hi - rx.lo) * plot_w;
        };
        const auto sy = [&](double v) {
            return plot_y + plot_h - (v - ry.lo) / (ry.hi - ry.lo) * plot_h;
        };

        svg += "<g font-family=\"Helvetica,Arial,sans-serif\" font-size=\"12\">\n";
        svg += "<rect x=\"" + num(plot_x) + "\" y=\"" + num(plot_y) + "\" width=\"" +
               num(plot_w) + "\" height=\"" + num(plot_h) +
               "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

        for (double t : nice_ticks(rx)) {
            if (t < rx.lo - 1e-12 || t > rx.hi + 1e-12) continue;
            const double px = sx(t);
            svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(plot_y) + "\" x2=\"" + num(px) +
                   "\" y2=\"" + num(plot_y + plot_h) +
                   "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(plot_y + plot_h) + "\" x2=\"" +
                   num(px) + "\" y2=\"" + num(plot_y + plot_h + 5) +
                   "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + num(px) + "\" y=\"" + num(plot_y + plot_h + 18) +
                   "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
        }
        for (double t : nice_ticks(ry)) {
            if (t < ry.lo - 1e-12 || t > ry.hi + 1e-12) continue;
            const double py = sy(t);
            svg += "<line x1=\"" + num(plot_x) + "\" y1=\"" + num(py) + "\" x2=\"" +
                   num(plot_x + plot_w) + "\" y2=\"" + num(py) +
                   "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            svg += "<line x1=\"" + num(plot_x - 5) + "\" y1=\"" + num(py) + "\" x2=\"" +
                   num(plot_x) + "\" y2=\"" + num(py) +
                   "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + num(plot_x - 8) + "\" y=\"" + num(py + 4) +
                   "\" text-anchor=\"end\">" + num(t) + "</text>\n";
        }

        for (const PreparedSeries& ps : prepared) {
            svg += "<polyline fill=\"none\" stroke=\"" + ps.color +
                   "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < ps.x.size(); ++i) {
                if (i) svg += ' ';
                svg += num(sx(ps.x[i])) + "," + num(sy(ps.y[i]));
            }
            svg += "\"/>\n";
        }

        svg += "<text x=\"" + num(x0 + width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" "
               "font-size=\"14\" font-weight=\"bold\">" +
               escaped(panel.title) + "</text>\n";
        svg += "<text x=\"" + num(plot_x + plot_w / 2.0) + "\" y=\"" + num(height - 14) +
               "\" text-anchor=\"middle\">" + escaped(panel.x_label) + "</text>\n";
        svg += "<text x=\"" + num(x0 + 16) + "\" y=\"" + num(plot_y + plot_h / 2.0) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(x0 + 16) + " " +
               num(plot_y + plot_h / 2.0) + ")\">" + escaped(panel.y_label) + "</text>\n";

        if (prepared.size() > 1 || !prepared[0].label.empty()) {
            double ly = plot_y + 16.0;
            for (const PreparedSeries& ps : prepared) {
                if (ps.label.empty()) continue;
                const double lx = plot_x + plot_w - 150.0;
                svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
                       num(lx + 22) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + ps.color +
                       "\" stroke-width=\"1.5\"/>\n";
                svg += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly) + "\">" +
                       escaped(ps.label) + "</text>\n";
                ly += 16.0;
            }
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("plot: cannot open '" + out_path.string() + "' for writing");
    out << svg;
    if (!out) throw ConfigError("plot: write failed for '" + out_path.string() + "'");
}

}  // namespace qhlab
