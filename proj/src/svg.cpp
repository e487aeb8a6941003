#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "klnmf/io.hpp"

namespace klnmf {

namespace {

constexpr double kPanelW = 460.0;
constexpr double kPanelH = 360.0;
constexpr double kMarginL = 70.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 40.0;
constexpr double kMarginB = 50.0;
constexpr double kGap = 40.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Series {
    std::vector<double> x;
    std::vector<double> logy;
};

struct PanelData {
    std::string title;
    std::string x_label;
    std::vector<Series> series; // one per run
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0; // y in log10
};

void fit_ranges(PanelData& p) {
    bool any = false;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                p.xmin = p.xmax = s.x[i];
                p.ymin = p.ymax = s.logy[i];
                any = true;
            } else {
                p.xmin = std::min(p.xmin, s.x[i]);
                p.xmax = std::max(p.xmax, s.x[i]);
                p.ymin = std::min(p.ymin, s.logy[i]);
                p.ymax = std::max(p.ymax, s.logy[i]);
            }
        }
    if (!any) {
        p.xmin = 0.0;
        p.xmax = 1.0;
        p.ymin = 0.0;
        p.ymax = 1.0;
    }
    if (p.xmax == p.xmin) p.xmax = p.xmin + 1.0;
    if (p.ymax == p.ymin) {
        p.ymin -= 0.5;
        p.ymax += 0.5;
    }
}

// maps data coordinates into the panel viewport; SVG y grows downward
struct Mapper {
    double x0;
    const PanelData& p;
    double map_x(double x) const {
        return x0 + kMarginL + (x - p.xmin) / (p.xmax - p.xmin) * kPanelW;
    }
    double map_y(double logy) const {
        return kMarginT + (1.0 - (logy - p.ymin) / (p.ymax - p.ymin)) * kPanelH;
    }
};

void emit_panel(std::string& svg, const PanelData& p, double x0,
                const std::vector<std::string>& labels, bool with_legend) {
    const Mapper m{x0, p};
    const double left = x0 + kMarginL;
    const double right = left + kPanelW;
    const double top = kMarginT;
    const double bottom = top + kPanelH;

    svg += "  <rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(kPanelW) +
           "\" height=\"" + num(kPanelH) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg += "  <text x=\"" + num(left + kPanelW / 2) + "\" y=\"" + num(top - 14) +
           "\" text-anchor=\"middle\" font-size=\"15\">" + p.title + "</text>\n";

    // y ticks on decades
    const int dec_lo = static_cast<int>(std::floor(p.ymin));
    const int dec_hi = static_cast<int>(std::ceil(p.ymax));
    int step = 1;
    while ((dec_hi - dec_lo) / step > 8) ++step;
    for (int d = dec_lo; d <= dec_hi; d += step) {
        if (d < p.ymin - 1e-9 || d > p.ymax + 1e-9) continue;
        const double y = m.map_y(d);
        svg += "  <line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(right) +
               "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\" stroke-dasharray=\"3,3\"/>\n";
        svg += "  <text x=\"" + num(left - 6) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
    }

    // x ticks, five of them
    for (int k = 0; k <= 4; ++k) {
        const double x = p.xmin + (p.xmax - p.xmin) * k / 4.0;
        const double sx = m.map_x(x);
        svg += "  <line x1=\"" + num(sx) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(sx) +
               "\" y2=\"" + num(bottom + 5) + "\" stroke=\"#333333\"/>\n";
        svg += "  <text x=\"" + num(sx) + "\" y=\"" + num(bottom + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + num(x) + "</text>\n";
    }
    svg += "  <text x=\"" + num(left + kPanelW / 2) + "\" y=\"" + num(bottom + 38) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + p.x_label + "</text>\n";

    for (std::size_t s = 0; s < p.series.size(); ++s) {
        const auto& ser = p.series[s];
        if (ser.x.empty()) continue;
        svg += "  <polyline fill=\"none\" stroke=\"";
        svg += kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (i) svg += ' ';
            svg += num(m.map_x(ser.x[i])) + "," + num(m.map_y(ser.logy[i]));
        }
        svg += "\"/>\n";
    }

    if (with_legend) {
        double ly = top + 16;
        for (std::size_t s = 0; s < labels.size(); ++s) {
            const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
            svg += "  <line x1=\"" + num(right - 120) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
                   num(right - 96) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
                   "\" stroke-width=\"2\"/>\n";
            svg += "  <text x=\"" + num(right - 90) + "\" y=\"" + num(ly) +
                   "\" font-size=\"12\">" + labels[s] + "</text>\n";
            ly += 16;
        }
    }
}

} // namespace

void write_svg_plot(const std::vector<RunTrace>& runs, const std::string& path) {
    if (runs.empty()) throw ValueError("write_svg_plot: no runs to plot");
    for (const auto& r : runs)
        if (r.records.empty()) throw ValueError("write_svg_plot: run '" + r.label + "' is empty");

    PanelData by_iter{"objective vs iteration", "iteration", {}, 0, 1, 0, 1};
    PanelData by_time{"objective vs solver time", "time (ms)", {}, 0, 1, 0, 1};
    std::vector<std::string> labels;
    for (const auto& r : runs) {
        labels.push_back(r.label);
        Series si, st;
        for (const auto& rec : r.records) {
            const double total = rec.objective.total;
            if (!std::isfinite(total)) continue;
            const double logy = std::log10(total > 1e-300 ? total : 1e-300);
            si.x.push_back(static_cast<double>(rec.iteration));
            si.logy.push_back(logy);
            st.x.push_back(rec.wall_ms);
            st.logy.push_back(logy);
        }
        by_iter.series.push_back(std::move(si));
        by_time.series.push_back(std::move(st));
    }
    fit_ranges(by_iter);
    fit_ranges(by_time);

    const double total_w = 2 * (kMarginL + kPanelW + kMarginR) + kGap;
    const double total_h = kMarginT + kPanelH + kMarginB;
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(total_w) +
           "\" height=\"" + num(total_h) + "\" viewBox=\"0 0 " + num(total_w) + " " +
           num(total_h) + "\" font-family=\"sans-serif\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    emit_panel(svg, by_iter, 0.0, labels, false);
    emit_panel(svg, by_time, kMarginL + kPanelW + kMarginR + kGap, labels, true);
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << svg;
    if (!out) throw IoError("cannot write " + path);
}

} // namespace klnmf
