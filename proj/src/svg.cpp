#include "fpl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fpl::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double pix0 = 0.0, pix1 = 1.0;

    double map(double v) const {
        double t = log ? std::log10(v) : v;
        double a = log ? std::log10(lo) : lo;
        double b = log ? std::log10(hi) : hi;
        if (b <= a) b = a + 1.0;
        return pix0 + (pix1 - pix0) * (t - a) / (b - a);
    }
};

void axis_range(const std::vector<Series>& series, bool use_x, bool log, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& s : series) {
        const Vec& v = use_x ? s.x : s.y;
        for (double val : v) {
            if (log && val <= 0.0) continue;
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
    }
    if (!std::isfinite(lo)) {
        lo = log ? 0.1 : 0.0;
        hi = 1.0;
    }
    if (lo == hi) {
        lo = log ? lo / 2 : lo - 1;
        hi = log ? hi * 2 : hi + 1;
    }
}

void heat_color(double t, int& r, int& g, int& b) {
    // t = 0 -> red (small), t = 1 -> blue (large)
    t = std::clamp(t, 0.0, 1.0);
    r = static_cast<int>(std::lround(220.0 * (1.0 - t) + 30.0 * t));
    g = static_cast<int>(std::lround(40.0 * (1.0 - t) + 60.0 * t));
    b = static_cast<int>(std::lround(30.0 * (1.0 - t) + 220.0 * t));
}

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series, bool log_x, bool log_y) {
    require(!series.empty(), "write_line_plot: no series");
    for (const auto& s : series) {
        require(!s.x.empty() && s.x.size() == s.y.size(), "write_line_plot: empty or ragged series");
    }
    const double W = 720, H = 480, ml = 70, mr = 180, mt = 50, mb = 55;
    Axis ax, ay;
    ax.log = log_x;
    ay.log = log_y;
    axis_range(series, true, log_x, ax.lo, ax.hi);
    axis_range(series, false, log_y, ay.lo, ay.hi);
    ax.pix0 = ml;
    ax.pix1 = W - mr;
    ay.pix0 = H - mb;
    ay.pix1 = mt;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) +
           "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           title + "</text>\n";
    out += "<text x=\"" + fmt((ml + W - mr) / 2) + "\" y=\"" + fmt(H - 12) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt((mt + H - mb) / 2) +
           "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
           fmt((mt + H - mb) / 2) + ")\">" + y_label + "</text>\n";
    out += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(W - ml - mr) +
           "\" height=\"" + fmt(H - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";

    // axis end labels
    out += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(H - mb + 16) + "\" font-size=\"11\">" +
           fmt(ax.lo) + "</text>\n";
    out += "<text x=\"" + fmt(W - mr) + "\" y=\"" + fmt(H - mb + 16) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fmt(ax.hi) + "</text>\n";
    out += "<text x=\"" + fmt(ml - 4) + "\" y=\"" + fmt(H - mb) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fmt(ay.lo) + "</text>\n";
    out += "<text x=\"" + fmt(ml - 4) + "\" y=\"" + fmt(mt + 10) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fmt(ay.hi) + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i], yv = s.y[i];
            if (log_x && xv <= 0.0) continue;
            if (log_y && yv <= 0.0) continue;
            pts += fmt(ax.map(xv)) + "," + fmt(ay.map(yv)) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[si % 8]) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = mt + 18.0 * static_cast<double>(si);
        out += "<rect x=\"" + fmt(W - mr + 12) + "\" y=\"" + fmt(ly) +
               "\" width=\"12\" height=\"4\" fill=\"" + kPalette[si % 8] + "\"/>\n";
        out += "<text x=\"" + fmt(W - mr + 30) + "\" y=\"" + fmt(ly + 6) + "\" font-size=\"12\">" +
               s.name + "</text>\n";
    }
    out += "</svg>\n";
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_line_plot: cannot open " + path);
    f << out;
}

void write_heatmap(const std::string& path, const std::string& x_label,
                   const std::string& y_label, const std::vector<Heatmap>& panels) {
    require(!panels.empty(), "write_heatmap: no panels");
    for (const auto& p : panels)
        require(p.values.rows >= 1 && p.values.cols >= 1, "write_heatmap: empty panel");

    const double cell_w = 14, cell_h = 22, ml = 90, mt = 56, gap = 60, mb = 50;
    double W = ml + 20;
    double H = mt;
    for (const auto& p : panels) {
        W = std::max(W, ml + cell_w * static_cast<double>(p.values.cols) + 40);
        H += cell_h * static_cast<double>(p.values.rows) + gap;
    }
    H += mb;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) +
           "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double top = mt;
    for (const auto& p : panels) {
        double lo = p.values.data[0], hi = p.values.data[0];
        for (double v : p.values.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(top - 26) + "\" font-size=\"14\">" +
               p.title + "</text>\n";
        // the normalization range is part of the plot
        out += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(top - 8) +
               "\" font-size=\"11\">color range [" + fmt(lo) + ", " + fmt(hi) +
               "] (red = small, blue = large)</text>\n";
        for (std::size_t r = 0; r < p.values.rows; ++r) {
            if (r < p.row_labels.size())
                out += "<text x=\"" + fmt(ml - 6) + "\" y=\"" +
                       fmt(top + cell_h * r + cell_h / 2 + 4) +
                       "\" text-anchor=\"end\" font-size=\"11\">" + p.row_labels[r] + "</text>\n";
            for (std::size_t c = 0; c < p.values.cols; ++c) {
                const double v = p.values.at(r, c);
                const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
                int cr, cg, cb;
                heat_color(t, cr, cg, cb);
                char color[10];
                std::snprintf(color, sizeof color, "#%02x%02x%02x", cr, cg, cb);
                out += "<rect x=\"" + fmt(ml + cell_w * c) + "\" y=\"" + fmt(top + cell_h * r) +
                       "\" width=\"" + fmt(cell_w) + "\" height=\"" + fmt(cell_h) + "\" fill=\"" +
                       color + "\"/>\n";
            }
        }
        // sparse column labels
        const std::size_t stride = std::max<std::size_t>(1, p.col_labels.size() / 8);
        for (std::size_t c = 0; c < p.col_labels.size(); c += stride) {
            out += "<text x=\"" + fmt(ml + cell_w * c + cell_w / 2) + "\" y=\"" +
                   fmt(top + cell_h * p.values.rows + 14) +
                   "\" text-anchor=\"middle\" font-size=\"10\">" + p.col_labels[c] + "</text>\n";
        }
        top += cell_h * static_cast<double>(p.values.rows) + gap;
    }
    out += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(H - 16) + "\" font-size=\"12\">" + x_label +
           "  |  " + y_label + "</text>\n";
    out += "</svg>\n";
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_heatmap: cannot open " + path);
    f << out;
}

void write_spectrum_plot(const std::string& path, const std::string& title, const Vec& freqs,
                         const Vec& magnitudes, const std::vector<std::size_t>& peaks) {
    require(!freqs.empty() && freqs.size() == magnitudes.size(),
            "write_spectrum_plot: empty or ragged input");
    Series s;
    s.name = "|yhat|";
    s.x = freqs;
    s.y = magnitudes;
    // rects for the peak markers ride on top of the line plot output
    write_line_plot(path, title, "frequency", "amplitude", {s}, false, true);
    // re-read and inject markers before </svg>
    std::ifstream in(path, std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const std::string tail = "</svg>\n";
    require(body.size() >= tail.size(), "write_spectrum_plot: bad intermediate file");
    body.resize(body.size() - tail.size());

    double lo = magnitudes[0] > 0 ? magnitudes[0] : 1e-12, hi = lo;
    for (double v : magnitudes)
        if (v > 0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    Axis ax{freqs.front(), freqs.back(), false, 70, 720 - 180};
    Axis ay{lo, hi, true, 480 - 55, 50};
    for (std::size_t p : peaks) {
        require(p < freqs.size(), "write_spectrum_plot: peak index out of range");
        if (magnitudes[p] <= 0) continue;
        body += "<rect x=\"" + fmt(ax.map(freqs[p]) - 4) + "\" y=\"" +
                fmt(ay.map(magnitudes[p]) - 4) +
                "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"black\" "
                "stroke-width=\"1.5\"/>\n";
    }
    body += tail;
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_spectrum_plot: cannot reopen " + path);
    f << body;
}

}  // namespace fpl::svg
