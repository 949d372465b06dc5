#ifndef FPL_SVG_HPP
#define FPL_SVG_HPP

#include <string>
#include <vector>

#include "fpl/common.hpp"

namespace fpl::svg {

struct Series {
    std::string name;
    Vec x;
    Vec y;
};

// Line plot, log-scale y when requested. Byte-deterministic for a given
// input: fixed palette, fixed formatting, no timestamps.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series, bool log_x, bool log_y);

// Heatmap of a (rows x cols) value grid; each cell one rect. The color range
// [min,max] of the data is printed into the plot. Small values render red,
// large blue.
struct Heatmap {
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Mat values;
};

void write_heatmap(const std::string& path, const std::string& x_label,
                   const std::string& y_label, const std::vector<Heatmap>& panels);

// spectrum scatter with peak markers
void write_spectrum_plot(const std::string& path, const std::string& title, const Vec& freqs,
                         const Vec& magnitudes, const std::vector<std::size_t>& peaks);

}  // namespace fpl::svg

#endif
