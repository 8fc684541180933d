#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Minimal static SVG emitters for run reports: line charts with optional
// mean +/- std bands, and matrix heat maps.

namespace gestalt::plot {

struct Series {
    std::string name;
    std::vector<double> y;
    std::vector<double> band;  // optional +/- halfwidth per point (std)
};

void line_chart(const std::string& path, const std::string& title,
                const std::vector<Series>& series, const std::string& x_label = "step",
                const std::string& y_label = "");

void heatmap(const std::string& path, const std::string& title,
             const std::vector<double>& values, std::size_t rows, std::size_t cols);

}  // namespace gestalt::plot
