#include "gestalt/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gestalt::plot {

namespace {

constexpr double kW = 640, kH = 400, kMargin = 50;
const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

struct Extent {
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    void take(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
};

}  // namespace

void line_chart(const std::string& path, const std::string& title,
                const std::vector<Series>& series, const std::string& x_label,
                const std::string& y_label) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("line_chart: cannot open " + path);
    Extent ye;
    std::size_t max_n = 1;
    for (const auto& s : series) {
        max_n = std::max(max_n, s.y.size());
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double b = i < s.band.size() ? s.band[i] : 0.0;
            ye.take(s.y[i] - b);
            ye.take(s.y[i] + b);
        }
    }
    if (ye.lo > ye.hi) { ye.lo = 0; ye.hi = 1; }
    if (ye.hi - ye.lo < 1e-12) { ye.hi += 1.0; ye.lo -= 1.0; }
    auto px = [&](std::size_t i) {
        return kMargin + (kW - 2 * kMargin) * static_cast<double>(i) /
                             static_cast<double>(std::max<std::size_t>(max_n - 1, 1));
    };
    auto py = [&](double v) {
        return kH - kMargin - (kH - 2 * kMargin) * (v - ye.lo) / (ye.hi - ye.lo);
    };
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
       << "</text>\n";
    os << "<line x1='" << kMargin << "' y1='" << kH - kMargin << "' x2='" << kW - kMargin
       << "' y2='" << kH - kMargin << "' stroke='black'/>\n";
    os << "<line x1='" << kMargin << "' y1='" << kMargin << "' x2='" << kMargin << "' y2='"
       << kH - kMargin << "' stroke='black'/>\n";
    os << "<text x='" << kW / 2 << "' y='" << kH - 10 << "' text-anchor='middle' font-size='11'>"
       << x_label << "</text>\n";
    os << "<text x='15' y='" << kH / 2 << "' font-size='11' transform='rotate(-90 15 "
       << kH / 2 << ")' text-anchor='middle'>" << y_label << "</text>\n";
    os << "<text x='" << kMargin - 5 << "' y='" << py(ye.lo) << "' text-anchor='end' font-size='10'>"
       << ye.lo << "</text>\n";
    os << "<text x='" << kMargin - 5 << "' y='" << py(ye.hi) << "' text-anchor='end' font-size='10'>"
       << ye.hi << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        const char* color = kColors[s % 6];
        if (!ser.band.empty()) {
            os << "<polygon fill='" << color << "' fill-opacity='0.2' stroke='none' points='";
            for (std::size_t i = 0; i < ser.y.size(); ++i)
                os << px(i) << "," << py(ser.y[i] + ser.band[i]) << " ";
            for (std::size_t i = ser.y.size(); i-- > 0;)
                os << px(i) << "," << py(ser.y[i] - ser.band[i]) << " ";
            os << "'/>\n";
        }
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < ser.y.size(); ++i) os << px(i) << "," << py(ser.y[i]) << " ";
        os << "'/>\n";
        os << "<text x='" << kW - kMargin + 5 << "' y='" << kMargin + 15 * (s + 1)
           << "' font-size='10' fill='" << color << "'>" << ser.name << "</text>\n";
    }
    os << "</svg>\n";
}

void heatmap(const std::string& path, const std::string& title,
             const std::vector<double>& values, std::size_t rows, std::size_t cols) {
    if (values.size() != rows * cols) throw std::invalid_argument("heatmap: size mismatch");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("heatmap: cannot open " + path);
    Extent e;
    for (double v : values) e.take(v);
    if (e.lo > e.hi) { e.lo = 0; e.hi = 1; }
    if (e.hi - e.lo < 1e-12) e.hi = e.lo + 1;
    const double cell = std::min((kW - 2 * kMargin) / static_cast<double>(cols),
                                 (kH - 2 * kMargin) / static_cast<double>(rows));
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
       << "</text>\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double t = (values[r * cols + c] - e.lo) / (e.hi - e.lo);
            const int shade = static_cast<int>(255.0 * (1.0 - t));
            os << "<rect x='" << kMargin + cell * static_cast<double>(c) << "' y='"
               << kMargin + cell * static_cast<double>(r) << "' width='" << cell << "' height='"
               << cell << "' fill='rgb(" << 255 - shade / 4 << "," << shade << "," << shade
               << ")'/>\n";
        }
    }
    os << "</svg>\n";
}

}  // namespace gestalt::plot
