#pragma once

#include <string>
#include <vector>

namespace riskshare {

struct Series {
    std::string label;
    std::vector<double> y;
};

/// A self-contained SVG line chart. When x is empty, points are placed at
/// 0..n-1. step=true renders piecewise-constant series (tie-break rules).
struct LinePlot {
    std::string title;
    std::string x_label;
    std::vector<double> x;
    std::vector<Series> series;
    bool step = false;
};

std::string render_svg(const LinePlot& plot, int width = 640, int height = 400);

void write_svg(const std::string& path, const LinePlot& plot, int width = 640,
               int height = 400);

}  // namespace riskshare
