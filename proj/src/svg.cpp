#include "riskshare/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskshare {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string render_svg(const LinePlot& plot, int width, int height) {
    const double ml = 56, mr = 16, mt = 34, mb = 36;  // margins
    const double pw = width - ml - mr, ph = height - mt - mb;

    std::size_t npts = 0;
    for (const auto& s : plot.series) npts = std::max(npts, s.y.size());
    std::vector<double> xs = plot.x;
    if (xs.empty()) {
        xs.resize(npts);
        for (std::size_t i = 0; i < npts; ++i) xs[i] = static_cast<double>(i);
    }
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!xs.empty()) {
        xmin = *std::min_element(xs.begin(), xs.end());
        xmax = *std::max_element(xs.begin(), xs.end());
    }
    bool first = true;
    for (const auto& s : plot.series)
        for (double v : s.y) {
            if (first) { ymin = ymax = v; first = false; }
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (xmax - xmin < 1e-300) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) { ymax += 1.0; ymin -= 1.0; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << plot.title << "</text>\n";
    // frame and axis labels
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        os << "<text x=\"" << ml - 6 << "\" y=\"" << Y(yv) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(yv)
           << "</text>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << Y(yv) << "\" x2=\"" << ml + pw << "\" y2=\""
           << Y(yv) << "\" stroke=\"#eee\"/>\n";
    }
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        os << "<text x=\"" << X(xv) << "\" y=\"" << mt + ph + 14
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(xv)
           << "</text>\n";
    }
    if (!plot.x_label.empty())
        os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 6
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << plot.x_label << "</text>\n";

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const Series& s = plot.series[si];
        const char* color = kPalette[si % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            if (plot.step && i > 0) os << num(X(xs[i])) << "," << num(Y(s.y[i - 1])) << " ";
            os << num(X(xs[std::min(i, xs.size() - 1)])) << "," << num(Y(s.y[i])) << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 14 + 14 * si << "\" fill=\"" << color
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const LinePlot& plot, int width, int height) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write svg: " + path);
    out << render_svg(plot, width, height);
}

}  // namespace riskshare
