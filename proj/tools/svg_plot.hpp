#pragma once

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace episim::tools {

// Minimal static line-plot writer: enough for trajectory overlays, nothing
// interactive. Axes are linear with simple margins.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string label, std::vector<double> x, std::vector<double> y) {
        if (x.size() != y.size())
            throw std::invalid_argument("SvgPlot: x/y size mismatch");
        series_.push_back({std::move(label), std::move(x), std::move(y)});
    }

    void save(const std::string& path) const {
        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                       "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
        constexpr double w = 720, h = 480, ml = 70, mr = 150, mt = 40, mb = 50;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_) {
            for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
            for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
        }
        if (series_.empty() || xmax <= xmin) { xmin = 0; xmax = 1; }
        if (ymax <= ymin) { ymin = 0; ymax = 1; }
        auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
        auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write plot: " + path);
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
            << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
        out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>"
            << title_ << "</text>\n";
        out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='"
            << h - mb << "' stroke='black'/>\n";
        out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
            << "' stroke='black'/>\n";
        out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
            << "' text-anchor='middle' font-size='12'>" << x_label_ << "</text>\n";
        out << "<text x='18' y='" << (mt + h - mb) / 2
            << "' text-anchor='middle' font-size='12' transform='rotate(-90 18 "
            << (mt + h - mb) / 2 << ")'>" << y_label_ << "</text>\n";
        for (std::size_t s = 0; s < series_.size(); ++s) {
            const auto& color = colors[s % 8];
            out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
            for (std::size_t k = 0; k < series_[s].x.size(); ++k)
                out << px(series_[s].x[k]) << "," << py(series_[s].y[k]) << " ";
            out << "'/>\n";
            const double ly = mt + 18.0 * static_cast<double>(s);
            out << "<line x1='" << w - mr + 10 << "' y1='" << ly << "' x2='" << w - mr + 34
                << "' y2='" << ly << "' stroke='" << color << "' stroke-width='2'/>\n";
            out << "<text x='" << w - mr + 40 << "' y='" << ly + 4 << "' font-size='11'>"
                << series_[s].label << "</text>\n";
        }
        out << "</svg>\n";
    }

private:
    struct Series {
        std::string label;
        std::vector<double> x, y;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

}  // namespace episim::tools
