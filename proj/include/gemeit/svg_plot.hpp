#pragma once

#include <span>
#include <string>
#include <vector>

namespace gemeit {

// Minimal self-contained SVG line plots and heatmaps for run artifacts.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_line(std::span<const double> x, std::span<const double> y,
                  const std::string& label, const std::string& color,
                  bool dashed = false);
    void save(const std::string& path) const;

private:
    std::string title_, x_label_, y_label_;
    struct Series {
        std::vector<double> x, y;
        std::string label, color;
        bool dashed;
    };
    std::vector<Series> series_;
};

// values are axis-major [axis x times]; rendered downsampled.
void save_heatmap_svg(const std::string& path, const std::string& title,
                      std::span<const double> times, std::span<const double> axis,
                      std::span<const double> values, const std::string& x_label,
                      const std::string& y_label);

} // namespace gemeit
