#include "gemeit/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gemeit {

namespace {
constexpr double W = 760, H = 480;
constexpr double ML = 70, MR = 20, MT = 40, MB = 55;

std::string num(double v) {
    char buf[40];
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
    void pad() {
        if (!(hi > lo)) { lo -= 1.0; hi += 1.0; }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};
} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(std::span<const double> x, std::span<const double> y,
                       const std::string& label, const std::string& color, bool dashed) {
    if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: x/y size mismatch");
    series_.push_back({{x.begin(), x.end()}, {y.begin(), y.end()}, label, color, dashed});
}

void SvgPlot::save(const std::string& path) const {
    Range rx, ry;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.include(s.x[i]);
            ry.include(s.y[i]);
        }
    rx.pad();
    ry.pad();
    auto px = [&](double v) { return ML + (v - rx.lo) / (rx.hi - rx.lo) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - (v - ry.lo) / (ry.hi - ry.lo) * (H - MT - MB); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("SvgPlot: cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title_
        << "</text>\n";

    // frame and ticks
    out << "<rect x='" << ML << "' y='" << MT << "' width='" << W - ML - MR << "' height='"
        << H - MT - MB << "' fill='none' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
        out << "<line x1='" << px(fx) << "' y1='" << H - MB << "' x2='" << px(fx) << "' y2='"
            << H - MB + 5 << "' stroke='black'/>\n"
            << "<text x='" << px(fx) << "' y='" << H - MB + 18
            << "' text-anchor='middle' font-size='11'>" << num(fx) << "</text>\n"
            << "<line x1='" << ML - 5 << "' y1='" << py(fy) << "' x2='" << ML << "' y2='" << py(fy)
            << "' stroke='black'/>\n"
            << "<text x='" << ML - 8 << "' y='" << py(fy) + 4
            << "' text-anchor='end' font-size='11'>" << num(fy) << "</text>\n";
    }
    out << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='13'>"
        << x_label_ << "</text>\n"
        << "<text x='18' y='" << H / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
        << H / 2 << ")'>" << y_label_ << "</text>\n";

    double ly = MT + 14;
    for (const auto& s : series_) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5'";
        if (s.dashed) out << " stroke-dasharray='6,4'";
        out << " points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
        out << "'/>\n";
        if (!s.label.empty()) {
            out << "<line x1='" << W - MR - 150 << "' y1='" << ly << "' x2='" << W - MR - 120
                << "' y2='" << ly << "' stroke='" << s.color << "' stroke-width='2'"
                << (s.dashed ? " stroke-dasharray='6,4'" : "") << "/>\n"
                << "<text x='" << W - MR - 114 << "' y='" << ly + 4 << "' font-size='12'>"
                << s.label << "</text>\n";
            ly += 16;
        }
    }
    out << "</svg>\n";
}

void save_heatmap_svg(const std::string& path, const std::string& title,
                      std::span<const double> times, std::span<const double> axis,
                      std::span<const double> values, const std::string& x_label,
                      const std::string& y_label) {
    if (values.size() != times.size() * axis.size())
        throw std::invalid_argument("save_heatmap_svg: size mismatch");
    const std::size_t max_cells = 180;
    const std::size_t sx = std::max<std::size_t>(1, times.size() / max_cells);
    const std::size_t sy = std::max<std::size_t>(1, axis.size() / max_cells);
    const std::size_t nx = (times.size() + sx - 1) / sx;
    const std::size_t ny = (axis.size() + sy - 1) / sy;

    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;

    auto color = [&](double v) {
        const double u = std::clamp(v / vmax, 0.0, 1.0);
        // dark blue -> cyan -> yellow
        const int r = static_cast<int>(255 * std::clamp(2.0 * u - 1.0, 0.0, 1.0));
        const int g = static_cast<int>(255 * std::clamp(1.6 * u, 0.0, 1.0));
        const int b = static_cast<int>(255 * std::clamp(1.0 - 1.4 * std::max(0.0, u - 0.3), 0.15, 1.0));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    const double cw = (W - ML - MR) / static_cast<double>(nx);
    const double ch = (H - MT - MB) / static_cast<double>(ny);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_heatmap_svg: cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    for (std::size_t jy = 0; jy < ny; ++jy) {
        for (std::size_t jx = 0; jx < nx; ++jx) {
            // block max keeps narrow features visible
            double v = 0.0;
            for (std::size_t a = jy * sy; a < std::min(axis.size(), (jy + 1) * sy); ++a)
                for (std::size_t t = jx * sx; t < std::min(times.size(), (jx + 1) * sx); ++t)
                    v = std::max(v, values[a * times.size() + t]);
            out << "<rect x='" << num(ML + cw * static_cast<double>(jx)) << "' y='"
                << num(H - MB - ch * static_cast<double>(jy + 1)) << "' width='" << num(cw + 0.5)
                << "' height='" << num(ch + 0.5) << "' fill='" << color(v) << "'/>\n";
        }
    }
    out << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='13'>"
        << x_label << " (" << num(times.front()) << " to " << num(times.back()) << ")</text>\n"
        << "<text x='18' y='" << H / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
        << H / 2 << ")'>" << y_label << " (" << num(axis.front()) << " to " << num(axis.back())
        << ")</text>\n</svg>\n";
}

} // namespace gemeit
