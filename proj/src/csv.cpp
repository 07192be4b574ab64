#include "gemeit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gemeit {

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || header.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column mismatch");
    const std::size_t rows = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? "," : "\n");
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << fmt(columns[c][r]) << (c + 1 < columns.size() ? "," : "\n");
}

void write_envelope_csv(const std::string& path, const ComplexEnvelope& env) {
    std::vector<double> t(env.size()), re(env.size()), im(env.size()), mag(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        t[i] = env.t_at(i);
        re[i] = env.samples[i].real();
        im[i] = env.samples[i].imag();
        mag[i] = std::abs(env.samples[i]);
    }
    write_csv(path, {"time_us", "re", "im", "abs"}, {t, re, im, mag});
}

void write_matrix_csv(const std::string& path, const std::string& axis_name,
                      std::span<const double> axis, std::span<const double> times,
                      std::span<const double> values) {
    if (values.size() != axis.size() * times.size())
        throw std::invalid_argument("write_matrix_csv: size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
    out << axis_name;
    for (double t : times) out << ",t=" << fmt(t);
    out << "\n";
    for (std::size_t ia = 0; ia < axis.size(); ++ia) {
        out << fmt(axis[ia]);
        for (std::size_t it = 0; it < times.size(); ++it)
            out << "," << fmt(values[ia * times.size() + it]);
        out << "\n";
    }
}

} // namespace gemeit
