#include "gemeit/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gemeit {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need two or more paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate x values");
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need two or more paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    if (cxx == 0.0 || cyy == 0.0) throw std::invalid_argument("pearson: constant series");
    return cxy / std::sqrt(cxx * cyy);
}

double interp_at(std::span<const double> x, std::span<const double> y, double xq) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("interp_at: need two or more paired points");
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    std::size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (x[mid] <= xq) lo = mid;
        else hi = mid;
    }
    const double f = (xq - x[lo]) / (x[hi] - x[lo]);
    return y[lo] * (1.0 - f) + y[hi] * f;
}

std::vector<double> unwrap_phases(std::span<const double> phases) {
    std::vector<double> out(phases.begin(), phases.end());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 1; i < out.size(); ++i) {
        while (out[i] - out[i - 1] > std::numbers::pi) out[i] -= two_pi;
        while (out[i] - out[i - 1] < -std::numbers::pi) out[i] += two_pi;
    }
    return out;
}

} // namespace gemeit
