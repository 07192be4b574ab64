#include "gemeit/quadrature.hpp"

#include <stdexcept>

namespace gemeit {

namespace {
using cd = std::complex<double>;

// Cubic interpolation at the midpoint of interval [i, i+1].
inline cd midpoint(std::span<const cd> f, std::size_t i) {
    const std::size_t n = f.size();
    if (i == 0) // one-sided stencil f0..f3 at x = 1/2
        return (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    if (i + 2 >= n) // mirrored one-sided stencil at the right edge
        return (f[n - 4] - 5.0 * f[n - 3] + 15.0 * f[n - 2] + 5.0 * f[n - 1]) / 16.0;
    return (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0;
}
} // namespace

void cumulative_integral(std::span<const cd> f, double h, std::span<cd> out) {
    const std::size_t n = f.size();
    if (out.size() != n) throw std::invalid_argument("cumulative_integral: size mismatch");
    if (n == 0) return;
    out[0] = 0.0;
    if (n < 4) { // not enough points for cubic midpoints
        for (std::size_t i = 0; i + 1 < n; ++i)
            out[i + 1] = out[i] + 0.5 * h * (f[i] + f[i + 1]);
        return;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const cd mid = midpoint(f, i);
        out[i + 1] = out[i] + (h / 6.0) * (f[i] + 4.0 * mid + f[i + 1]);
    }
}

double total_integral(std::span<const double> f, double h) {
    std::vector<cd> fc(f.begin(), f.end());
    std::vector<cd> acc(fc.size());
    cumulative_integral(fc, h, acc);
    return acc.empty() ? 0.0 : acc.back().real();
}

} // namespace gemeit
