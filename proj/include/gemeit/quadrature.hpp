#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gemeit {

// Cumulative integral of uniformly sampled data by composite Simpson with
// cubic-interpolated midpoints (4th order). out[0] = 0,
// out[n] = integral from x0 to x0 + n*h. Falls back to the trapezoid rule
// when fewer than 4 points are available.
void cumulative_integral(std::span<const std::complex<double>> f, double h,
                         std::span<std::complex<double>> out);

double total_integral(std::span<const double> f, double h);

} // namespace gemeit
