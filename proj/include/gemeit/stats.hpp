#pragma once

#include <span>
#include <vector>

namespace gemeit {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

// Linear interpolation of y(x) at xq; x must be ascending.
double interp_at(std::span<const double> x, std::span<const double> y, double xq);

// Sequentially removes 2*pi jumps so consecutive values differ by < pi.
std::vector<double> unwrap_phases(std::span<const double> phases);

} // namespace gemeit
