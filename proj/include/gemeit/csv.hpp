#pragma once

#include <span>
#include <string>
#include <vector>

#include "gemeit/envelope.hpp"

namespace gemeit {

// UTF-8 CSV with a header row and full double precision (%.17g).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

void write_envelope_csv(const std::string& path, const ComplexEnvelope& env);

// Matrix layout: first column is the axis, remaining columns are the time
// slices named in the header.
void write_matrix_csv(const std::string& path, const std::string& axis_name,
                      std::span<const double> axis, std::span<const double> times,
                      std::span<const double> values /* axis-major */);

} // namespace gemeit
