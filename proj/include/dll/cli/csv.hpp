#pragma once

#include <string>

#include "dll/pipeline.hpp"

namespace dll::cli {

/// Reads a CSV with header `y,x1,x2_1,...,x2_p`.
Dataset load_csv(const std::string& path);

/// Writes the same layout with 17 significant digits.
void write_csv(const std::string& path, const Dataset& data);

}  // namespace dll::cli
