#pragma once

#include "mvi/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mvi {

enum class PngMapping { magnitude, phase, real };

PngMapping png_mapping_from_string(const std::string& s);

// 8-bit grey levels, row-major, before PNG encoding. Magnitude and real
// use a linear min-max map (constant grids map to 0); phase wraps
// [-pi, pi) linearly onto [0, 255].
std::vector<unsigned char> grey_levels(const ComplexGrid& grid, PngMapping mapping);

void export_png(const std::filesystem::path& path, const ComplexGrid& grid, PngMapping mapping);
void export_png(const std::filesystem::path& path, const RealGrid& grid, PngMapping mapping);

} // namespace mvi
