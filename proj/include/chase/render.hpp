#pragma once

// Binary PPM (P6) output for planar snapshots: one pixel per site,
// row 0 of the grid (largest y) first.

#include <array>
#include <cstdint>
#include <string>

#include "chase/engine.hpp"

namespace chase {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kEmptyPixel{255, 255, 255};
inline constexpr Rgb kRedPixel{220, 50, 47};
inline constexpr Rgb kBluePixel{38, 139, 210};

Rgb pixel_for(SiteColor color);

/// Complete P6 file contents: "P6\n<w> <h>\n255\n" followed by RGB triples.
std::string encode_ppm(const ColorGrid& grid);

/// Writes encode_ppm(grid) to `path`; throws std::runtime_error naming the
/// path when it cannot be written.
void write_ppm(const ColorGrid& grid, const std::string& path);

}  // namespace chase
