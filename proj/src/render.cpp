#include "chase/render.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace chase {

Rgb pixel_for(SiteColor color) {
  switch (color) {
    case SiteColor::Red: return kRedPixel;
    case SiteColor::Blue: return kBluePixel;
    case SiteColor::Empty: break;
  }
  return kEmptyPixel;
}

std::string encode_ppm(const ColorGrid& grid) {
  std::string out = fmt::format("P6\n{} {}\n255\n", grid.width, grid.height);
  out.reserve(out.size() + grid.cells.size() * 3);
  for (SiteColor c : grid.cells) {
    const Rgb px = pixel_for(c);
    out.append(reinterpret_cast<const char*>(px.data()), px.size());
  }
  return out;
}

void write_ppm(const ColorGrid& grid, const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::string bytes = encode_ppm(grid);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace chase
