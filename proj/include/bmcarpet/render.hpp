#pragma once

// SVG rendering and CSV cell dumps of Q_k. Output is a pure function of the
// digit set and level.

#include <cstdint>
#include <sstream>
#include <string>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/errors.hpp"
#include "bmcarpet/grid.hpp"

namespace bmcarpet {

inline constexpr std::int64_t kDefaultRenderCells = 1'000'000;

// The viewBox is the level-k grid (n^k by m^k units) stretched onto a square
// canvas, so each rectangle has integer coordinates. SVG y grows downward,
// hence row Y is drawn at m^k - 1 - Y.
inline std::string render_svg(const DigitSet& ds, int level,
                              std::int64_t max_cells = kDefaultRenderCells,
                              int canvas_px = 512) {
  RowStream stream(ds, level, Window::plain(), StreamLimits{max_cells, -1});
  const std::int64_t w = stream.tile_width();
  const std::int64_t h = stream.tile_height();
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << canvas_px
     << "\" height=\"" << canvas_px << "\" viewBox=\"0 0 " << w << " " << h
     << "\" preserveAspectRatio=\"none\" shape-rendering=\"crispEdges\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"#ffffff\"/>\n"
     << "<g fill=\"#000000\">\n";
  for_each_cell(stream, [&](std::int64_t x, std::int64_t y) {
    os << "<rect x=\"" << x << "\" y=\"" << (h - 1 - y) << "\" width=\"1\" height=\"1\"/>\n";
  });
  os << "</g>\n</svg>\n";
  return os.str();
}

inline std::string cells_csv(const DigitSet& ds, int level, std::int64_t max_cells) {
  RowStream stream(ds, level, Window::plain(), StreamLimits{max_cells, -1});
  std::ostringstream os;
  os << "# level " << level << "\nX,Y\n";
  for_each_cell(stream, [&](std::int64_t x, std::int64_t y) { os << x << "," << y << "\n"; });
  return os.str();
}

}  // namespace bmcarpet
