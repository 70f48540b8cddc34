#include "toporec/height.hpp"

#include <cmath>
#include <ostream>

#include "toporec/errors.hpp"

namespace toporec {

std::vector<Direction> make_directions(int d) {
  if (d < 1) throw Error("make_directions: d must be >= 1");
  std::vector<Direction> dirs(d);
  const double step = 2.0 * M_PI / d;
  if (d % 4 == 0) {
    const int q = d / 4;
    for (int k = 0; k < q; ++k) {
      dirs[k].ux = std::cos(step * k) + 0.0;
      dirs[k].uy = std::sin(step * k) + 0.0;
    }
    for (int k = q; k < d; ++k) {
      dirs[k].ux = -dirs[k - q].uy + 0.0;  // +0.0 folds -0 into +0
      dirs[k].uy = dirs[k - q].ux;
    }
  } else {
    for (int k = 0; k < d; ++k) {
      dirs[k].ux = std::cos(step * k);
      dirs[k].uy = std::sin(step * k);
    }
  }
  for (int k = 0; k < d; ++k) dirs[k].index = k;
  return dirs;
}

HeightField height_field(const BinaryMask& mask, const Direction& p) {
  if (mask.foreground_count() == 0) throw EmptyMask("height_field input");
  HeightField hf;
  hf.width = mask.width;
  hf.height = mask.height;
  hf.direction = p;

  // anchor at the corner minimizing <v, p>; the minimum over the grid is
  // then exactly 0 and h_infinity is the diameter along p
  const int c0 = p.ux >= 0.0 ? 0 : mask.width - 1;
  const int r0 = p.uy >= 0.0 ? 0 : mask.height - 1;
  hf.h_infinity =
      (mask.width - 1) * std::fabs(p.ux) + (mask.height - 1) * std::fabs(p.uy);

  hf.values.resize(static_cast<std::size_t>(mask.width) * mask.height);
  std::size_t i = 0;
  for (int r = 0; r < mask.height; ++r)
    for (int c = 0; c < mask.width; ++c, ++i)
      hf.values[i] = mask.pixels[i] ? (c - c0) * p.ux + (r - r0) * p.uy : hf.h_infinity;
  return hf;
}

HeightField rotate90(const HeightField& hf) {
  HeightField out;
  out.width = hf.height;
  out.height = hf.width;
  out.h_infinity = hf.h_infinity;
  out.direction = hf.direction;
  out.values.resize(hf.values.size());
  for (int i = 0; i < out.height; ++i)
    for (int j = 0; j < out.width; ++j)
      out.values[static_cast<std::size_t>(i) * out.width + j] = hf.at(hf.width - 1 - i, j);
  return out;
}

void write_pgm(std::ostream& out, const HeightField& hf) {
  out << "P2\n" << hf.width << " " << hf.height << "\n255\n";
  const double scale = hf.h_infinity > 0.0 ? 255.0 / hf.h_infinity : 0.0;
  for (int r = 0; r < hf.height; ++r) {
    for (int c = 0; c < hf.width; ++c) {
      const int v = static_cast<int>(std::lround(hf.at(c, r) * scale));
      out << v << (c + 1 == hf.width ? "" : " ");
    }
    out << "\n";
  }
}

}  // namespace toporec
