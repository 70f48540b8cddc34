#pragma once

#include <iosfwd>
#include <vector>

#include "toporec/mask.hpp"

namespace toporec {

// Unit direction on S^1; index k of d evenly spaced directions,
// angle 2*pi*k/d measured in (column, row) coordinates.
struct Direction {
  int index = 0;
  double ux = 1.0;
  double uy = 0.0;
};

// Height-function filtration values for one mask and one direction.
// Foreground pixels carry their distance along the direction, anchored at
// the grid corner that minimizes it (so the grid minimum is exactly 0);
// background pixels carry h_infinity, the grid diameter along the
// direction. Values are row-major.
struct HeightField {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  double h_infinity = 0.0;
  Direction direction;

  double at(int col, int row) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
};

// d evenly spaced directions, p_k = (cos(2*pi*k/d), sin(2*pi*k/d)).
// When d is divisible by 4, directions are built from the first quadrant by
// exact quarter turns (x, y) -> (-y, x), so p_{k + d/4} is a bitwise
// quarter turn of p_k; rotation equivariance of downstream diagrams is then
// exact, not approximate.
std::vector<Direction> make_directions(int d);

HeightField height_field(const BinaryMask& mask, const Direction& p);

// Quarter-turn counterclockwise, same index permutation as the mask rotation.
HeightField rotate90(const HeightField& hf);

// Debug dump: ASCII PGM with values mapped linearly onto 0..255.
void write_pgm(std::ostream& out, const HeightField& hf);

}  // namespace toporec
