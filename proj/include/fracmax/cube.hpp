#pragma once

#include <cmath>

#include "fracmax/grid.hpp"

namespace fracmax {

/// Half-open cube [corner, corner + 2^level) of one of the 3^d dyadic grids.
/// shift_id == 0 is the standard grid. For shift_id > 0 each axis uses the
/// base-3 digit t of shift_id (axis 0 least significant) and the nested
/// one-third construction: lower corner = 2^level * (index + (-1)^level t/3).
struct DyadicCube {
  int shift_id = 0;
  int level = 0;
  Index index{0, 0};

  bool operator==(const DyadicCube&) const = default;
};

long floor_div(long a, long b);

int grid_count(int dim);  // 3^dim
int shift_digit(int shift_id, int axis);

double cube_side(const DyadicCube& q);
double cube_lower(const DyadicCube& q, int axis);
double cube_upper(const DyadicCube& q, int axis);
DyadicCube parent(const DyadicCube& q, int dim);

/// Unique cube of the given grid and level containing the point x.
DyadicCube cube_containing(int shift_id, int level, const Vec& x, int dim);

/// Cube-level set relations on the same grid.
bool cube_contains(const DyadicCube& outer, const DyadicCube& inner, int dim);
bool cubes_intersect(const DyadicCube& a, const DyadicCube& b, int dim);
/// x in the closed cube.
bool closure_contains(const DyadicCube& q, const Vec& x, int dim);

/// Exponent helper shared by every routine that needs sle(Q)^s.
inline double side_pow(int level, double s) { return std::exp2(static_cast<double>(level) * s); }

}  // namespace fracmax
