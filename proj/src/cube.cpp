#include "fracmax/cube.hpp"

#include <cmath>

namespace fracmax {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

namespace {

double parity_sign(int level) { return (level % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

int grid_count(int dim) { return dim == 1 ? 3 : 9; }

int shift_digit(int shift_id, int axis) {
  for (int a = 0; a < axis; ++a) shift_id /= 3;
  return shift_id % 3;
}

double cube_side(const DyadicCube& q) { return std::exp2(static_cast<double>(q.level)); }

double cube_lower(const DyadicCube& q, int axis) {
  const double k = static_cast<double>(q.index[axis]);
  const int t = shift_digit(q.shift_id, axis);
  if (t == 0) return std::ldexp(k, q.level);
  return std::ldexp(k + parity_sign(q.level) * t / 3.0, q.level);
}

double cube_upper(const DyadicCube& q, int axis) {
  DyadicCube next = q;
  next.index[axis] += 1;
  return cube_lower(next, axis);
}

DyadicCube parent(const DyadicCube& q, int dim) {
  DyadicCube p = q;
  p.level = q.level + 1;
  for (int a = 0; a < dim; ++a) {
    const int t = shift_digit(q.shift_id, a);
    // (k + s_n t/3) / 2 - s_{n+1} t/3 = (k + s_n t) / 2
    const long sign_t = (q.level % 2 == 0 ? 1L : -1L) * t;
    p.index[a] = floor_div(q.index[a] + sign_t, 2);
  }
  return p;
}

DyadicCube cube_containing(int shift_id, int level, const Vec& x, int dim) {
  DyadicCube q;
  q.shift_id = shift_id;
  q.level = level;
  for (int a = 0; a < dim; ++a) {
    const int t = shift_digit(shift_id, a);
    const double u = std::ldexp(x[a], -level) - parity_sign(level) * t / 3.0;
    q.index[a] = static_cast<long>(std::floor(u));
  }
  return q;
}

bool cube_contains(const DyadicCube& outer, const DyadicCube& inner, int dim) {
  if (outer.shift_id != inner.shift_id || outer.level < inner.level) return false;
  DyadicCube q = inner;
  while (q.level < outer.level) q = parent(q, dim);
  for (int a = 0; a < dim; ++a)
    if (q.index[a] != outer.index[a]) return false;
  return true;
}

bool cubes_intersect(const DyadicCube& a, const DyadicCube& b, int dim) {
  return a.level >= b.level ? cube_contains(a, b, dim) : cube_contains(b, a, dim);
}

bool closure_contains(const DyadicCube& q, const Vec& x, int dim) {
  for (int a = 0; a < dim; ++a) {
    if (x[a] < cube_lower(q, a) || x[a] > cube_upper(q, a)) return false;
  }
  return true;
}

}  // namespace fracmax
