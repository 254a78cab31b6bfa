#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fracmax {

using Vec = std::array<double, 2>;
using Index = std::array<long, 2>;

/// Nonnegative piecewise-constant function on a uniform grid in dimension 1
/// or 2, zero outside its box. Axis 0 is the outer (slow) axis; for dim == 1
/// shape[1] == 1.
struct GridFunction {
  int dim = 1;
  std::array<long, 2> shape{1, 1};
  double spacing = 1.0;
  Vec origin{0.0, 0.0};
  std::vector<double> values;

  /// Validates every invariant and throws Error(InvalidGrid) on violation.
  static GridFunction make(int dim, std::span<const long> shape, double spacing,
                           std::span<const double> origin, std::vector<double> values);

  static GridFunction zeros(int dim, std::span<const long> shape, double spacing,
                            std::span<const double> origin);

  std::size_t size() const { return values.size(); }
  std::size_t flat(long i, long j = 0) const {
    return static_cast<std::size_t>(i * shape[1] + j);
  }
  bool in_box(long i, long j = 0) const {
    return i >= 0 && i < shape[0] && j >= 0 && j < shape[1];
  }
  /// Zero-extended access.
  double value(long i, long j = 0) const { return in_box(i, j) ? values[flat(i, j)] : 0.0; }
  double cell_volume() const;
  double cell_center(int axis, long idx) const {
    return origin[axis] + (static_cast<double>(idx) + 0.5) * spacing;
  }
  double max_value() const;
  double lp_norm(double p) const;
  /// Largest distance between two points of the box.
  double box_diameter() const;
};

struct Ball {
  Vec center{0.0, 0.0};
  double radius = 0.0;
};

/// Axis-aligned block of cells [lo, hi) in cell indices; may extend past the box.
struct CellBox {
  Index lo{0, 0};
  Index hi{1, 1};
};

struct LevelSet {
  double threshold = 0.0;
  std::vector<unsigned char> mask;  // same layout as the source GridFunction
  int dim = 1;
  std::array<long, 2> shape{1, 1};
  double spacing = 1.0;

  bool contains(long i, long j = 0) const {
    return i >= 0 && i < shape[0] && j >= 0 && j < shape[1] &&
           mask[static_cast<std::size_t>(i * shape[1] + j)] != 0;
  }
  std::size_t count() const;
};

/// Volume of the unit ball (2 in d=1, pi in d=2).
double unit_ball_volume(int dim);

/// Ball geometry in units of h/2 relative to the grid origin. Cell (i, j) has
/// its center at (2i+1, 2j+1); half-lattice ball centers are integers.
/// Coordinates within 1e-9 of an integer are snapped so lattice balls
/// discretize identically regardless of the floating-point route.
struct LatticeBall {
  Vec center{0.0, 0.0};  // in half-cell units
  double radius_sq = 0.0;  // (2r/h)^2, snapped
};

LatticeBall to_lattice(const GridFunction& f, const Ball& b);

/// Cell-center rule: strict inequality.
inline bool cell_in_ball(const LatticeBall& b, int dim, long i, long j) {
  const double dx = static_cast<double>(2 * i + 1) - b.center[0];
  double d2 = dx * dx;
  if (dim == 2) {
    const double dy = static_cast<double>(2 * j + 1) - b.center[1];
    d2 += dy * dy;
  }
  return d2 < b.radius_sq;
}

/// Closed ball test used for "x in cl B".
inline bool cell_in_closed_ball(const LatticeBall& b, int dim, long i, long j) {
  const double dx = static_cast<double>(2 * i + 1) - b.center[0];
  double d2 = dx * dx;
  if (dim == 2) {
    const double dy = static_cast<double>(2 * j + 1) - b.center[1];
    d2 += dy * dy;
  }
  return d2 <= b.radius_sq;
}

/// Range of integer cells i with base + (2i+1 - c)^2 < r2 (strict) or <= r2
/// (closed). `base` carries the squared offset along the other axis so the
/// test matches cell_in_ball bit for bit. Empty range (lo > hi) when none qualify.
std::pair<long, long> cell_span(double c, double r2, bool closed, double base = 0.0);

/// Range of half-lattice points u with base + (u - c)^2 <= r2.
std::pair<long, long> lattice_span(double c, double r2, double base = 0.0);

}  // namespace fracmax
