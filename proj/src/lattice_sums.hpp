#pragma once

#include <cmath>
#include <vector>

#include "fracmax/grid.hpp"

namespace fracmax::detail {

// The grid seen as rows x cols cells with row prefix sums. In d = 1 there is a
// single row and the ball geometry lives along the columns only.
struct Layout {
  bool one_d = false;
  long rows = 1;
  long cols = 1;
  std::vector<double> prefix;  // rows * (cols + 1)

  explicit Layout(const GridFunction& f);

  long lattice_rows() const { return one_d ? 1 : 2 * rows + 1; }
  long lattice_cols() const { return 2 * cols + 1; }
  // Cells [b0, b1) of row a, clamped to the box.
  double row_sum(long a, long b0, long b1) const {
    if (a < 0 || a >= rows) return 0.0;
    b0 = b0 < 0 ? 0 : (b0 > cols ? cols : b0);
    b1 = b1 < 0 ? 0 : (b1 > cols ? cols : b1);
    if (b1 <= b0) return 0.0;
    const double* p = prefix.data() + a * (cols + 1);
    return p[b1] - p[b0];
  }
};

struct RowRun {
  long da = 0;  // row offset
  long lo = 0;  // column offsets, inclusive
  long hi = -1;
};

// Cells covered by the open lattice disc of squared radius r2 centered at a
// lattice point with parity (pa, pb): cell (m_a + da, m_b + j) for j in
// [lo, hi], where the center is (2 m_a + pa, 2 m_b + pb).
struct DiscTemplate {
  std::vector<RowRun> runs;
  long count = 0;
};

DiscTemplate open_disc(bool one_d, double r2, int pa, int pb);

// Lattice points u with |u - cell center|^2 <= r2, relative to the center.
std::vector<RowRun> closed_cover(bool one_d, double r2);

struct LatticeSum {
  double sum = 0.0;
  long count = 0;
};

// Virtual lattice coordinates: (0, u) in d = 1, (u0, u1) in d = 2.
LatticeSum disc_sum(const Layout& L, const DiscTemplate& t, long ua, long ub);

// Squared lattice radius for a physical radius, snapped like to_lattice.
double lattice_radius_sq(const GridFunction& f, double r);

}  // namespace fracmax::detail
