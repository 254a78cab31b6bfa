#include "lattice_sums.hpp"

#include <algorithm>

namespace fracmax::detail {

Layout::Layout(const GridFunction& f)
    : one_d(f.dim == 1), rows(f.dim == 1 ? 1 : f.shape[0]), cols(f.dim == 1 ? f.shape[0] : f.shape[1]) {
  prefix.assign(static_cast<std::size_t>(rows * (cols + 1)), 0.0);
  for (long a = 0; a < rows; ++a) {
    double* p = prefix.data() + a * (cols + 1);
    const double* v = f.values.data() + a * cols;
    for (long b = 0; b < cols; ++b) p[b + 1] = p[b] + v[b];
  }
}

DiscTemplate open_disc(bool one_d, double r2, int pa, int pb) {
  DiscTemplate t;
  auto add_row = [&](long da, double base) {
    const auto [lo, hi] = cell_span(pb, r2, false, base);
    if (hi < lo) return;
    t.runs.push_back({da, lo, hi});
    t.count += hi - lo + 1;
  };
  if (one_d) {
    add_row(0, 0.0);
    return t;
  }
  const auto [alo, ahi] = cell_span(pa, r2, false);
  for (long da = alo; da <= ahi; ++da) {
    const double dx = static_cast<double>(2 * da + 1 - pa);
    add_row(da, dx * dx);
  }
  return t;
}

std::vector<RowRun> closed_cover(bool one_d, double r2) {
  std::vector<RowRun> runs;
  auto add_row = [&](long da, double base) {
    const auto [lo, hi] = lattice_span(0.0, r2, base);
    if (hi >= lo) runs.push_back({da, lo, hi});
  };
  if (one_d) {
    add_row(0, 0.0);
    return runs;
  }
  const auto [alo, ahi] = lattice_span(0.0, r2);
  for (long da = alo; da <= ahi; ++da) {
    const double dx = static_cast<double>(da);
    add_row(da, dx * dx);
  }
  return runs;
}

LatticeSum disc_sum(const Layout& L, const DiscTemplate& t, long ua, long ub) {
  const long ma = L.one_d ? 0 : (ua - (ua & 1)) / 2;
  const long mb = (ub - (ub & 1)) / 2;
  LatticeSum s;
  s.count = t.count;
  if (t.runs.empty()) return s;
  // Runs hold consecutive row offsets; rows outside the box contribute 0.
  const long first = t.runs.front().da;
  const long k0 = std::max(0L, -ma - first);
  const long k1 = std::min(static_cast<long>(t.runs.size()), L.rows - ma - first);
  for (long k = k0; k < k1; ++k) {
    const RowRun& r = t.runs[static_cast<std::size_t>(k)];
    s.sum += L.row_sum(ma + r.da, mb + r.lo, mb + r.hi + 1);
  }
  return s;
}

double lattice_radius_sq(const GridFunction& f, double r) {
  return to_lattice(f, Ball{f.origin, r}).radius_sq;
}

}  // namespace fracmax::detail
