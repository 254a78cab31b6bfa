#include "fracmax/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "fracmax/error.hpp"

namespace fracmax {

namespace {

struct BallSum {
  double sum = 0.0;
  long count = 0;
};

BallSum ball_sum(const GridFunction& f, const LatticeBall& b) {
  BallSum out;
  if (f.dim == 1) {
    const auto [lo, hi] = cell_span(b.center[0], b.radius_sq, false);
    for (long i = lo; i <= hi; ++i) out.sum += f.value(i);
    out.count = std::max(0L, hi - lo + 1);
    return out;
  }
  const auto [ilo, ihi] = cell_span(b.center[0], b.radius_sq, false);
  for (long i = ilo; i <= ihi; ++i) {
    const double dx = static_cast<double>(2 * i + 1) - b.center[0];
    const auto [jlo, jhi] = cell_span(b.center[1], b.radius_sq, false, dx * dx);
    if (jhi < jlo) continue;
    out.count += jhi - jlo + 1;
    if (i < 0 || i >= f.shape[0]) continue;
    for (long j = std::max(jlo, 0L); j <= std::min(jhi, f.shape[1] - 1); ++j)
      out.sum += f.values[f.flat(i, j)];
  }
  return out;
}

template <typename Fn>
void for_each_face(const GridFunction& f, Fn&& fn) {
  // fn(axis, boundary index along axis, transverse cell index, low value, high value)
  const long n0 = f.shape[0];
  const long n1 = f.shape[1];
  for (long k = 0; k <= n0; ++k)
    for (long j = 0; j < n1; ++j) fn(0, k, j, f.value(k - 1, j), f.value(k, j));
  if (f.dim == 2) {
    for (long i = 0; i < n0; ++i)
      for (long k = 0; k <= n1; ++k) fn(1, k, i, f.value(i, k - 1), f.value(i, k));
  }
}

bool face_in_window(long k, long transverse, int axis, const CellBox& w, WindowMode mode,
                    int dim) {
  const int other = 1 - axis;
  const bool along = mode == WindowMode::Closed ? (k >= w.lo[axis] && k <= w.hi[axis])
                                                 : (k > w.lo[axis] && k < w.hi[axis]);
  if (!along) return false;
  if (dim == 1) return true;
  return transverse >= w.lo[other] && transverse < w.hi[other];
}

}  // namespace

double ball_average(const GridFunction& f, const Ball& b) {
  const BallSum s = ball_sum(f, to_lattice(f, b));
  if (s.count == 0) throw Error(ErrorCode::EmptyBall, "no cell center inside the ball");
  return s.sum / static_cast<double>(s.count);
}

long ball_cell_count(const GridFunction& f, const Ball& b) {
  return ball_sum(f, to_lattice(f, b)).count;
}

double cube_average(const GridFunction& f, const DyadicCube& q) {
  const double h = f.spacing;
  const double side = cube_side(q);
  const double cells_per_side = side / h;
  if (cells_per_side < 1.0 || cells_per_side != std::floor(cells_per_side))
    throw Error(ErrorCode::MisalignedCube, "cube side is not a multiple of the spacing");
  const long m = static_cast<long>(cells_per_side);
  Index lo{0, 0};
  for (int a = 0; a < f.dim; ++a) {
    const double u = (cube_lower(q, a) - f.origin[a]) / h;
    if (u != std::floor(u))
      throw Error(ErrorCode::MisalignedCube, "cube corner is not on the cell lattice");
    lo[a] = static_cast<long>(u);
  }
  double sum = 0.0;
  if (f.dim == 1) {
    for (long i = std::max(lo[0], 0L); i < std::min(lo[0] + m, f.shape[0]); ++i)
      sum += f.values[f.flat(i)];
    return sum / static_cast<double>(m);
  }
  for (long i = std::max(lo[0], 0L); i < std::min(lo[0] + m, f.shape[0]); ++i)
    for (long j = std::max(lo[1], 0L); j < std::min(lo[1] + m, f.shape[1]); ++j)
      sum += f.values[f.flat(i, j)];
  return sum / (static_cast<double>(m) * static_cast<double>(m));
}

double box_average(const GridFunction& f, const Vec& lo, double side) {
  const double h = f.spacing;
  std::array<std::vector<std::pair<long, double>>, 2> weights;
  for (int a = 0; a < f.dim; ++a) {
    const double a0 = lo[a];
    const double a1 = lo[a] + side;
    const long first = std::max(0L, static_cast<long>(std::floor((a0 - f.origin[a]) / h)));
    const long last = std::min(f.shape[a] - 1, static_cast<long>(std::ceil((a1 - f.origin[a]) / h)));
    for (long i = first; i <= last; ++i) {
      const double c0 = f.origin[a] + static_cast<double>(i) * h;
      const double w = std::min(a1, c0 + h) - std::max(a0, c0);
      if (w > 0.0) weights[a].emplace_back(i, w);
    }
  }
  double integral = 0.0;
  if (f.dim == 1) {
    for (const auto& [i, w] : weights[0]) integral += w * f.values[f.flat(i)];
    return integral / side;
  }
  for (const auto& [i, wi] : weights[0]) {
    double row = 0.0;
    for (const auto& [j, wj] : weights[1]) row += wj * f.values[f.flat(i, j)];
    integral += wi * row;
  }
  return integral / (side * side);
}

LevelSet superlevel(const GridFunction& f, double lambda) {
  LevelSet e;
  e.threshold = lambda;
  e.dim = f.dim;
  e.shape = f.shape;
  e.spacing = f.spacing;
  e.mask.resize(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) e.mask[k] = f.values[k] > lambda ? 1 : 0;
  return e;
}

double perimeter(const LevelSet& e, const std::optional<CellBox>& window, WindowMode mode) {
  long faces = 0;
  const long n0 = e.shape[0];
  const long n1 = e.shape[1];
  auto count = [&](int axis, long k, long t, bool a, bool b) {
    if (a == b) return;
    if (window && !face_in_window(k, t, axis, *window, mode, e.dim)) return;
    ++faces;
  };
  for (long k = 0; k <= n0; ++k)
    for (long j = 0; j < n1; ++j) count(0, k, j, e.contains(k - 1, j), e.contains(k, j));
  if (e.dim == 2) {
    for (long i = 0; i < n0; ++i)
      for (long k = 0; k <= n1; ++k) count(1, k, i, e.contains(i, k - 1), e.contains(i, k));
  }
  const double face_area = e.dim == 1 ? 1.0 : e.spacing;
  return static_cast<double>(faces) * face_area;
}

double variation(const GridFunction& f, double p) {
  const double h = f.spacing;
  if (p == 1.0) {
    double s = 0.0;
    for_each_face(f, [&](int, long, long, double a, double b) { s += std::abs(a - b); });
    return s * (f.dim == 1 ? 1.0 : h);
  }
  const bool sup = std::isinf(p);
  double acc = 0.0;
  const long jmin = f.dim == 2 ? -1 : 0;
  for (long i = -1; i < f.shape[0]; ++i) {
    for (long j = jmin; j < f.shape[1]; ++j) {
      const double v = f.value(i, j);
      const double g0 = (f.value(i + 1, j) - v) / h;
      double g2 = g0 * g0;
      if (f.dim == 2) {
        const double g1 = (f.value(i, j + 1) - v) / h;
        g2 += g1 * g1;
      }
      const double g = std::sqrt(g2);
      if (sup) acc = std::max(acc, g);
      else if (g > 0.0) acc += std::pow(g, p);
    }
  }
  if (sup) return acc;
  return std::pow(acc * f.cell_volume(), 1.0 / p);
}

LevelPerimeters level_perimeters(const GridFunction& f) {
  LevelPerimeters out;
  out.levels = f.values;
  out.levels.push_back(0.0);
  std::sort(out.levels.begin(), out.levels.end());
  out.levels.erase(std::unique(out.levels.begin(), out.levels.end()), out.levels.end());
  std::vector<long> diff(out.levels.size() + 1, 0);
  auto rank = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(out.levels.begin(), out.levels.end(), v) -
                                    out.levels.begin());
  };
  for_each_face(f, [&](int, long, long, double a, double b) {
    if (a == b) return;
    // the face separates {f > lambda} from its complement for lambda in [min, max)
    diff[rank(std::min(a, b))] += 1;
    diff[rank(std::max(a, b))] -= 1;
  });
  out.face_counts.resize(out.levels.size());
  long running = 0;
  for (std::size_t k = 0; k < out.levels.size(); ++k) {
    running += diff[k];
    out.face_counts[k] = running;
  }
  return out;
}

CoareaCheck coarea_identity_check(const GridFunction& f, double lambda0, double lambda1) {
  auto clamp = [&](double v) { return std::min(std::max(v, lambda0), lambda1); };
  double lhs = 0.0;
  for_each_face(f, [&](int, long, long, double a, double b) { lhs += std::abs(clamp(a) - clamp(b)); });
  const double face_area = f.dim == 1 ? 1.0 : f.spacing;
  lhs *= face_area;

  const LevelPerimeters lp = level_perimeters(f);
  double rhs = 0.0;
  for (std::size_t k = 0; k < lp.levels.size(); ++k) {
    if (lp.face_counts[k] == 0) continue;
    const double a = std::max(lp.levels[k], lambda0);
    const double b = std::min(k + 1 < lp.levels.size() ? lp.levels[k + 1] : kInfinity, lambda1);
    if (b > a) rhs += static_cast<double>(lp.face_counts[k]) * face_area * (b - a);
  }
  return {lhs, rhs, std::abs(lhs - rhs)};
}

IsoperimetricResult isoperimetric_ratio(const LevelSet& e, const CellBox& q) {
  long inside = 0;
  long total = 1;
  for (int a = 0; a < e.dim; ++a) total *= std::max(0L, q.hi[a] - q.lo[a]);
  const long jlo = e.dim == 2 ? q.lo[1] : 0;
  const long jhi = e.dim == 2 ? q.hi[1] : 1;
  for (long i = q.lo[0]; i < q.hi[0]; ++i)
    for (long j = jlo; j < jhi; ++j)
      if (e.contains(i, j)) ++inside;
  const double cell = e.dim == 1 ? e.spacing : e.spacing * e.spacing;
  const double m = static_cast<double>(std::min(inside, total - inside)) * cell;
  const double per = perimeter(e, q, WindowMode::Open);
  if (m == 0.0) return {0.0, false};
  if (per == 0.0) return {0.0, true};
  const double num = e.dim == 1 ? 1.0 : m;
  return {num / std::pow(per, e.dim), false};
}

}  // namespace fracmax
