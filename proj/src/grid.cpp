#include "fracmax/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracmax/error.hpp"

namespace fracmax {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::EmptyBall: return "EmptyBall";
    case ErrorCode::MisalignedCube: return "MisalignedCube";
    case ErrorCode::MisalignedLevel: return "MisalignedLevel";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::EmptyRadiusGrid: return "EmptyRadiusGrid";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::NotInQ0: return "NotInQ0";
    case ErrorCode::NotWitness: return "NotWitness";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ZeroRHS: return "ZeroRHS";
    case ErrorCode::InvalidParamRange: return "InvalidParamRange";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

GridFunction GridFunction::make(int dim, std::span<const long> shape, double spacing,
                                std::span<const double> origin, std::vector<double> values) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidGrid, "dim must be 1 or 2");
  if (static_cast<int>(shape.size()) != dim || static_cast<int>(origin.size()) != dim)
    throw Error(ErrorCode::InvalidGrid, "shape/origin length must equal dim");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw Error(ErrorCode::InvalidGrid, "spacing must be positive");
  GridFunction f;
  f.dim = dim;
  f.spacing = spacing;
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) {
    if (shape[a] < 1) throw Error(ErrorCode::InvalidGrid, "shape entries must be >= 1");
    f.shape[a] = shape[a];
    f.origin[a] = origin[a];
    n *= static_cast<std::size_t>(shape[a]);
  }
  if (values.size() != n)
    throw Error(ErrorCode::InvalidGrid,
                "expected " + std::to_string(n) + " values, got " + std::to_string(values.size()));
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidGrid, "values must be finite and nonnegative");
  }
  f.values = std::move(values);
  return f;
}

GridFunction GridFunction::zeros(int dim, std::span<const long> shape, double spacing,
                                 std::span<const double> origin) {
  std::size_t n = 1;
  for (long s : shape) n *= static_cast<std::size_t>(std::max(s, 1L));
  return make(dim, shape, spacing, origin, std::vector<double>(n, 0.0));
}

double GridFunction::cell_volume() const { return dim == 1 ? spacing : spacing * spacing; }

double GridFunction::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double GridFunction::lp_norm(double p) const {
  if (std::isinf(p)) return max_value();
  double s = 0.0;
  for (double v : values) s += std::pow(v, p);
  return std::pow(s * cell_volume(), 1.0 / p);
}

double GridFunction::box_diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double len = static_cast<double>(shape[a]) * spacing;
    s += len * len;
  }
  return std::sqrt(s);
}

std::size_t LevelSet::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

double unit_ball_volume(int dim) { return dim == 1 ? 2.0 : std::numbers::pi; }

namespace {

double snap(double x) {
  const double r = std::nearbyint(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

LatticeBall to_lattice(const GridFunction& f, const Ball& b) {
  LatticeBall lb;
  const double half = 0.5 * f.spacing;
  for (int a = 0; a < f.dim; ++a) lb.center[a] = snap((b.center[a] - f.origin[a]) / half);
  const double rho = snap(b.radius / half);
  lb.radius_sq = snap(rho * rho);
  return lb;
}

std::pair<long, long> cell_span(double c, double r2, bool closed, double base) {
  auto ok = [&](long i) {
    const double d = static_cast<double>(2 * i + 1) - c;
    return closed ? base + d * d <= r2 : base + d * d < r2;
  };
  if (r2 - base < 0.0 || (!closed && r2 - base == 0.0)) return {1, 0};
  const double s = std::sqrt(r2 - base);
  long lo = static_cast<long>(std::ceil((c - s - 1.0) / 2.0));
  long hi = static_cast<long>(std::floor((c + s - 1.0) / 2.0));
  while (ok(lo - 1)) --lo;
  while (lo <= hi && !ok(lo)) ++lo;
  while (ok(hi + 1)) ++hi;
  while (hi >= lo && !ok(hi)) --hi;
  return {lo, hi};
}

std::pair<long, long> lattice_span(double c, double r2, double base) {
  auto ok = [&](long u) {
    const double d = static_cast<double>(u) - c;
    return base + d * d <= r2;
  };
  if (r2 - base < 0.0) return {1, 0};
  const double s = std::sqrt(r2 - base);
  long lo = static_cast<long>(std::ceil(c - s));
  long hi = static_cast<long>(std::floor(c + s));
  while (ok(lo - 1)) --lo;
  while (lo <= hi && !ok(lo)) ++lo;
  while (ok(hi + 1)) ++hi;
  while (hi >= lo && !ok(hi)) --hi;
  return {lo, hi};
}

}  // namespace fracmax
