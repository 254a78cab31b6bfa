#include "fracmax/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "fracmax/error.hpp"
#include "fracmax/geometry.hpp"
#include "json.hpp"

namespace fracmax {

namespace {

constexpr int kWideShift = 62;

// Dyadic index of global cell g at s levels above the cell level.
long coarsen(long g, int s) {
  if (s >= kWideShift) return g < 0 ? -1 : 0;
  return floor_div(g, 1L << s);
}

// Box cells [lo, hi) on one axis covered by index k at s levels above the cells.
std::pair<long, long> axis_cells(long k, int s, long org, long n) {
  long lo = 0;
  long hi = n;
  if (s >= kWideShift) {
    if (k == 0) lo = std::clamp(-org, 0L, n);
    else hi = std::clamp(-org, 0L, n);
  } else {
    lo = std::clamp(k * (1L << s) - org, 0L, n);
    hi = std::clamp((k + 1) * (1L << s) - org, 0L, n);
  }
  return {lo, std::max(lo, hi)};
}

double kth_largest(std::vector<double> v, double m, double rho) {
  const double k = std::ceil(rho * m);
  if (k > static_cast<double>(v.size()) || v.empty()) return 0.0;
  const auto idx = static_cast<std::ptrdiff_t>(k) - 1;
  std::nth_element(v.begin(), v.begin() + idx, v.end(), std::greater<>());
  return v[static_cast<std::size_t>(idx)];
}

bool cube_less(const DyadicCube& a, const DyadicCube& b) {
  if (a.shift_id != b.shift_id) return a.shift_id < b.shift_id;
  if (a.level != b.level) return a.level > b.level;
  return a.index < b.index;
}

}  // namespace

double lambda_density(LambdaMode mode, int dim) {
  return mode == LambdaMode::Half ? 0.5 : std::exp2(-dim - 2.0);
}

DyadicTower::DyadicTower(const GridFunction& f, double alpha, int tail_levels) : f_(f), alpha_(alpha) {
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(f.dim)))
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in [0, d)");
  int e = 0;
  const double mant = std::frexp(f.spacing, &e);
  if (mant != 0.5) throw Error(ErrorCode::MisalignedLevel, "spacing must be a power of two");
  lmin_ = e - 1;
  for (int a = 0; a < f.dim; ++a) {
    const double u = f.origin[a] / f.spacing;
    if (u != std::floor(u)) throw Error(ErrorCode::MisalignedLevel, "origin must lie on the cell lattice");
    org_[a] = static_cast<long>(u);
  }
  Level base;
  base.kmin = {org_[0], f.dim == 2 ? org_[1] : 0};
  base.count = f.shape;
  base.sum = f.values;
  levels_.push_back(std::move(base));

  auto stable = [&](const Level& l) {
    for (int a = 0; a < f.dim; ++a)
      if (!(l.count[a] == 1 || (l.kmin[a] == -1 && l.count[a] == 2))) return false;
    return true;
  };
  auto grow = [&]() {
    const Level& c = levels_.back();
    Level p;
    for (int a = 0; a < 2; ++a) {
      p.kmin[a] = floor_div(c.kmin[a], 2);
      p.count[a] = floor_div(c.kmin[a] + c.count[a] - 1, 2) - p.kmin[a] + 1;
    }
    if (f.dim == 1) {
      p.kmin[1] = 0;
      p.count[1] = 1;
    }
    p.sum.assign(static_cast<std::size_t>(p.count[0] * p.count[1]), 0.0);
    for (long i = 0; i < c.count[0]; ++i)
      for (long j = 0; j < c.count[1]; ++j) {
        const long pi = floor_div(c.kmin[0] + i, 2) - p.kmin[0];
        const long pj = f.dim == 2 ? floor_div(c.kmin[1] + j, 2) - p.kmin[1] : 0;
        p.sum[static_cast<std::size_t>(pi * p.count[1] + pj)] += c.sum[static_cast<std::size_t>(i * c.count[1] + j)];
      }
    levels_.push_back(std::move(p));
  };
  while (!stable(levels_.back())) grow();
  ltop_ = lmin_ + static_cast<int>(levels_.size()) - 1;
  for (int t = 0; t < tail_levels; ++t) grow();

  // Top-down running maxima over ancestors.
  for (int L = level_max(); L >= lmin_; --L) {
    Level& l = levels_[static_cast<std::size_t>(L - lmin_)];
    const std::size_t n = l.sum.size();
    l.anc_a.assign(n, 0.0);
    l.anc_f.assign(n, 0.0);
    l.qa.assign(n, 0);
    l.q0.assign(n, 0);
    const double m = std::exp2(static_cast<double>(L - lmin_) * f.dim);
    for (long i = 0; i < l.count[0]; ++i)
      for (long j = 0; j < l.count[1]; ++j) {
        const std::size_t s = static_cast<std::size_t>(i * l.count[1] + j);
        const Index k{l.kmin[0] + i, l.kmin[1] + j};
        if (L < level_max()) {
          const Level& pl = levels_[static_cast<std::size_t>(L + 1 - lmin_)];
          const Index pk{floor_div(k[0], 2), f.dim == 2 ? floor_div(k[1], 2) : 0};
          const std::size_t ps = slot(pl, pk);
          const double pm = 2.0 * m * (f.dim == 2 ? 2.0 : 1.0);
          const double pf = pl.sum[ps] / pm;
          l.anc_a[s] = std::max(pl.anc_a[ps], side_pow(L + 1, alpha_) * pf);
          l.anc_f[s] = std::max(pl.anc_f[ps], pf);
        }
        const double fq = l.sum[s] / m;
        l.qa[s] = fq > 0.0 && side_pow(L, alpha_) * fq > l.anc_a[s];
        l.q0[s] = fq > 0.0 && fq > l.anc_f[s];
      }
  }
}

std::size_t DyadicTower::slot(const Level& l, const Index& k) const {
  return static_cast<std::size_t>((k[0] - l.kmin[0]) * l.count[1] + (k[1] - l.kmin[1]));
}

bool DyadicTower::has(const DyadicCube& q) const {
  if (q.shift_id != 0 || q.level < lmin_ || q.level > level_max()) return false;
  const Level& l = lvl(q.level);
  for (int a = 0; a < 2; ++a)
    if (q.index[a] < l.kmin[a] || q.index[a] >= l.kmin[a] + l.count[a]) return false;
  return true;
}

DyadicCube DyadicTower::cell_cube(int level, long i, long j) const {
  const int s = level - lmin_;
  DyadicCube q{0, level, {coarsen(org_[0] + i, s), f_.dim == 2 ? coarsen(org_[1] + j, s) : 0}};
  return q;
}

std::vector<DyadicCube> DyadicTower::cubes_at(int level) const {
  std::vector<DyadicCube> out;
  const Level& l = lvl(level);
  for (long i = 0; i < l.count[0]; ++i)
    for (long j = 0; j < l.count[1]; ++j) out.push_back({0, level, {l.kmin[0] + i, l.kmin[1] + j}});
  return out;
}

double DyadicTower::cell_count(const DyadicCube& q) const {
  return std::exp2(static_cast<double>(q.level - lmin_) * f_.dim);
}

double DyadicTower::sum(const DyadicCube& q) const {
  if (!has(q)) throw Error(ErrorCode::OutOfRange, "cube outside the tower");
  const Level& l = lvl(q.level);
  return l.sum[slot(l, q.index)];
}

double DyadicTower::average(const DyadicCube& q) const { return sum(q) / cell_count(q); }

double DyadicTower::value(const DyadicCube& q, double s) const { return side_pow(q.level, s) * average(q); }

bool DyadicTower::in_q_alpha(const DyadicCube& q) const {
  if (!has(q)) return false;
  const Level& l = lvl(q.level);
  return l.qa[slot(l, q.index)] != 0;
}

bool DyadicTower::in_q0(const DyadicCube& q) const {
  if (!has(q)) return false;
  const Level& l = lvl(q.level);
  return l.q0[slot(l, q.index)] != 0;
}

double DyadicTower::ancestor_max_alpha(const DyadicCube& q) const {
  if (!has(q)) throw Error(ErrorCode::OutOfRange, "cube outside the tower");
  const Level& l = lvl(q.level);
  return l.anc_a[slot(l, q.index)];
}

double DyadicTower::ancestor_max_f(const DyadicCube& q) const {
  if (!has(q)) throw Error(ErrorCode::OutOfRange, "cube outside the tower");
  const Level& l = lvl(q.level);
  return l.anc_f[slot(l, q.index)];
}

CellBox DyadicTower::cell_range(const DyadicCube& q) const {
  const int s = q.level - lmin_;
  CellBox b{{0, 0}, {1, 1}};
  for (int a = 0; a < f_.dim; ++a) {
    const auto [lo, hi] = axis_cells(q.index[a], s, org_[a], f_.shape[a]);
    b.lo[a] = lo;
    b.hi[a] = hi;
  }
  return b;
}

std::vector<double> DyadicTower::cell_values(const DyadicCube& q) const {
  const CellBox b = cell_range(q);
  std::vector<double> v;
  for (long i = b.lo[0]; i < b.hi[0]; ++i)
    for (long j = b.lo[1]; j < b.hi[1]; ++j) v.push_back(f_.values[f_.flat(i, j)]);
  return v;
}

CubeStats DyadicTower::stats(const DyadicCube& q) const {
  CubeStats s;
  s.cube = q;
  s.f_q = average(q);
  s.value_alpha = side_pow(q.level, alpha_) * s.f_q;
  s.in_q_alpha = in_q_alpha(q);
  s.in_q0 = in_q0(q);
  s.lambda_qq = lambda_threshold(
      *this, q, [this](const DyadicCube& p) { return in_q_alpha(p); }, LambdaMode::Quarter);
  s.lambda_bar = lambda_threshold(
      *this, q, [this](const DyadicCube& p) { return in_q0(p); }, LambdaMode::Half);
  return s;
}

double lambda_inf_term(const DyadicTower& tower, const DyadicCube& q, double rho) {
  return kth_largest(tower.cell_values(q), tower.cell_count(q), rho);
}

double lambda_threshold(const DyadicTower& tower, const DyadicCube& q,
                        const std::function<bool(const DyadicCube&)>& in_family, LambdaMode mode) {
  const double inf_term = lambda_inf_term(tower, q, lambda_density(mode, tower.dim()));
  double sup_term = 0.0;
  for (DyadicCube p = parent(q, tower.dim()); p.level <= tower.level_max(); p = parent(p, tower.dim()))
    if (in_family(p)) sup_term = std::max(sup_term, tower.average(p));
  return std::min(std::max(inf_term, sup_term), tower.average(q));
}

double lambda_threshold(const DyadicTower& tower, const DyadicCube& q, std::span<const DyadicCube> family,
                        LambdaMode mode) {
  const double inf_term = lambda_inf_term(tower, q, lambda_density(mode, tower.dim()));
  double sup_term = 0.0;
  for (const DyadicCube& p : family)
    if (p.level > q.level && cube_contains(p, q, tower.dim())) sup_term = std::max(sup_term, tower.average(p));
  return std::min(std::max(inf_term, sup_term), tower.average(q));
}

std::vector<CubeStats> enumerate_cubes(const GridFunction& f, int shift_id, int level_min, int level_max,
                                       double alpha) {
  if (shift_id < 0 || shift_id >= grid_count(f.dim))
    throw Error(ErrorCode::InvalidParamRange, "shift id out of range");
  if (std::exp2(static_cast<double>(level_min)) < f.spacing)
    throw Error(ErrorCode::MisalignedLevel, "cube level finer than the grid");
  std::vector<CubeStats> out;
  if (level_min > level_max) return out;
  std::map<std::pair<int, Index>, std::size_t> where;
  for (int L = level_max; L >= level_min; --L) {
    Index lo{0, 0};
    Index hi{0, 0};
    for (int a = 0; a < f.dim; ++a) {
      Vec p = f.origin;
      lo[a] = cube_containing(shift_id, L, p, f.dim).index[a];
      p[a] = f.origin[a] + static_cast<double>(f.shape[a]) * f.spacing;
      DyadicCube top = cube_containing(shift_id, L, p, f.dim);
      if (cube_lower(top, a) >= p[a]) top.index[a] -= 1;
      hi[a] = top.index[a];
    }
    for (long i = lo[0]; i <= hi[0]; ++i)
      for (long j = lo[1]; j <= hi[1]; ++j) {
        CubeStats s;
        s.cube = {shift_id, L, {i, j}};
        if (shift_id == 0) {
          try {
            s.f_q = cube_average(f, s.cube);
          } catch (const Error&) {
            throw Error(ErrorCode::MisalignedLevel, "cubes do not align with the cells");
          }
        } else {
          s.f_q = box_average(f, {cube_lower(s.cube, 0), f.dim == 2 ? cube_lower(s.cube, 1) : 0.0},
                              cube_side(s.cube));
        }
        s.value_alpha = side_pow(L, alpha) * s.f_q;
        double anc_a = 0.0;
        double anc_f = 0.0;
        if (L < level_max) {
          const CubeStats& ps = out[where.at({L + 1, parent(s.cube, f.dim).index})];
          anc_a = std::max(ps.value_alpha, ps.lambda_qq);  // lambda fields hold running maxima here
          anc_f = std::max(ps.f_q, ps.lambda_bar);
        }
        s.in_q_alpha = s.f_q > 0.0 && s.value_alpha > anc_a;
        s.in_q0 = s.f_q > 0.0 && s.f_q > anc_f;
        s.lambda_qq = anc_a;
        s.lambda_bar = anc_f;
        where[{L, s.cube.index}] = out.size();
        out.push_back(s);
      }
  }
  // Replace the running maxima by the thresholds.
  const bool standard = shift_id == 0;
  std::vector<CubeStats> res = out;
  for (CubeStats& s : res) {
    if (!standard) {
      s.lambda_qq = std::numeric_limits<double>::quiet_NaN();
      s.lambda_bar = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::vector<double> cells;
    const double h = f.spacing;
    const double side = cube_side(s.cube);
    Index clo{0, 0};
    Index chi{1, 1};
    for (int a = 0; a < f.dim; ++a) {
      clo[a] = std::clamp(static_cast<long>(std::llround((cube_lower(s.cube, a) - f.origin[a]) / h)), 0L, f.shape[a]);
      chi[a] = std::clamp(static_cast<long>(std::llround((cube_upper(s.cube, a) - f.origin[a]) / h)), 0L, f.shape[a]);
    }
    for (long i = clo[0]; i < chi[0]; ++i)
      for (long j = clo[1]; j < chi[1]; ++j) cells.push_back(f.values[f.flat(i, j)]);
    const double m = std::pow(side / h, f.dim);
    double sup_a = 0.0;
    double sup_0 = 0.0;
    DyadicCube p = s.cube;
    while (p.level < level_max) {
      p = parent(p, f.dim);
      const CubeStats& ps = out[where.at({p.level, p.index})];
      if (ps.in_q_alpha) sup_a = std::max(sup_a, ps.f_q);
      if (ps.in_q0) sup_0 = std::max(sup_0, ps.f_q);
    }
    s.lambda_qq = std::min(std::max(kth_largest(cells, m, lambda_density(LambdaMode::Quarter, f.dim)), sup_a), s.f_q);
    s.lambda_bar = std::min(std::max(kth_largest(cells, m, 0.5), sup_0), s.f_q);
  }
  std::sort(res.begin(), res.end(), [](const CubeStats& a, const CubeStats& b) { return cube_less(a.cube, b.cube); });
  return res;
}

DyadicField dyadic_max(const DyadicTower& tower) {
  const GridFunction& f = tower.grid();
  DyadicField out;
  out.grid = f;
  out.alpha = tower.alpha();
  out.witness.assign(f.size(), DyadicCube{});
  out.degenerate_zero = f.max_value() == 0.0;
  for (long i = 0; i < f.shape[0]; ++i)
    for (long j = 0; j < f.shape[1]; ++j) {
      double best = -1.0;
      DyadicCube arg;
      for (int L = tower.level_max(); L >= tower.level_min(); --L) {
        const DyadicCube q = tower.cell_cube(L, i, j);
        const double v = tower.value(q, tower.alpha());
        if (v > best) {
          best = v;
          arg = q;
        }
      }
      out.grid.values[f.flat(i, j)] = best;
      out.witness[f.flat(i, j)] = arg;
    }
  return out;
}

DyadicField dyadic_max(const GridFunction& f, double alpha) { return dyadic_max(DyadicTower(f, alpha)); }

std::vector<CubeStats> q_alpha_extract(const DyadicTower& tower) {
  std::vector<CubeStats> out;
  for (int L = tower.level_max(); L >= tower.level_min(); --L)
    for (const DyadicCube& q : tower.cubes_at(L))
      if (tower.in_q_alpha(q)) out.push_back(tower.stats(q));
  return out;
}

MassSparseResult mass_sparse_check(const DyadicTower& tower, const DyadicCube& q) {
  if (!tower.in_q0(q)) throw Error(ErrorCode::NotInQ0, "cube is not in Q_0");
  for (const auto& [cube, res] : mass_sparse_all(tower))
    if (cube == q) return res;
  throw Error(ErrorCode::NotInQ0, "cube is not in Q_0");
}

std::vector<std::pair<DyadicCube, MassSparseResult>> mass_sparse_all(const DyadicTower& tower) {
  const int d = tower.dim();
  const double hd = tower.grid().cell_volume();
  auto in_q0 = [&](const DyadicCube& p) { return tower.in_q0(p); };
  // below[q]: sum over strict descendants P in Q_0 of the level-band integral.
  std::map<std::pair<int, Index>, double> below;
  std::map<std::pair<int, Index>, double> own;
  for (int L = tower.level_min(); L <= tower.level_max(); ++L) {
    for (const DyadicCube& p : tower.cubes_at(L)) {
      double integral = 0.0;
      if (tower.in_q0(p)) {
        const double fp = tower.average(p);
        const double lb = lambda_threshold(tower, p, in_q0, LambdaMode::Half);
        for (double v : tower.cell_values(p)) integral += std::max(0.0, std::min(v, fp) - lb);
        integral *= hd;
      }
      own[{L, p.index}] = integral;
      if (L < tower.level_max()) {
        const DyadicCube pp = parent(p, d);
        below[{pp.level, pp.index}] += integral + below[{L, p.index}];
      }
    }
  }
  std::vector<std::pair<DyadicCube, MassSparseResult>> out;
  const double c = std::exp2(d + 2.0);
  for (int L = tower.level_max(); L >= tower.level_min(); --L)
    for (const DyadicCube& q : tower.cubes_at(L)) {
      if (!tower.in_q0(q)) continue;
      MassSparseResult r;
      const double fq = tower.average(q);
      const double lam = lambda_threshold(tower, q, std::span<const DyadicCube>{}, LambdaMode::Quarter);
      r.lhs = side_pow(L, d) * (fq - lam);
      r.rhs = c * below[{L, q.index}];
      r.ok = r.lhs <= r.rhs + 1e-9 * std::max({1e-300, r.lhs, r.rhs, side_pow(L, d) * fq});
      out.emplace_back(q, r);
    }
  return out;
}

DyadicAlphaBeta dyadic_max_ab(const GridFunction& f, double alpha, double beta, std::span<const CubeStats> cubes) {
  const double s = alpha + beta;
  if (!(s >= -1.0) || !(s < static_cast<double>(f.dim)))
    throw Error(ErrorCode::BetaOutOfRange, "alpha + beta must lie in [-1, d)");
  DyadicAlphaBeta out;
  out.grid = f;
  std::fill(out.grid.values.begin(), out.grid.values.end(), 0.0);
  out.covered.assign(f.size(), 0);
  out.alpha = alpha;
  out.beta = beta;
  const double h = f.spacing;
  for (const CubeStats& cs : cubes) {
    const double v = side_pow(cs.cube.level, s) * cs.f_q;
    Index lo{0, 0};
    Index hi{1, 1};
    for (int a = 0; a < f.dim; ++a) {
      // cell centers origin + (i + 1/2) h inside the closed cube
      const double l = (cube_lower(cs.cube, a) - f.origin[a]) / h - 0.5;
      const double u = (cube_upper(cs.cube, a) - f.origin[a]) / h - 0.5;
      lo[a] = static_cast<long>(std::max(0.0, std::ceil(l)));
      hi[a] = static_cast<long>(std::min(static_cast<double>(f.shape[a]), std::floor(u) + 1.0));
    }
    for (long i = lo[0]; i < hi[0]; ++i)
      for (long j = lo[1]; j < hi[1]; ++j) {
        const std::size_t c = f.flat(i, j);
        if (!out.covered[c] || v > out.grid.values[c]) out.grid.values[c] = v;
        out.covered[c] = 1;
      }
  }
  return out;
}

void write_cube_dump(std::ostream& os, std::vector<CubeStats> cubes, int dim) {
  std::sort(cubes.begin(), cubes.end(), [](const CubeStats& a, const CubeStats& b) { return cube_less(a.cube, b.cube); });
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  for (const CubeStats& c : cubes) {
    nlohmann::json j;
    j["shift_id"] = c.cube.shift_id;
    j["level"] = c.cube.level;
    j["corner"] = nlohmann::json::array();
    j["corner"].push_back(c.cube.index[0]);
    if (dim == 2) j["corner"].push_back(c.cube.index[1]);
    j["f_Q"] = num(c.f_q);
    j["value_alpha"] = num(c.value_alpha);
    j["in_Q_alpha"] = c.in_q_alpha;
    j["lambda_qq"] = num(c.lambda_qq);
    j["lambda_bar"] = num(c.lambda_bar);
    os << j.dump() << '\n';
  }
}

}  // namespace fracmax
