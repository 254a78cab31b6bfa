#include "fracmax/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <numbers>

#include "fracmax/error.hpp"
#include "fracmax/parallel.hpp"
#include "lattice_sums.hpp"

namespace fracmax {

using detail::Layout;

const char* to_string(Flavor flavor) {
  return flavor == Flavor::Centered ? "centered" : "uncentered";
}

Flavor parse_flavor(const std::string& s) {
  if (s == "centered") return Flavor::Centered;
  if (s == "uncentered") return Flavor::Uncentered;
  throw Error(ErrorCode::InvalidParamRange, "unknown flavor: " + s);
}

RadiusGrid RadiusGrid::geometric(double h, double max_radius, int steps_per_octave) {
  if (!(h > 0.0) || !(max_radius >= h / 2) || steps_per_octave < 1)
    throw Error(ErrorCode::EmptyRadiusGrid, "radius ladder needs h > 0 and K >= h/2");
  RadiusGrid g;
  const int kmax = static_cast<int>(std::ceil(steps_per_octave * std::log2(2.0 * max_radius / h) - 1e-12));
  for (int k = 0; k <= std::max(kmax, 0); ++k)
    g.radii.push_back(0.5 * h * std::exp2(static_cast<double>(k) / steps_per_octave));
  return g;
}

RadiusGrid RadiusGrid::linear(double h, double max_radius) {
  if (!(h > 0.0) || !(max_radius >= h / 2))
    throw Error(ErrorCode::EmptyRadiusGrid, "radius ladder needs h > 0 and K >= h/2");
  RadiusGrid g;
  const long kmax = static_cast<long>(std::ceil(2.0 * max_radius / h - 1e-12));
  for (long k = 1; k <= kmax; ++k) g.radii.push_back(0.5 * h * static_cast<double>(k));
  return g;
}

double default_radius_bound(const GridFunction& f) { return f.box_diameter() + f.spacing; }

RadiusGrid RadiusGrid::geometric_for(const GridFunction& f, int steps_per_octave) {
  return geometric(f.spacing, default_radius_bound(f), steps_per_octave);
}

RadiusGrid RadiusGrid::linear_for(const GridFunction& f) {
  return linear(f.spacing, default_radius_bound(f));
}

bool better_witness(const Witness& a, const Witness& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.radius_index != b.radius_index) return a.radius_index > b.radius_index;
  return a.center < b.center;
}

Vec lattice_point(const GridFunction& f, const Index& u) {
  Vec c{0.0, 0.0};
  for (int a = 0; a < f.dim; ++a) c[a] = f.origin[a] + 0.5 * f.spacing * static_cast<double>(u[a]);
  return c;
}

Ball MaximalField::witness_ball(std::size_t cell) const {
  const Witness& w = witness.at(cell);
  return {lattice_point(grid, w.center), w.radius};
}

namespace {

void check_inputs(const GridFunction& f, double alpha, const RadiusGrid& radii) {
  if (!(alpha > 0.0) || !(alpha < static_cast<double>(f.dim)))
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, d)");
  if (radii.radii.empty()) throw Error(ErrorCode::EmptyRadiusGrid, "no candidate radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii.radii[k] > 0.0) || (k > 0 && !(radii.radii[k] > radii.radii[k - 1])))
      throw Error(ErrorCode::EmptyRadiusGrid, "radii must be positive and strictly ascending");
  }
}

// Physical lattice index from virtual (row, col) coordinates.
Index to_physical(bool one_d, long ua, long ub) { return one_d ? Index{ub, 0} : Index{ua, ub}; }

void run_centered(const GridFunction& f, const Layout& L, double alpha, const RadiusGrid& radii,
                  MaximalField& out) {
  const long cells = L.rows * L.cols;
  std::vector<detail::DiscTemplate> tpl;
  std::vector<double> pw;
  for (double r : radii.radii) {
    tpl.push_back(detail::open_disc(L.one_d, detail::lattice_radius_sq(f, r), 1, 1));
    pw.push_back(std::pow(r, alpha));
  }
  parallel_for(cells, [&](long begin, long end) {
    for (long c = begin; c < end; ++c) {
      const long a = c / L.cols;
      const long b = c % L.cols;
      const long ua = L.one_d ? 0 : 2 * a + 1;
      const long ub = 2 * b + 1;
      Witness best;
      bool have = false;
      for (std::size_t k = 0; k < tpl.size(); ++k) {
        const auto s = detail::disc_sum(L, tpl[k], ua, ub);
        if (s.count == 0) continue;
        const double avg = s.sum / static_cast<double>(s.count);
        const double v = pw[k] * avg;
        if (!have || v >= best.value) {
          best = {to_physical(L.one_d, ua, ub), static_cast<int>(k), radii.radii[k], avg, v};
          have = true;
        }
      }
      out.witness[static_cast<std::size_t>(c)] = best;
      out.grid.values[static_cast<std::size_t>(c)] = best.value;
    }
  });
}

void run_uncentered(const GridFunction& f, const Layout& L, double alpha, const RadiusGrid& radii,
                    MaximalField& out) {
  const long ur = L.lattice_rows();
  const long uc = L.lattice_cols();
  const long npts = ur * uc;
  int levels = 1;
  while ((1L << levels) <= uc) ++levels;
  std::vector<double> val(static_cast<std::size_t>(npts));
  std::vector<double> avg(static_cast<std::size_t>(npts));
  std::vector<int> table(static_cast<std::size_t>(npts) * static_cast<std::size_t>(levels));
  std::vector<int> log2_floor(static_cast<std::size_t>(uc + 1), 0);
  for (long n = 2; n <= uc; ++n) log2_floor[n] = log2_floor[n / 2] + 1;
  const long cells = L.rows * L.cols;
  std::vector<unsigned char> have(static_cast<std::size_t>(cells), 0);

  auto pick = [&](int x, int y) {
    const double vx = val[static_cast<std::size_t>(x)];
    const double vy = val[static_cast<std::size_t>(y)];
    if (vx != vy) return vx > vy ? x : y;
    return x < y ? x : y;
  };
  auto slot = [&](int level, long p) -> int& {
    return table[static_cast<std::size_t>(level) * static_cast<std::size_t>(npts) + static_cast<std::size_t>(p)];
  };

  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii.radii[k];
    const double r2 = detail::lattice_radius_sq(f, r);
    const double pw = std::pow(r, alpha);
    detail::DiscTemplate tpl[2][2];
    for (int pa = 0; pa < 2; ++pa)
      for (int pb = 0; pb < 2; ++pb) tpl[pa][pb] = detail::open_disc(L.one_d, r2, pa, pb);

    parallel_for(ur, [&](long begin, long end) {
      for (long ua = begin; ua < end; ++ua) {
        for (long ub = 0; ub < uc; ++ub) {
          const long p = ua * uc + ub;
          const auto& t = tpl[L.one_d ? 1 : (ua & 1)][ub & 1];
          const auto s = detail::disc_sum(L, t, ua, ub);
          if (s.count == 0) {
            val[static_cast<std::size_t>(p)] = -kInfinity;
            avg[static_cast<std::size_t>(p)] = 0.0;
          } else {
            const double a = s.sum / static_cast<double>(s.count);
            avg[static_cast<std::size_t>(p)] = a;
            val[static_cast<std::size_t>(p)] = pw * a;
          }
          slot(0, p) = static_cast<int>(p);
        }
        for (int l = 1; l < levels; ++l) {
          const long w = 1L << (l - 1);
          for (long ub = 0; ub + (1L << l) <= uc; ++ub) {
            const long p = ua * uc + ub;
            slot(l, p) = pick(slot(l - 1, p), slot(l - 1, p + w));
          }
        }
      }
    });

    const auto cover = detail::closed_cover(L.one_d, r2);
    parallel_for(cells, [&](long begin, long end) {
      for (long c = begin; c < end; ++c) {
        const long a = c / L.cols;
        const long b = c % L.cols;
        const long ca = L.one_d ? 0 : 2 * a + 1;
        const long cb = 2 * b + 1;
        int best = -1;
        const long first = cover.front().da;
        const long k0 = std::max(0L, -ca - first);
        const long k1 = std::min(static_cast<long>(cover.size()), ur - ca - first);
        for (long k = k0; k < k1; ++k) {
          const auto& run = cover[static_cast<std::size_t>(k)];
          const long ua = ca + run.da;
          const long lo = std::max(0L, cb + run.lo);
          const long hi = std::min(uc - 1, cb + run.hi);
          if (hi < lo) continue;
          const int l = log2_floor[static_cast<std::size_t>(hi - lo + 1)];
          const int q = pick(slot(l, ua * uc + lo), slot(l, ua * uc + hi - (1L << l) + 1));
          if (best < 0 || val[static_cast<std::size_t>(q)] > val[static_cast<std::size_t>(best)]) best = q;
        }
        if (best < 0 || val[static_cast<std::size_t>(best)] == -kInfinity) continue;
        const double v = val[static_cast<std::size_t>(best)];
        Witness& cur = out.witness[static_cast<std::size_t>(c)];
        if (!have[static_cast<std::size_t>(c)] || v >= cur.value) {
          cur = {to_physical(L.one_d, best / uc, best % uc), static_cast<int>(k), r,
                 avg[static_cast<std::size_t>(best)], v};
          have[static_cast<std::size_t>(c)] = 1;
        }
      }
    });
  }
  for (long c = 0; c < cells; ++c) out.grid.values[static_cast<std::size_t>(c)] = out.witness[static_cast<std::size_t>(c)].value;
}

}  // namespace

MaximalField frac_max(const GridFunction& f, double alpha, Flavor flavor, const RadiusGrid& radii) {
  check_inputs(f, alpha, radii);
  MaximalField out;
  out.grid = f;
  out.flavor = flavor;
  out.alpha = alpha;
  out.radii = radii;
  out.witness.assign(f.size(), Witness{});
  out.degenerate_zero = f.max_value() == 0.0;
  const Layout L(f);
  if (flavor == Flavor::Centered)
    run_centered(f, L, alpha, radii, out);
  else
    run_uncentered(f, L, alpha, radii, out);
  return out;
}

double FamilyBall::value(double alpha, double beta) const {
  return std::pow(radius, alpha + beta) * average;
}

BallFamily optimal_balls(const GridFunction& f, const MaximalField& field) {
  BallFamily fam;
  fam.dim = f.dim;
  fam.alpha = field.alpha;
  fam.spacing = f.spacing;
  fam.origin = f.origin;
  fam.degenerate_zero = field.degenerate_zero;
  std::map<std::pair<Index, int>, const Witness*> unique;
  for (const Witness& w : field.witness)
    if (w.radius_index >= 0) unique.emplace(std::make_pair(w.center, w.radius_index), &w);

  const Layout L(f);
  const std::size_t nr = field.radii.size();
  // Templates per (radius, parity), built on first use; tail[k][par] bounds
  // r'^alpha mass / count over every radius index >= k.
  std::vector<std::array<std::optional<detail::DiscTemplate>, 4>> tpl(nr);
  double mass = 0.0;
  for (double v : f.values) mass += v;
  std::vector<std::array<double, 4>> tail(nr + 1, {0.0, 0.0, 0.0, 0.0});
  auto templ = [&](std::size_t k, int par) -> const detail::DiscTemplate& {
    auto& slot = tpl[k][static_cast<std::size_t>(par)];
    if (!slot)
      slot = detail::open_disc(L.one_d, detail::lattice_radius_sq(f, field.radii.radii[k]), par >> 1, par & 1);
    return *slot;
  };
  if (field.flavor == Flavor::Uncentered) {
    for (std::size_t k = nr; k-- > 0;)
      for (int par = 0; par < 4; ++par) {
        if (L.one_d && (par >> 1) == 0) continue;
        const long cnt = templ(k, par).count;
        const double b = cnt > 0 ? std::pow(field.radii.radii[k], field.alpha) * mass / static_cast<double>(cnt)
                                 : kInfinity;
        tail[k][static_cast<std::size_t>(par)] = std::max(b, tail[k + 1][static_cast<std::size_t>(par)]);
      }
  }
  for (const auto& [key, w] : unique) {
    if (field.flavor == Flavor::Uncentered) {
      bool dominated = false;
      const long ua = L.one_d ? 0 : w->center[0];
      const long ub = L.one_d ? w->center[0] : w->center[1];
      const int par = (L.one_d ? 2 : static_cast<int>(ua & 1) << 1) | static_cast<int>(ub & 1);
      for (std::size_t k = static_cast<std::size_t>(w->radius_index) + 1; k < nr && !dominated; ++k) {
        // The bound can exceed the true value by rounding; allow a relative margin.
        if (tail[k][static_cast<std::size_t>(par)] * (1.0 + 1e-12) < w->value) break;
        const double r = field.radii.radii[k];
        const auto s = detail::disc_sum(L, templ(k, par), ua, ub);
        if (s.count > 0 && std::pow(r, field.alpha) * (s.sum / static_cast<double>(s.count)) == w->value)
          dominated = true;
      }
      if (dominated) {
        ++fam.discarded_nonmaximal;
        continue;
      }
    }
    FamilyBall b;
    b.center_u = w->center;
    b.radius_index = w->radius_index;
    b.radius = w->radius;
    b.center = lattice_point(f, w->center);
    b.average = w->average;
    b.value_alpha = w->value;
    fam.balls.push_back(b);
  }
  return fam;
}

AlphaBetaField m_alpha_beta(const GridFunction& f, const BallFamily& family, double beta) {
  const double s = family.alpha + beta;
  if (!(s >= -1.0) || !(s < static_cast<double>(f.dim)))
    throw Error(ErrorCode::BetaOutOfRange, "alpha + beta must lie in [-1, d)");
  AlphaBetaField out;
  out.grid = f;
  std::fill(out.grid.values.begin(), out.grid.values.end(), 0.0);
  out.covered.assign(f.size(), 0);
  out.witness.assign(f.size(), -1);
  out.alpha = family.alpha;
  out.beta = beta;
  for (std::size_t n = 0; n < family.balls.size(); ++n) {
    const FamilyBall& b = family.balls[n];
    const double v = b.value(family.alpha, beta);
    const LatticeBall lb = to_lattice(f, b.ball());
    auto visit = [&](long i, long j) {
      if (!f.in_box(i, j)) return;
      const std::size_t c = f.flat(i, j);
      if (!out.covered[c] || v > out.grid.values[c]) {
        out.grid.values[c] = v;
        out.witness[c] = static_cast<int>(n);
      }
      out.covered[c] = 1;
    };
    const auto [ilo, ihi] = cell_span(lb.center[0], lb.radius_sq, true);
    for (long i = ilo; i <= ihi; ++i) {
      if (f.dim == 1) {
        visit(i, 0);
        continue;
      }
      const double dx = static_cast<double>(2 * i + 1) - lb.center[0];
      const auto [jlo, jhi] = cell_span(lb.center[1], lb.radius_sq, true, dx * dx);
      for (long j = jlo; j <= jhi; ++j) visit(i, j);
    }
  }
  return out;
}

std::vector<double> VectorField::magnitude() const {
  std::vector<double> m(grad.size());
  for (std::size_t c = 0; c < grad.size(); ++c) m[c] = std::hypot(grad[c][0], grad[c][1]);
  return m;
}

VectorField gradient_field(const GridFunction& g) {
  for (int a = 0; a < g.dim; ++a)
    if (g.shape[a] < 3) throw Error(ErrorCode::TooSmall, "gradient needs at least 3 cells per axis");
  VectorField out;
  out.dim = g.dim;
  out.shape = g.shape;
  out.spacing = g.spacing;
  out.grad.assign(g.size(), Vec{0.0, 0.0});
  const double h = g.spacing;
  auto diff = [&](int axis, long i, long j) {
    const long n = g.shape[axis];
    const long t = axis == 0 ? i : j;
    auto at = [&](long s) { return axis == 0 ? g.values[g.flat(s, j)] : g.values[g.flat(i, s)]; };
    if (t == 0) return (at(1) - at(0)) / h;
    if (t == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(t + 1) - at(t - 1)) / (2.0 * h);
  };
  for (long i = 0; i < g.shape[0]; ++i)
    for (long j = 0; j < g.shape[1]; ++j)
      for (int a = 0; a < g.dim; ++a) out.grad[g.flat(i, j)][a] = diff(a, i, j);
  return out;
}

double fd_tolerance(double h, double f_sup) { return 4.0 * std::sqrt(h) * (1.0 + f_sup); }

GradientBoundReport gradient_bound_check(const GridFunction& f, const MaximalField& field) {
  GradientBoundReport rep;
  const VectorField g = gradient_field(field.grid);
  rep.lhs = g.magnitude();
  rep.rhs.resize(rep.lhs.size());
  rep.tolerance = fd_tolerance(f.spacing, f.max_value());
  const double d = static_cast<double>(f.dim);
  for (std::size_t c = 0; c < rep.lhs.size(); ++c) {
    const Witness& w = field.witness[c];
    rep.rhs[c] = (d - field.alpha) * std::pow(w.radius, field.alpha - 1.0) * w.average;
    const double excess = rep.lhs[c] - rep.rhs[c];
    rep.max_excess = std::max(rep.max_excess, excess);
    rep.max_margin = std::max(rep.max_margin, excess - rep.tolerance);
    if (excess > rep.tolerance) ++rep.violations;
  }
  if (field.flavor != Flavor::Uncentered) return rep;
  // Interior clause: cells whose whole difference stencil sits inside the
  // open witness ball.
  for (long i = 0; i < f.shape[0]; ++i) {
    for (long j = 0; j < f.shape[1]; ++j) {
      const std::size_t c = f.flat(i, j);
      const LatticeBall lb = to_lattice(f, field.witness_ball(c));
      bool inside = cell_in_ball(lb, f.dim, i, j);
      for (int a = 0; a < f.dim && inside; ++a)
        for (int s = -1; s <= 1; s += 2)
          if (!cell_in_ball(lb, f.dim, i + (a == 0 ? s : 0), j + (a == 1 ? s : 0))) inside = false;
      if (!inside) continue;
      ++rep.interior_cells;
      if (rep.lhs[c] > rep.tolerance) ++rep.interior_violations;
    }
  }
  return rep;
}

LipschitzReport lipschitz_check(const GridFunction& f, const MaximalField& field, const Ball& test,
                                const Ball& enclosing) {
  const double sup = f.max_value();
  if (sup == 0.0) throw Error(ErrorCode::ZeroFunction, "f vanishes identically");
  double fa = 0.0;
  try {
    fa = ball_average(f, enclosing);
  } catch (const Error&) {
    fa = 0.0;
  }
  if (!(fa > 0.0)) throw Error(ErrorCode::ZeroFunction, "enclosing ball carries no mass");
  const double alpha = field.alpha;
  const double d = static_cast<double>(f.dim);
  LipschitzReport rep;
  rep.r0 = 2.0 * enclosing.radius * std::pow(fa / (std::exp2(d) * sup), 1.0 / alpha);
  rep.constant = std::pow(rep.r0, alpha - d) * variation(f, 1.0) / unit_ball_volume(f.dim);
  const double h = f.spacing;
  rep.allowed = rep.constant * h + fd_tolerance(h, sup) * h;
  const LatticeBall lb = to_lattice(f, test);
  for (long i = 0; i < f.shape[0]; ++i) {
    for (long j = 0; j < f.shape[1]; ++j) {
      if (!cell_in_ball(lb, f.dim, i, j)) continue;
      for (int a = 0; a < f.dim; ++a) {
        const long ni = i + (a == 0 ? 1 : 0);
        const long nj = j + (a == 1 ? 1 : 0);
        if (!f.in_box(ni, nj) || !cell_in_ball(lb, f.dim, ni, nj)) continue;
        rep.max_difference = std::max(
            rep.max_difference, std::abs(field.grid.values[f.flat(ni, nj)] - field.grid.values[f.flat(i, j)]));
      }
    }
  }
  rep.ok = rep.max_difference <= rep.allowed;
  return rep;
}

double alternatives_constant(int dim, double alpha) {
  return std::pow(std::pow(3.0, static_cast<double>(dim) - alpha) * 2.0, 1.0 / alpha);
}

AlternativesResult three_alternatives(const GridFunction& f, const FamilyBall& b, const FamilyBall& a,
                                      double alpha) {
  AlternativesResult res;
  const LatticeBall lb = to_lattice(f, b.ball());
  const LatticeBall la = to_lattice(f, a.ball());
  res.disjoint = true;
  const auto [ilo, ihi] = cell_span(lb.center[0], lb.radius_sq, false);
  for (long i = ilo; i <= ihi && res.disjoint; ++i) {
    if (f.dim == 1) {
      if (cell_in_ball(la, 1, i, 0)) res.disjoint = false;
      continue;
    }
    const double dx = static_cast<double>(2 * i + 1) - lb.center[0];
    const auto [jlo, jhi] = cell_span(lb.center[1], lb.radius_sq, false, dx * dx);
    for (long j = jlo; j <= jhi; ++j)
      if (cell_in_ball(la, 2, i, j)) {
        res.disjoint = false;
        break;
      }
  }
  const double fb = b.average;
  const double fa = a.average;
  res.ranges_disjoint = std::max(fb, fa) / 2.0 >= std::min(fb, fa);
  const double c = alternatives_constant(f.dim, alpha);
  const double ratio = b.radius / a.radius;
  res.radii_comparable = ratio >= 1.0 / c && ratio <= c;
  return res;
}

}  // namespace fracmax
