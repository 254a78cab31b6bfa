#include "fracmax/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "fracmax/error.hpp"
#include "fracmax/geometry.hpp"
#include "fracmax/parallel.hpp"

namespace fracmax {

namespace {

double distance(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

using CubeKey = std::tuple<int, long, long>;

CubeKey key_of(const DyadicCube& q) { return {q.level, q.index[0], q.index[1]}; }

// Exactly one of a, b is at least `factor` times the other.
bool ratio_excluded(double a, double b, double factor) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi >= factor * lo;
}

}  // namespace

SelectionParams SelectionParams::defaults(const GridFunction& f, double alpha, double beta) {
  SelectionParams p;
  p.c1 = 2.0;
  p.c2 = std::exp2(f.dim);
  const double scale = f.max_value() * std::pow(f.spacing, alpha + beta);
  p.eps = std::exp2(-20.0) * (scale > 0.0 ? scale : 1.0);
  return p;
}

void SelectionParams::validate() const {
  if (!(c1 >= 2.0) || !(c2 >= 1.0) || !(eps > 0.0) || !std::isfinite(c1) || !std::isfinite(c2) ||
      !std::isfinite(eps))
    throw Error(ErrorCode::InvalidParamRange, "need c1 >= 2, c2 >= 1, eps > 0");
}

double SelectionParams::c3(int dim, double alpha, double beta) const {
  const double five = 5.0 * c1;
  if (beta >= 0.0) return std::pow(five, alpha + beta) * c2;
  return std::pow(five, alpha + beta - dim * beta / alpha) * std::pow(c2, 1.0 + beta / alpha);
}

double SelectionParams::sandwich_lower(int dim, double alpha) const {
  return std::pow(5.0 * c1, 1.0 - dim / alpha) * std::pow(c2, 1.0 / alpha);
}

double SelectionParams::sandwich_lower_derived(int dim, double alpha) const {
  return std::pow(5.0 * c1, 1.0 - dim / alpha) * std::pow(c2, -1.0 / alpha);
}

const char* to_string(PairLabel l) {
  switch (l) {
    case PairLabel::Disjoint: return "disjoint";
    case PairLabel::RatioExcluded: return "ratio_excluded";
    case PairLabel::Violation: return "violation";
  }
  return "?";
}

GreedySelection greedy_disjoint_balls(const BallFamily& family, const SelectionParams& params, double alpha,
                                      double beta) {
  params.validate();
  const int d = family.dim;
  const auto& balls = family.balls;
  GreedySelection out;
  out.c3 = params.c3(d, alpha, beta);

  for (std::size_t i = 0; i < balls.size(); ++i)
    if (balls[i].value(alpha, beta) > params.eps && balls[i].average > 0.0) out.active.push_back(i);
  if (out.active.empty()) return out;

  for (std::size_t i : out.active) out.K = std::max(out.K, balls[i].radius);

  auto layer_of = [&](double r) {
    int n = 0;
    while (r <= std::ldexp(out.K, -n - 1)) ++n;
    return n;
  };
  std::map<int, std::vector<std::size_t>> layers;
  for (std::size_t i : out.active) layers[layer_of(balls[i].radius)].push_back(i);

  // B lies in the closure set of A: A inside B(x_B, 5c1 r_A) and f_B <= c2 f_A.
  auto captured = [&](std::size_t b, std::size_t a) {
    const FamilyBall& B = balls[b];
    const FamilyBall& A = balls[a];
    return distance(A.center, B.center, d) + A.radius <= 5.0 * params.c1 * A.radius &&
           B.average <= params.c2 * A.average;
  };
  auto dilations_disjoint = [&](std::size_t a, std::size_t b) {
    return distance(balls[a].center, balls[b].center, d) >= params.c1 * (balls[a].radius + balls[b].radius);
  };

  std::vector<std::pair<int, std::vector<std::size_t>>> picks_by_layer;
  for (auto& [n, members] : layers) {
    std::vector<std::size_t> cand;
    for (std::size_t b : members) {
      bool in_closure = false;
      for (const auto& [m, picks] : picks_by_layer) {
        for (std::size_t a : picks)
          if (captured(b, a)) {
            in_closure = true;
            break;
          }
        if (in_closure) break;
      }
      if (!in_closure) cand.push_back(b);
    }
    std::sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
      const FamilyBall& X = balls[x];
      const FamilyBall& Y = balls[y];
      if (X.average != Y.average) return X.average > Y.average;
      if (X.center_u != Y.center_u) return X.center_u < Y.center_u;
      return X.radius_index > Y.radius_index;
    });
    std::vector<std::size_t> picks;
    for (std::size_t b : cand) {
      bool ok = true;
      for (std::size_t a : picks)
        if (!dilations_disjoint(a, b)) {
          ok = false;
          break;
        }
      if (ok) picks.push_back(b);
    }
    for (std::size_t a : picks) {
      out.selected.push_back(a);
      out.selected_layer.push_back(n);
    }
    picks_by_layer.emplace_back(n, std::move(picks));
  }

  const auto& S = out.selected;
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = i + 1; j < S.size(); ++j) {
      PairRecord p{S[i], S[j], PairLabel::Violation};
      if (dilations_disjoint(S[i], S[j]))
        p.label = PairLabel::Disjoint;
      else if (balls[S[i]].average >= params.c2 * balls[S[j]].average ||
               balls[S[j]].average >= params.c2 * balls[S[i]].average)
        p.label = PairLabel::RatioExcluded;
      if (p.label == PairLabel::Violation) ++out.pair_violations;
      out.pairs.push_back(p);
    }

  const double lo = params.sandwich_lower(d, alpha);
  const double lo_derived = params.sandwich_lower_derived(d, alpha);
  const double hi = params.sandwich_upper();
  const double slack = 1e-12;
  out.cover.resize(out.active.size());
  parallel_for(static_cast<long>(out.active.size()), [&](long begin, long end) {
    for (long k = begin; k < end; ++k) {
      CoverRecord rec;
      rec.ball = out.active[static_cast<std::size_t>(k)];
      for (const auto& [n, picks] : picks_by_layer) {
        for (std::size_t a : picks)
          if (captured(rec.ball, a)) {
            rec.witness = static_cast<long>(a);
            rec.layer = n;
            break;
          }
        if (rec.witness >= 0) break;
      }
      if (rec.witness >= 0) {
        const FamilyBall& B = balls[rec.ball];
        const FamilyBall& A = balls[static_cast<std::size_t>(rec.witness)];
        rec.radius_ratio = B.radius / A.radius;
        rec.sandwich_ok = rec.radius_ratio >= lo * (1.0 - slack) && rec.radius_ratio <= hi * (1.0 + slack);
        rec.sandwich_derived_ok =
            rec.radius_ratio >= lo_derived * (1.0 - slack) && rec.radius_ratio <= hi * (1.0 + slack);
        rec.value_ratio = B.value(alpha, beta) / (out.c3 * A.value(alpha, beta));
        rec.value_ok = rec.value_ratio <= 1.0 + slack;
      }
      out.cover[static_cast<std::size_t>(k)] = rec;
    }
  });
  for (const auto& rec : out.cover) {
    if (rec.witness < 0) {
      ++out.uncovered;
      continue;
    }
    if (!rec.sandwich_ok) ++out.sandwich_violations;
    if (!rec.sandwich_derived_ok) ++out.sandwich_derived_violations;
    if (!rec.value_ok) ++out.value_violations;
  }
  return out;
}

const char* to_string(RepresentativeMode m) {
  switch (m) {
    case RepresentativeMode::Literal: return "literal";
    case RepresentativeMode::Cumulative: return "cumulative";
    case RepresentativeMode::Screened: return "screened";
  }
  return "?";
}

RepresentativeMode parse_representative_mode(const std::string& s) {
  if (s == "literal") return RepresentativeMode::Literal;
  if (s == "cumulative") return RepresentativeMode::Cumulative;
  if (s == "screened") return RepresentativeMode::Screened;
  throw Error(ErrorCode::InvalidParamRange, "unknown representative mode: " + s);
}

RepresentativeSelection disjoint_cube_representatives(const std::vector<CubeStats>& q_alpha, int dim, double eps,
                                                      double alpha, RepresentativeMode mode) {
  (void)alpha;
  RepresentativeSelection out;
  out.mode = mode;
  const double factor = std::exp2(dim);

  std::vector<CubeStats> active;
  for (const auto& s : q_alpha)
    if (s.cube.shift_id == 0 && s.value_alpha > eps) active.push_back(s);
  out.active = static_cast<long>(active.size());
  if (active.empty()) return out;

  int top = active.front().cube.level;
  for (const auto& s : active) top = std::max(top, s.cube.level);

  auto maximal = [&](const std::vector<std::size_t>& idx) {
    std::set<CubeKey> keys;
    for (std::size_t i : idx) keys.insert(key_of(active[i].cube));
    std::vector<std::size_t> res;
    for (std::size_t i : idx) {
      DyadicCube q = active[i].cube;
      bool covered = false;
      while (q.level < top) {
        q = parent(q, dim);
        if (keys.count(key_of(q))) {
          covered = true;
          break;
        }
      }
      if (!covered) res.push_back(i);
    }
    return res;
  };

  std::vector<std::size_t> all(active.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::size_t> gen = maximal(all);
  std::vector<std::size_t> pool;  // P consulted for the next generation
  std::set<std::size_t> chosen;
  int g = 0;
  auto conflicts = [&](std::size_t i) {
    const DyadicCube pi = parent(active[i].cube, dim);
    for (std::size_t j : chosen) {
      const DyadicCube pj = parent(active[j].cube, dim);
      if (pi == pj || !cubes_intersect(pi, pj, dim) || ratio_excluded(active[i].f_q, active[j].f_q, factor)) continue;
      return true;
    }
    return false;
  };
  while (!gen.empty()) {
    if (mode == RepresentativeMode::Screened)
      std::stable_sort(gen.begin(), gen.end(),
                       [&](std::size_t a, std::size_t b) { return active[a].cube.level > active[b].cube.level; });
    bool fresh = false;
    std::vector<std::size_t> admitted;
    for (std::size_t i : gen) {
      if (chosen.count(i)) continue;
      if (mode == RepresentativeMode::Screened && conflicts(i)) {
        ++out.screened;
        continue;
      }
      chosen.insert(i);
      admitted.push_back(i);
      fresh = true;
      out.selected.push_back(active[i]);
      out.generation.push_back(g);
    }
    if (!fresh) break;
    if (mode == RepresentativeMode::Screened) gen = admitted;
    if (mode != RepresentativeMode::Literal)
      pool.insert(pool.end(), gen.begin(), gen.end());
    else
      pool = gen;
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (chosen.count(i)) continue;
      double sup = -1.0;
      for (std::size_t p : pool)
        if (cube_contains(parent(active[p].cube, dim), active[i].cube, dim)) sup = std::max(sup, active[p].f_q);
      if (sup >= 0.0 && active[i].f_q > factor * sup) cand.push_back(i);
    }
    gen = maximal(cand);
    ++g;
  }

  for (const auto& q : active) {
    bool ok = false;
    for (const auto& p : out.selected)
      if (cube_contains(parent(p.cube, dim), q.cube, dim) && q.f_q <= factor * p.f_q) {
        ok = true;
        break;
      }
    if (!ok) ++out.uncovered;
  }
  const auto& S = out.selected;
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = i + 1; j < S.size(); ++j) {
      ++out.pair_checks;
      const DyadicCube pi = parent(S[i].cube, dim);
      const DyadicCube pj = parent(S[j].cube, dim);
      if (pi == pj || !cubes_intersect(pi, pj, dim) || ratio_excluded(S[i].f_q, S[j].f_q, factor)) continue;
      ++out.trichotomy_violations;
    }

  std::map<CubeKey, std::size_t> best;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const CubeKey k = key_of(parent(S[i].cube, dim));
    auto it = best.find(k);
    if (it == best.end() || S[i].f_q > S[it->second].f_q) best[k] = i;
  }
  std::vector<std::size_t> hat_idx;
  for (const auto& [k, i] : best) hat_idx.push_back(i);
  std::sort(hat_idx.begin(), hat_idx.end());
  for (std::size_t i : hat_idx) out.hat.push_back(S[i]);
  return out;
}

HypothesisReport disjoint_family_hypothesis_check(const std::vector<CubeWithAncestor>& family, double eps, int dim) {
  HypothesisReport rep;
  const double factor = std::exp2(eps);
  auto describe = [](const DyadicCube& q) {
    std::ostringstream os;
    os << "(shift " << q.shift_id << ", level " << q.level << ", index " << q.index[0] << "," << q.index[1] << ")";
    return os.str();
  };
  for (const auto& e : family) {
    const auto& q = e.cube;
    const auto& p = e.ancestor;
    const bool strict = p.cube.shift_id == q.cube.shift_id && p.cube.level > q.cube.level &&
                        cube_contains(p.cube, q.cube, dim);
    const bool side = cube_side(p.cube) <= cube_side(q.cube) / eps;
    const bool gain = q.f_q > factor * p.f_q;
    if (!(strict && side && gain)) {
      ++rep.ancestor_violations;
      rep.messages.push_back("ancestor condition fails for " + describe(q.cube));
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const auto& a = family[i];
      const auto& b = family[j];
      if (a.ancestor.cube.shift_id != b.ancestor.cube.shift_id) continue;
      if (!cubes_intersect(a.ancestor.cube, b.ancestor.cube, dim)) continue;
      ++rep.pair_checks;
      if (!ratio_excluded(a.cube.f_q, b.cube.f_q, factor)) {
        ++rep.pair_violations;
        rep.messages.push_back("value ratio inside window for " + describe(a.cube.cube) + " and " +
                               describe(b.cube.cube));
      }
    }
  rep.ok = rep.ancestor_violations == 0 && rep.pair_violations == 0;
  return rep;
}

BallCube cube_for_ball(const Ball& b, int dim) {
  if (!(b.radius > 0.0) || !std::isfinite(b.radius))
    throw Error(ErrorCode::OutOfRange, "ball radius must be positive and finite");
  for (int k = 0; k < dim; ++k)
    if (!std::isfinite(b.center[k]) || std::fabs(b.center[k]) > 0x1p40 * std::max(1.0, b.radius))
      throw Error(ErrorCode::OutOfRange, "ball center outside the shifted-grid range");
  int start = static_cast<int>(std::ceil(std::log2(2.0 * b.radius))) - 1;
  while (std::ldexp(1.0, start) < 2.0 * b.radius) ++start;
  Vec lo{0.0, 0.0};
  for (int k = 0; k < dim; ++k) lo[k] = b.center[k] - b.radius;
  for (int level = start; level <= start + 8; ++level)
    for (int s = 0; s < grid_count(dim); ++s) {
      const DyadicCube q = cube_containing(s, level, lo, dim);
      bool fits = true;
      for (int k = 0; k < dim; ++k)
        if (cube_upper(q, k) < b.center[k] + b.radius) fits = false;
      if (!fits) continue;
      const double ratio = cube_side(q) / b.radius;
      if (ratio > kGridConstant) throw Error(ErrorCode::OutOfRange, "grid certificate exceeded");
      return {q, ratio};
    }
  throw Error(ErrorCode::OutOfRange, "no shifted cube contains the ball");
}

TransferWindows TransferWindows::derive(int dim, double alpha, double allowance) {
  TransferWindows w;
  const double sigma = unit_ball_volume(dim);
  const double c = std::pow(kGridConstant, dim);
  w.allowance = allowance;
  w.average_lo = sigma / c / allowance;
  w.average_hi = sigma * std::pow(dim, 0.5 * dim) * allowance;
  w.side_lo = 2.0;
  w.side_hi = kGridConstant;
  w.ancestor_hi = std::pow(dim, 0.5 * (dim - alpha)) * c * std::exp2(-alpha) * allowance;
  return w;
}

TransferReport transfer_audit(const GridFunction& f, const BallFamily& family, std::size_t index, double alpha,
                              const TransferWindows& windows) {
  if (index >= family.balls.size()) throw Error(ErrorCode::NotWitness, "ball is not in the family");
  const FamilyBall& fb = family.balls[index];
  TransferReport rep;
  if (!(fb.average > 0.0)) {
    rep.skipped = true;
    rep.ok = true;
    return rep;
  }
  const int d = f.dim;
  const BallCube bc = cube_for_ball(fb.ball(), d);
  rep.cube = bc.cube;
  rep.side_ratio = bc.side_ratio;
  auto lower = [&](const DyadicCube& q) {
    Vec v{0.0, 0.0};
    for (int k = 0; k < d; ++k) v[k] = cube_lower(q, k);
    return v;
  };
  const double f_qb = box_average(f, lower(bc.cube), cube_side(bc.cube));
  rep.average_ratio = f_qb / fb.average;
  const double base = side_pow(bc.cube.level, alpha) * f_qb;

  DyadicCube p = bc.cube;
  for (int guard = 0; guard < 64; ++guard) {
    bool holds_box = true;
    for (int k = 0; k < d; ++k) {
      const double b0 = f.origin[k];
      const double b1 = f.origin[k] + static_cast<double>(f.shape[k]) * f.spacing;
      if (cube_lower(p, k) > b0 || cube_upper(p, k) < b1) holds_box = false;
    }
    if (holds_box && p.level > bc.cube.level) break;
    p = parent(p, d);
    const double v = side_pow(p.level, alpha) * box_average(f, lower(p), cube_side(p));
    rep.max_ancestor_ratio = std::max(rep.max_ancestor_ratio, v / base);
    ++rep.ancestors;
  }
  rep.ok = rep.average_ratio >= windows.average_lo && rep.average_ratio <= windows.average_hi &&
           rep.side_ratio >= windows.side_lo && rep.side_ratio <= windows.side_hi &&
           rep.max_ancestor_ratio <= windows.ancestor_hi;
  return rep;
}

}  // namespace fracmax
