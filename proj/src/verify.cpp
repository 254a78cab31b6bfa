#include "fracmax/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "fracmax/error.hpp"
#include "fracmax/geometry.hpp"
#include "fracmax/parallel.hpp"

namespace fracmax {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kExponentTol = 1e-12;

VerificationReport base_report(InequalityId id, const GridFunction& f, double alpha, double beta, double p,
                               double p_star) {
  VerificationReport r;
  r.id = id;
  r.dim = f.dim;
  r.alpha = alpha;
  r.beta = beta;
  r.p = p;
  r.p_star = p_star;
  r.h = f.spacing;
  r.cap = kNaN;
  return r;
}

double checked_variation(const GridFunction& f, double p) {
  const double v = variation(f, p);
  if (!(v > 0.0)) throw Error(ErrorCode::ZeroRHS, "variation of f vanishes");
  return v;
}

void finish(VerificationReport& r) {
  r.ratio = r.lhs / r.rhs;
  if (std::isinf(r.p_star)) r.flags.push_back("endpoint");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParamRange, what);
}

bool same(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(a));
}

}  // namespace

const char* to_string(InequalityId id) {
  switch (id) {
    case InequalityId::TheoGoal: return "theo_goal";
    case InequalityId::TheoMfdr: return "theo_mfdr";
    case InequalityId::TheoMfdrDyadic: return "theo_mfdrdyadic";
    case InequalityId::FiniteDyadicLinear: return "finitedyadiclinear";
    case InequalityId::DensityLow: return "densitylow";
    case InequalityId::MassSparse: return "mass_sparse";
    case InequalityId::GradientBound: return "gradient_bound";
    case InequalityId::EndpointSup: return "endpoint_sup";
  }
  return "?";
}

InequalityId parse_inequality(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(InequalityId::EndpointSup); ++k) {
    const auto id = static_cast<InequalityId>(k);
    if (s == to_string(id)) return id;
  }
  throw Error(ErrorCode::InvalidParamRange, "unknown inequality id: " + s);
}

bool is_theorem_level(InequalityId id) {
  return id == InequalityId::TheoGoal || id == InequalityId::TheoMfdr || id == InequalityId::TheoMfdrDyadic ||
         id == InequalityId::FiniteDyadicLinear || id == InequalityId::DensityLow;
}

double sobolev_exponent(int dim, double s, double p) {
  const double inv = (std::isinf(p) ? 0.0 : 1.0 / p) - s / dim;
  if (std::fabs(inv) <= kExponentTol) return std::numeric_limits<double>::infinity();
  return 1.0 / inv;
}

bool at_endpoint(int dim, double s, double p) { return std::isinf(sobolev_exponent(dim, s, p)); }

double grid_norm(std::span<const double> values, double cell_volume, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
  double s = 0.0;
  for (double v : values)
    if (v != 0.0) s += std::pow(std::fabs(v), q);
  return std::pow(s * cell_volume, 1.0 / q);
}

double sequence_norm(std::span<const double> a, double q) { return grid_norm(a, 1.0, q); }

VerificationReport verify_theo_goal(const GridFunction& f, const MaximalField& field, double p) {
  const double alpha = field.alpha;
  const int d = f.dim;
  require(p >= 1.0 && p <= d / alpha + kExponentTol, "theo_goal needs 1 <= p <= d/alpha");
  auto r = base_report(InequalityId::TheoGoal, f, alpha, kNaN, p, sobolev_exponent(d, alpha, p));
  r.rhs = checked_variation(f, p);
  const auto mag = gradient_field(field.grid).magnitude();
  r.lhs = grid_norm(mag, f.cell_volume(), r.p_star);
  r.flags.push_back(to_string(field.flavor));
  finish(r);
  return r;
}

VerificationReport verify_theo_goal(const GridFunction& f, double alpha, double p, Flavor flavor) {
  if (!(variation(f, p) > 0.0)) throw Error(ErrorCode::ZeroRHS, "variation of f vanishes");
  return verify_theo_goal(f, frac_max(f, alpha, flavor, RadiusGrid::linear_for(f)), p);
}

namespace {

void require_mfdr(int d, double alpha, double beta, double p) {
  const double s = 1.0 + alpha + beta;
  require(p >= 1.0 && s >= 0.0 && s <= d / p + kExponentTol, "needs p >= 1 and 0 <= 1+alpha+beta <= d/p");
  require(alpha + beta >= -1.0 && alpha + beta < d, "needs -1 <= alpha+beta < d");
}

}  // namespace

VerificationReport verify_mfdr(const GridFunction& f, const BallFamily& family, double beta, double p) {
  const double alpha = family.alpha;
  const int d = f.dim;
  require_mfdr(d, alpha, beta, p);
  auto r = base_report(InequalityId::TheoMfdr, f, alpha, beta, p, sobolev_exponent(d, 1.0 + alpha + beta, p));
  r.rhs = checked_variation(f, p);
  if (std::isinf(r.p_star)) {
    for (const auto& b : family.balls) r.lhs = std::max(r.lhs, b.value(alpha, beta));
  } else {
    const auto m = m_alpha_beta(f, family, beta);
    r.lhs = grid_norm(m.grid.values, f.cell_volume(), r.p_star);
  }
  finish(r);
  return r;
}

VerificationReport verify_mfdr(const GridFunction& f, double alpha, double beta, double p, Flavor flavor) {
  require_mfdr(f.dim, alpha, beta, p);
  if (!(variation(f, p) > 0.0)) throw Error(ErrorCode::ZeroRHS, "variation of f vanishes");
  const auto field = frac_max(f, alpha, flavor, RadiusGrid::linear_for(f));
  auto r = verify_mfdr(f, optimal_balls(f, field), beta, p);
  r.flags.push_back(to_string(flavor));
  return r;
}

VerificationReport verify_mfdrdyadic(const GridFunction& f, std::span<const CubeStats> q_alpha, double alpha,
                                     double beta, double p) {
  const int d = f.dim;
  require_mfdr(d, alpha, beta, p);
  const double s = 1.0 + alpha + beta;
  auto r = base_report(InequalityId::TheoMfdrDyadic, f, alpha, beta, p, sobolev_exponent(d, s, p));
  r.rhs = checked_variation(f, p);
  const auto m = dyadic_max_ab(f, alpha, beta, q_alpha);
  r.lhs = grid_norm(m.grid.values, f.cell_volume(), r.p_star);

  std::vector<double> chain;
  std::vector<double> linear;
  for (const auto& c : q_alpha) {
    linear.push_back(side_pow(c.cube.level, d / p - 1.0) * c.f_q);
    if (std::isinf(r.p_star))
      chain.push_back(side_pow(c.cube.level, alpha + beta) * c.f_q);
    else  // |Q| (sle^(a+b) f_Q)^p* = (sle^(d/p*) sle^(a+b) f_Q)^p*
      chain.push_back(side_pow(c.cube.level, d / r.p_star + alpha + beta) * c.f_q);
  }
  const double chain_lhs = sequence_norm(chain, r.p_star);
  const double chain_rhs = sequence_norm(linear, p);
  r.extras["chain_lhs"] = chain_lhs;
  r.extras["chain_rhs"] = chain_rhs;
  const double tol = 1e-12;
  if (r.lhs > chain_lhs * (1.0 + tol) || chain_lhs > chain_rhs * (1.0 + tol)) {
    r.flags.push_back("chain_violation");
    r.pass = false;
  }
  finish(r);
  return r;
}

VerificationReport verify_mfdrdyadic(const GridFunction& f, double alpha, double beta, double p) {
  require_mfdr(f.dim, alpha, beta, p);
  if (!(variation(f, p) > 0.0)) throw Error(ErrorCode::ZeroRHS, "variation of f vanishes");
  const DyadicTower t(f, alpha);
  const auto q = q_alpha_extract(t);
  return verify_mfdrdyadic(f, q, alpha, beta, p);
}

VerificationReport verify_finitedyadiclinear(const GridFunction& f, std::span<const CubeStats> q_alpha, double alpha,
                                             double p) {
  const int d = f.dim;
  require(alpha > 0.0 && alpha < d, "finitedyadiclinear needs 0 < alpha < d");
  require(p >= 1.0, "finitedyadiclinear needs p >= 1");
  const double e = std::isinf(p) ? -1.0 : d / p - 1.0;
  auto r = base_report(InequalityId::FiniteDyadicLinear, f, alpha, kNaN, p, p);
  r.rhs = checked_variation(f, p);
  std::vector<double> a;
  a.reserve(q_alpha.size());
  for (const auto& c : q_alpha) a.push_back(side_pow(c.cube.level, e) * c.f_q);
  r.lhs = sequence_norm(a, p);
  r.ratio = r.lhs / r.rhs;
  if (std::isinf(p)) r.flags.push_back("endpoint");
  return r;
}

VerificationReport verify_finitedyadiclinear(const GridFunction& f, double alpha, double p) {
  require(alpha > 0.0 && alpha < f.dim, "finitedyadiclinear needs 0 < alpha < d");
  if (!(variation(f, p) > 0.0)) throw Error(ErrorCode::ZeroRHS, "variation of f vanishes");
  const DyadicTower t(f, alpha);
  const auto q = q_alpha_extract(t);
  return verify_finitedyadiclinear(f, q, alpha, p);
}

VerificationReport verify_densitylow(const GridFunction& f, const DyadicTower& tower0,
                                     std::span<const DyadicCube> family, double p) {
  const int d = f.dim;
  require(p >= 1.0 && std::isfinite(p), "densitylow needs 1 <= p < inf");
  auto r = base_report(InequalityId::DensityLow, f, kNaN, kNaN, p, p);
  const double v = checked_variation(f, p);
  r.rhs = std::pow(v, p);
  double lhs = 0.0;
  for (const auto& q : family) {
    if (!tower0.in_q0(q)) throw Error(ErrorCode::NotInQ0, "family cube is not in Q_0");
    const double lam = lambda_threshold(tower0, q, family, LambdaMode::Quarter);
    const double gap = std::max(0.0, tower0.average(q) - lam);
    if (gap > 0.0) lhs += std::pow(side_pow(q.level, d / p - 1.0) * gap, p);
  }
  r.lhs = lhs;
  r.ratio = r.lhs / r.rhs;
  r.extras["family_size"] = static_cast<double>(family.size());
  return r;
}

namespace {

std::vector<DyadicCube> q0_cubes(const DyadicTower& t) {
  std::vector<DyadicCube> out;
  for (int l = t.level_max(); l >= t.level_min(); --l)
    for (const auto& q : t.cubes_at(l))
      if (t.in_q0(q)) out.push_back(q);
  return out;
}

}  // namespace

VerificationReport verify_densitylow(const GridFunction& f, double p) {
  if (!(variation(f, p) > 0.0)) throw Error(ErrorCode::ZeroRHS, "variation of f vanishes");
  const DyadicTower t(f, 0.0);
  const auto fam = q0_cubes(t);
  return verify_densitylow(f, t, fam, p);
}

VerificationReport verify_mass_sparse(const DyadicTower& tower0) {
  const GridFunction& f = tower0.grid();
  auto r = base_report(InequalityId::MassSparse, f, 0.0, kNaN, 1.0, 1.0);
  long failures = 0;
  long checked = 0;
  double worst = 0.0;
  for (const auto& [q, res] : mass_sparse_all(tower0)) {
    ++checked;
    if (!res.ok) ++failures;
    if (res.rhs > 0.0) {
      if (res.lhs / res.rhs > worst) {
        worst = res.lhs / res.rhs;
        r.lhs = res.lhs;
        r.rhs = res.rhs;
      }
    } else if (res.lhs > 0.0) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  r.ratio = worst;
  r.extras["checked"] = static_cast<double>(checked);
  r.extras["failures"] = static_cast<double>(failures);
  r.pass = failures == 0;
  return r;
}

VerificationReport verify_gradient_bound(const GridFunction& f, const MaximalField& field) {
  auto r = base_report(InequalityId::GradientBound, f, field.alpha, kNaN, 1.0, 1.0);
  const auto g = gradient_bound_check(f, field);
  r.lhs = g.max_excess;
  r.rhs = g.tolerance;
  r.ratio = g.tolerance > 0.0 ? g.max_excess / g.tolerance : 0.0;
  r.extras["max_margin"] = g.max_margin;
  r.extras["violations"] = static_cast<double>(g.violations);
  r.extras["interior_violations"] = static_cast<double>(g.interior_violations);
  r.flags.push_back(to_string(field.flavor));
  r.pass = g.violations == 0 && g.interior_violations == 0;
  return r;
}

VerificationReport verify_endpoint_sup(std::span<const double> values, double cell_volume) {
  VerificationReport r;
  r.id = InequalityId::EndpointSup;
  r.cap = kNaN;
  const double vol = cell_volume > 0.0 ? cell_volume : 1.0;
  const double sup = grid_norm(values, vol, std::numeric_limits<double>::infinity());
  const double n4 = grid_norm(values, vol, 4.0);
  const double n8 = grid_norm(values, vol, 8.0);
  const double n16 = grid_norm(values, vol, 16.0);
  // |g|_q ~ sup (K q^-k)^(1/q) near the maximum; eliminating K and k over
  // q = 4, 8, 16 leaves log sup = 4 log|g|_16 - 4 log|g|_8 + log|g|_4.
  r.lhs = sup > 0.0 ? std::exp(4.0 * std::log(n16) - 4.0 * std::log(n8) + std::log(n4)) : 0.0;
  r.rhs = sup;
  r.ratio = sup > 0.0 ? r.lhs / sup : 1.0;
  r.p = std::numeric_limits<double>::infinity();
  r.p_star = r.p;
  r.extras["q4"] = n4;
  r.extras["q8"] = n8;
  r.extras["q16"] = n16;
  r.pass = std::fabs(r.ratio - 1.0) <= 0.05;
  return r;
}

std::optional<double> CapTable::find(const VerificationReport& r) const {
  for (const auto& e : entries)
    if (e.id == r.id && e.dim == r.dim && same(e.alpha, r.alpha) && same(e.beta, r.beta) && same(e.p, r.p))
      return e.cap;
  return std::nullopt;
}

SweepSpec SweepSpec::theorem_suite(int dim) {
  SweepSpec s;
  s.dim = dim;
  s.ids = {InequalityId::TheoGoal,           InequalityId::TheoMfdr,   InequalityId::TheoMfdrDyadic,
           InequalityId::FiniteDyadicLinear, InequalityId::DensityLow, InequalityId::MassSparse,
           InequalityId::EndpointSup};
  if (dim == 2) {
    s.spacing = 1.0 / 16;  // 32^2 coarse, 64^2 fine
    s.box_lo = -0.5;
    s.box_len = 2.0;
  }
  return s;
}

namespace {

struct FixtureCache {
  GridFunction f;
  std::map<double, MaximalField> fields;
  std::map<double, BallFamily> families;
  std::map<double, std::vector<CubeStats>> q_alpha;
};

std::string bucket_key(const VerificationReport& r, bool with_h) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s|%s|%d|%.17g|%.17g|%.17g|%.17g", to_string(r.id), r.source.c_str(), r.dim,
                r.alpha, r.beta, r.p, with_h ? r.h : 0.0);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool wants(const SweepSpec& s, InequalityId id) { return std::find(s.ids.begin(), s.ids.end(), id) != s.ids.end(); }

}  // namespace

SweepResult ensemble_sweep(const SweepSpec& spec, const CapTable& caps) {
  require(spec.dim == 1 || spec.dim == 2, "sweep dimension must be 1 or 2");
  require(spec.seeds >= 1, "sweep needs at least one seed");
  require(spec.spacing > 0.0 && spec.box_len > 0.0, "sweep needs positive spacing and box");
  require(!spec.ids.empty(), "sweep needs at least one inequality id");
  for (double a : spec.alphas) require(a > 0.0 && a < spec.dim, "sweep alphas must lie in (0, d)");
  for (double p : spec.ps) require(p >= 1.0, "sweep exponents must be >= 1");
  const int d = spec.dim;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> spacings{spec.spacing};
  if (spec.refine) spacings.push_back(spec.spacing / 2);
  const long tasks = static_cast<long>(spacings.size()) * spec.seeds;
  std::vector<std::vector<VerificationReport>> out(static_cast<std::size_t>(tasks));

  parallel_for(tasks, [&](long begin, long end) {
    for (long t = begin; t < end; ++t) {
      const double h = spacings[static_cast<std::size_t>(t / spec.seeds)];
      const std::uint64_t seed = spec.seed0 + static_cast<std::uint64_t>(t % spec.seeds);
      auto& recs = out[static_cast<std::size_t>(t)];
      std::map<Generator, FixtureCache> cache;

      auto generator_for = [&](double p) {
        if (spec.generator) return *spec.generator;
        if (p == 1.0) return seed % 2 == 0 ? Generator::Indicators : Generator::Staircase;
        return Generator::Bumps;
      };
      auto fixture = [&](double p) -> FixtureCache& {
        const Generator g = generator_for(p);
        auto it = cache.find(g);
        if (it != cache.end()) return it->second;
        FixtureSpec fs;
        fs.dim = d;
        fs.spacing = h;
        fs.box_lo = {spec.box_lo, spec.box_lo};
        fs.box_len = spec.box_len;
        fs.support_lo = {spec.support_lo, spec.support_lo};
        fs.support_len = spec.support_len;
        fs.generator = g;
        fs.seed = seed;
        return cache.emplace(g, FixtureCache{make_fixture(fs), {}, {}, {}}).first->second;
      };
      auto field = [&](FixtureCache& c, double alpha) -> const MaximalField& {
        auto it = c.fields.find(alpha);
        if (it == c.fields.end())
          it = c.fields.emplace(alpha, frac_max(c.f, alpha, spec.flavor, RadiusGrid::linear_for(c.f))).first;
        return it->second;
      };
      auto family = [&](FixtureCache& c, double alpha) -> const BallFamily& {
        auto it = c.families.find(alpha);
        if (it == c.families.end()) it = c.families.emplace(alpha, optimal_balls(c.f, field(c, alpha))).first;
        return it->second;
      };
      auto qalpha = [&](FixtureCache& c, double alpha) -> const std::vector<CubeStats>& {
        auto it = c.q_alpha.find(alpha);
        if (it == c.q_alpha.end()) it = c.q_alpha.emplace(alpha, q_alpha_extract(DyadicTower(c.f, alpha))).first;
        return it->second;
      };
      auto push = [&](VerificationReport r) {
        r.seed = seed;
        recs.push_back(std::move(r));
      };
      auto push_endpoint = [&](const VerificationReport& src, std::span<const double> values, double vol) {
        if (!wants(spec, InequalityId::EndpointSup)) return;
        auto e = verify_endpoint_sup(values, vol);
        e.source = to_string(src.id);
        e.dim = src.dim;
        e.alpha = src.alpha;
        e.beta = src.beta;
        e.p = src.p;
        e.h = src.h;
        push(std::move(e));
      };
      auto exponents = [&](double endpoint) {
        std::vector<double> ps;
        for (double p : spec.ps) ps.push_back(p);
        if (spec.endpoints && endpoint >= 1.0 &&
            std::none_of(ps.begin(), ps.end(), [&](double p) { return same(p, endpoint); }))
          ps.push_back(endpoint);
        return ps;
      };

      for (double alpha : spec.alphas) {
        if (wants(spec, InequalityId::TheoGoal))
          for (double p : exponents(d / alpha)) {
            if (p > d / alpha + kExponentTol) continue;
            auto& c = fixture(p);
            const auto& m = field(c, alpha);
            auto r = verify_theo_goal(c.f, m, p);
            if (std::isinf(r.p_star)) push_endpoint(r, gradient_field(m.grid).magnitude(), c.f.cell_volume());
            push(std::move(r));
          }
        for (InequalityId id : {InequalityId::TheoMfdr, InequalityId::TheoMfdrDyadic}) {
          if (!wants(spec, id)) continue;
          for (double beta : spec.betas) {
            const double s = 1.0 + alpha + beta;
            if (s < 0.0 || alpha + beta < -1.0 || alpha + beta >= d) continue;
            for (double p : exponents(s > 0.0 ? d / s : inf)) {
              if (p < 1.0 || s > d / p + kExponentTol) continue;
              auto& c = fixture(p);
              if (id == InequalityId::TheoMfdr) {
                const auto& fam = family(c, alpha);
                auto r = verify_mfdr(c.f, fam, beta, p);
                if (std::isinf(r.p_star))
                  push_endpoint(r, m_alpha_beta(c.f, fam, beta).grid.values, c.f.cell_volume());
                push(std::move(r));
              } else {
                const auto& q = qalpha(c, alpha);
                auto r = verify_mfdrdyadic(c.f, q, alpha, beta, p);
                if (std::isinf(r.p_star))
                  push_endpoint(r, dyadic_max_ab(c.f, alpha, beta, q).grid.values, c.f.cell_volume());
                push(std::move(r));
              }
            }
          }
        }
        if (wants(spec, InequalityId::FiniteDyadicLinear))
          for (double p : exponents(inf)) {
            auto& c = fixture(p);
            const auto& q = qalpha(c, alpha);
            auto r = verify_finitedyadiclinear(c.f, q, alpha, p);
            if (std::isinf(p)) {
              std::vector<double> a;
              for (const auto& cs : q) a.push_back(side_pow(cs.cube.level, -1.0) * cs.f_q);
              push_endpoint(r, a, 0.0);
            }
            push(std::move(r));
          }
        if (wants(spec, InequalityId::GradientBound)) {
          auto& c = fixture(spec.ps.empty() ? 1.0 : spec.ps.front());
          push(verify_gradient_bound(c.f, field(c, alpha)));
        }
      }
      if (wants(spec, InequalityId::DensityLow) || wants(spec, InequalityId::MassSparse)) {
        for (double p : spec.ps) {
          auto& c = fixture(p);
          const DyadicTower t0(c.f, 0.0);
          if (wants(spec, InequalityId::DensityLow)) push(verify_densitylow(c.f, t0, q0_cubes(t0), p));
          if (wants(spec, InequalityId::MassSparse) && p == spec.ps.front()) push(verify_mass_sparse(t0));
        }
      }
    }
  });

  SweepResult res;
  for (auto& v : out)
    for (auto& r : v) res.records.push_back(std::move(r));

  for (auto& r : res.records) {
    if (is_theorem_level(r.id)) {
      const auto cap = caps.find(r);
      r.cap = cap ? *cap : kNaN;
      const bool within = std::isfinite(r.ratio) && cap && r.ratio <= *cap;
      if (!within) r.flags.push_back(cap ? "cap_exceeded" : "no_cap");
      r.pass = r.pass && within;
      if (!within) ++res.cap_failures;
      if (!r.pass && within) ++res.exact_failures;
    } else if (!r.pass) {
      ++res.exact_failures;
    }
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<const VerificationReport*>> groups;
  for (const auto& r : res.records) {
    const auto k = bucket_key(r, true);
    if (!groups.count(k)) order.push_back(k);
    groups[k].push_back(&r);
  }
  std::map<std::string, const BucketSummary*> coarse;
  res.buckets.reserve(order.size());
  for (const auto& k : order) {
    const auto& g = groups[k];
    BucketSummary b;
    const auto& r0 = *g.front();
    b.id = r0.id;
    b.source = r0.source;
    b.dim = r0.dim;
    b.alpha = r0.alpha;
    b.beta = r0.beta;
    b.p = r0.p;
    b.h = r0.h;
    b.cap = r0.cap;
    std::vector<double> ratios;
    for (const auto* r : g) {
      ratios.push_back(r->ratio);
      b.pass = b.pass && r->pass;
    }
    b.count = static_cast<long>(ratios.size());
    b.max_ratio = *std::max_element(ratios.begin(), ratios.end(), [](double x, double y) {
      if (std::isnan(y)) return !std::isnan(x);
      return x < y;
    });
    b.median_ratio = median(ratios);
    res.buckets.push_back(b);
  }
  if (spec.refine) {
    std::map<std::string, std::pair<const BucketSummary*, const BucketSummary*>> pairs;
    std::vector<std::string> keys;
    for (const auto& b : res.buckets) {
      if (!is_theorem_level(b.id)) continue;
      VerificationReport probe;
      probe.id = b.id;
      probe.dim = b.dim;
      probe.alpha = b.alpha;
      probe.beta = b.beta;
      probe.p = b.p;
      const auto k = bucket_key(probe, false);
      auto& slot = pairs[k];
      if (!slot.first) {
        keys.push_back(k);
        slot.first = &b;
      } else {
        slot.second = &b;
      }
    }
    for (const auto& k : keys) {
      const auto& [a, b] = pairs[k];
      if (!b) continue;
      DriftRow row;
      row.id = a->id;
      row.dim = a->dim;
      row.alpha = a->alpha;
      row.beta = a->beta;
      row.p = a->p;
      row.endpoint = std::isinf(a->p) || (a->id == InequalityId::TheoGoal && at_endpoint(a->dim, a->alpha, a->p)) ||
                     ((a->id == InequalityId::TheoMfdr || a->id == InequalityId::TheoMfdrDyadic) &&
                      at_endpoint(a->dim, 1.0 + a->alpha + a->beta, a->p));
      row.ratio_coarse = a->max_ratio;
      row.ratio_fine = b->max_ratio;
      row.drift = std::fabs(b->max_ratio - a->max_ratio) / a->max_ratio;
      row.pass = std::isfinite(row.drift) && row.drift <= kDriftLimit;
      if (!row.pass && !row.endpoint) ++res.drift_failures;
      res.drift.push_back(row);
    }
  }
  res.pass = res.exact_failures == 0 && res.cap_failures == 0 && res.drift_failures == 0;
  return res;
}

}  // namespace fracmax
