#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "fracmax/dyadic.hpp"
#include "fracmax/error.hpp"
#include "fracmax/fixtures.hpp"
#include "fracmax/geometry.hpp"
#include "fracmax/io.hpp"
#include "fracmax/maximal.hpp"
#include "fracmax/parallel.hpp"
#include "fracmax/verify.hpp"

using namespace fracmax;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridFunction unit_step(double h) { return indicator(1, static_cast<long>(3.0 / h), h, -1.0, 0.0, 1.0); }

GridFunction bumps(int dim, double h, std::uint64_t seed) {
  FixtureSpec s;
  s.dim = dim;
  s.spacing = h;
  s.box_lo = {-1.0, -1.0};
  s.box_len = 3.0;
  s.generator = Generator::Bumps;
  s.seed = seed;
  return make_fixture(s);
}

GridFunction dilate(const GridFunction& f, double s) {
  GridFunction g = f;
  g.spacing *= s;
  for (int a = 0; a < f.dim; ++a) g.origin[a] *= s;
  return g;
}

std::string sweep_json(const SweepResult& r) {
  std::ostringstream os;
  write_sweep_json(os, r);
  return os.str();
}

SweepSpec small_sweep() {
  SweepSpec s = SweepSpec::theorem_suite(1);
  s.seeds = 3;
  s.spacing = 1.0 / 32;
  s.alphas = {0.5};
  return s;
}

}  // namespace

TEST_CASE("Sobolev exponents") {
  CHECK(sobolev_exponent(1, 0.5, 1.0) == doctest::Approx(2.0));
  CHECK(sobolev_exponent(2, 0.5, 1.0) == doctest::Approx(4.0 / 3.0));
  CHECK(std::isinf(sobolev_exponent(1, 0.5, 2.0)));
  CHECK(at_endpoint(1, 0.25, 4.0));
  CHECK(at_endpoint(2, 1.5, 4.0 / 3.0));
  CHECK_FALSE(at_endpoint(1, 0.5, 1.0));
}

TEST_CASE("grid and sequence norms") {
  const std::vector<double> v{3.0, 4.0};
  CHECK(sequence_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(sequence_norm(v, 1.0) == doctest::Approx(7.0));
  CHECK(sequence_norm(v, kInf) == 4.0);
  CHECK(grid_norm(v, 0.25, 2.0) == doctest::Approx(2.5));
  CHECK(grid_norm(v, 0.25, kInf) == 4.0);
  CHECK(sequence_norm(std::vector<double>{}, 3.0) == 0.0);
}

TEST_CASE("finitedyadiclinear on the unit step") {
  // Q_alpha = {[0, 2^n)}: lhs = sum_n 2^-n = 2, var = 2.
  for (double h : {1.0 / 16, 1.0 / 64})
    for (double alpha : {0.25, 0.5, 0.75}) {
      const auto r = verify_finitedyadiclinear(unit_step(h), alpha, 1.0);
      CHECK(r.lhs == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
      // sup_Q sle^-1 f_Q is attained at [0, 1)
      CHECK(verify_finitedyadiclinear(unit_step(h), alpha, kInf).lhs == doctest::Approx(1.0));
    }
}

TEST_CASE("zero input is rejected by every theorem-level check") {
  const GridFunction z = GridFunction::zeros(1, std::vector<long>{64}, 1.0 / 16, std::vector<double>{0.0});
  auto zero_rhs = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code() == ErrorCode::ZeroRHS;
    }
    return false;
  };
  CHECK(zero_rhs([&] { verify_theo_goal(z, 0.5, 1.0, Flavor::Uncentered); }));
  CHECK(zero_rhs([&] { verify_mfdr(z, 0.5, -1.0, 1.0, Flavor::Uncentered); }));
  CHECK(zero_rhs([&] { verify_mfdrdyadic(z, 0.5, -1.0, 1.0); }));
  CHECK(zero_rhs([&] { verify_finitedyadiclinear(z, 0.5, 1.0); }));
  CHECK(zero_rhs([&] { verify_densitylow(z, 1.0); }));
}

TEST_CASE("densitylow on the unit step") {
  const GridFunction f = unit_step(1.0 / 32);
  const DyadicTower t0(f, 0.0);
  const std::vector<DyadicCube> unit{{0, 0, {0, 0}}};
  const auto r = verify_densitylow(f, t0, unit, 1.0);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == doctest::Approx(2.0));
  CHECK(verify_densitylow(f, t0, std::vector<DyadicCube>{}, 2.0).lhs == 0.0);
  const std::vector<DyadicCube> half{{0, -1, {0, 0}}};
  try {
    verify_densitylow(f, t0, half, 1.0);
    FAIL("expected NotInQ0");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInQ0);
  }
}

TEST_CASE("mfdr endpoint equals the family maximum") {
  const GridFunction f = bumps(1, 1.0 / 32, 3);
  const double alpha = 0.5, beta = -1.0;
  const auto field = frac_max(f, alpha, Flavor::Uncentered, RadiusGrid::linear_for(f));
  const auto fam = optimal_balls(f, field);
  double sup = 0.0;
  for (const auto& b : fam.balls) sup = std::max(sup, std::pow(b.radius, alpha + beta) * b.average);
  const auto r = verify_mfdr(f, fam, beta, 2.0);
  CHECK(std::isinf(r.p_star));
  CHECK(r.lhs == doctest::Approx(sup).epsilon(1e-14));
}

TEST_CASE("mfdrdyadic chain on the unit step") {
  for (double p : {1.0, 2.0}) {
    const auto r = verify_mfdrdyadic(unit_step(1.0 / 64), 0.5, -1.0, p);
    CHECK(r.extras.at("chain_lhs") <= r.extras.at("chain_rhs") * (1.0 + 1e-12));
    CHECK(r.lhs <= r.extras.at("chain_lhs") * (1.0 + 1e-12));
    CHECK(std::find(r.flags.begin(), r.flags.end(), "chain_violation") == r.flags.end());
  }
}

TEST_CASE("theo_goal on the unit step is stable under refinement") {
  const auto coarse = verify_theo_goal(unit_step(1.0 / 64), 0.5, 1.0, Flavor::Uncentered);
  const auto fine = verify_theo_goal(unit_step(1.0 / 128), 0.5, 1.0, Flavor::Uncentered);
  CHECK(std::isfinite(coarse.ratio));
  CHECK(coarse.ratio > 0.0);
  CHECK(std::fabs(fine.ratio - coarse.ratio) <= 0.1 * coarse.ratio);
  const auto mfdr = verify_mfdr(unit_step(1.0 / 64), 0.5, -1.0, 1.0, Flavor::Uncentered);
  const auto mfdr_fine = verify_mfdr(unit_step(1.0 / 128), 0.5, -1.0, 1.0, Flavor::Uncentered);
  CHECK(std::fabs(mfdr_fine.ratio - mfdr.ratio) <= 0.1 * mfdr.ratio);
}

TEST_CASE("ratios are invariant under dilation") {
  for (int dim : {1, 2}) {
    const GridFunction f = bumps(dim, dim == 1 ? 1.0 / 32 : 1.0 / 8, 11);
    for (double s : {2.0, 4.0}) {
      const GridFunction g = dilate(f, s);
      const double a = 0.5 * dim;
      CHECK(verify_theo_goal(g, a, 1.0, Flavor::Uncentered).ratio ==
            doctest::Approx(verify_theo_goal(f, a, 1.0, Flavor::Uncentered).ratio).epsilon(1e-10));
      CHECK(verify_mfdr(g, a, -0.5, 1.0, Flavor::Centered).ratio ==
            doctest::Approx(verify_mfdr(f, a, -0.5, 1.0, Flavor::Centered).ratio).epsilon(1e-10));
      CHECK(verify_finitedyadiclinear(g, a, 2.0).ratio ==
            doctest::Approx(verify_finitedyadiclinear(f, a, 2.0).ratio).epsilon(1e-10));
      CHECK(verify_mfdrdyadic(g, a, -1.0, 1.0).ratio ==
            doctest::Approx(verify_mfdrdyadic(f, a, -1.0, 1.0).ratio).epsilon(1e-10));
    }
  }
}

TEST_CASE("endpoint extrapolation") {
  const std::vector<double> flat(37, 2.5);
  const auto r = verify_endpoint_sup(flat, 0.125);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.pass);
  std::vector<double> tent;
  for (int i = 0; i <= 2048; ++i) tent.push_back(1.0 - std::fabs(i - 1024) / 1024.0);
  const auto t = verify_endpoint_sup(tent, 1.0 / 1024);
  CHECK(t.rhs == 1.0);
  CHECK(t.ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(verify_endpoint_sup(std::vector<double>(5, 0.0), 1.0).ratio == 1.0);
}

TEST_CASE("one-seed sweep equals a single verify") {
  SweepSpec s;
  s.ids = {InequalityId::FiniteDyadicLinear};
  s.alphas = {0.5};
  s.ps = {1.0};
  s.endpoints = false;
  s.refine = false;
  s.seeds = 1;
  s.seed0 = 4;
  s.spacing = 1.0 / 64;
  const auto res = ensemble_sweep(s, CapTable{});
  REQUIRE(res.records.size() == 1);
  FixtureSpec fs;
  fs.spacing = s.spacing;
  fs.box_lo = {s.box_lo, s.box_lo};
  fs.box_len = s.box_len;
  fs.generator = Generator::Indicators;
  fs.seed = 4;
  const auto single = verify_finitedyadiclinear(make_fixture(fs), 0.5, 1.0);
  CHECK(res.records[0].lhs == single.lhs);
  CHECK(res.records[0].rhs == single.rhs);
  CHECK(res.records[0].ratio == single.ratio);
  CHECK(res.records[0].seed == 4);
  // no cap recorded: the bucket fails visibly
  CHECK_FALSE(res.pass);
  CHECK(res.cap_failures == 1);
  CHECK(res.records[0].flags.back() == "no_cap");
}

TEST_CASE("caps gate the sweep") {
  SweepSpec s;
  s.ids = {InequalityId::FiniteDyadicLinear};
  s.alphas = {0.5};
  s.ps = {1.0};
  s.endpoints = false;
  s.seeds = 2;
  s.spacing = 1.0 / 32;
  CapTable caps;
  caps.version = 1;
  caps.entries.push_back({InequalityId::FiniteDyadicLinear, 1, 0.5, std::nan(""), 1.0, 100.0});
  const auto ok = ensemble_sweep(s, caps);
  CHECK(ok.pass);
  CHECK(ok.cap_failures == 0);
  CHECK(ok.drift.size() == 1);
  CHECK(ok.buckets.size() == 2);
  caps.entries[0].cap = 1e-6;
  const auto bad = ensemble_sweep(s, caps);
  CHECK_FALSE(bad.pass);
  CHECK(bad.cap_failures == 4);
}

TEST_CASE("sweeps are deterministic and independent of the thread count") {
  const SweepSpec s = small_sweep();
  set_thread_count(1);
  const std::string one = sweep_json(ensemble_sweep(s, CapTable{}));
  CHECK(sweep_json(ensemble_sweep(s, CapTable{})) == one);
  set_thread_count(3);
  const std::string three = sweep_json(ensemble_sweep(s, CapTable{}));
  set_thread_count(1);
  CHECK(three == one);
}

TEST_CASE("unknown inequality ids are rejected") {
  CHECK(parse_inequality("theo_mfdr") == InequalityId::TheoMfdr);
  CHECK_THROWS_AS(parse_inequality("theo_nothing"), Error);
}
