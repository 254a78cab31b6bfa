#include "golden_builder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "fracmax/dyadic.hpp"
#include "fracmax/fixtures.hpp"
#include "fracmax/io.hpp"
#include "fracmax/maximal.hpp"
#include "naive_dyadic.hpp"
#include "naive_maximal.hpp"

namespace golden {

using namespace fracmax;
namespace fs = std::filesystem;

GridFunction unit_step() { return indicator(1, 16, 0.125, -0.5, 0.0, 1.0); }

GridFunction unit_interval() { return indicator(1, 8, 0.125, 0.0, 0.0, 1.0); }

GridFunction cells_2d() { return random_cells(2, 8, 7, 0.25); }

namespace {

MaximalField oracle_field(const GridFunction& f, double alpha, Flavor flavor) {
  const RadiusGrid radii = RadiusGrid::linear_for(f);
  const auto n = oracle::naive_frac_max(f, alpha, flavor == Flavor::Centered, radii.radii);
  MaximalField m;
  m.grid = f;
  m.grid.values = n.values;
  m.flavor = flavor;
  m.alpha = alpha;
  m.radii = radii;
  for (const auto& w : n.witness) {
    Witness x;
    x.center = w.center;
    x.radius_index = w.radius_index;
    x.radius = radii.radii[static_cast<std::size_t>(w.radius_index)];
    x.average = w.average;
    x.value = w.value;
    m.witness.push_back(x);
  }
  return m;
}

struct CubeKey {
  int level;
  Index k;
  bool operator<(const CubeKey& o) const { return std::tie(level, k) < std::tie(o.level, o.k); }
};

// Cube dump up to the stable top: membership from ancestor scans, averages and
// thresholds recomputed cell by cell.
std::vector<CubeStats> oracle_dump(const GridFunction& f, double alpha, bool q0) {
  const int lmin = static_cast<int>(std::lround(std::log2(f.spacing)));
  const int top = DyadicTower(f, alpha).level_top();
  const int lmax = top + 60;
  const auto qa = oracle::naive_q_alpha(f, alpha, lmin, lmax);
  const auto z = oracle::naive_q_alpha(f, 0.0, lmin, lmax);

  std::map<CubeKey, std::vector<double>> cells;
  for (int L = lmin; L <= lmax; ++L)
    for (long i = 0; i < f.shape[0]; ++i)
      for (long j = 0; j < f.shape[1]; ++j) {
        const double side = std::ldexp(1.0, L);
        const Index k{static_cast<long>(std::floor(f.cell_center(0, i) / side)),
                      f.dim == 2 ? static_cast<long>(std::floor(f.cell_center(1, j) / side)) : 0};
        cells[{L, k}].push_back(f.values[f.flat(i, j)]);
      }
  auto count = [&](int L) { return std::exp2(static_cast<double>(L - lmin) * f.dim); };
  auto average = [&](int L, const Index& k) {
    double s = 0.0;
    for (double v : cells.at({L, k})) s += v;
    return s / count(L);
  };
  auto contains = [&](const DyadicCube& p, const DyadicCube& q) {
    if (p.level <= q.level) return false;
    const int sh = p.level - q.level;
    for (int a = 0; a < f.dim; ++a)
      if (static_cast<long>(std::floor(std::ldexp(static_cast<double>(q.index[a]), -sh))) != p.index[a]) return false;
    return true;
  };
  auto threshold = [&](const DyadicCube& q, const std::vector<DyadicCube>& family, double rho) {
    double sup = 0.0;
    for (const auto& p : family)
      if (contains(p, q)) sup = std::max(sup, average(p.level, p.index));
    const double inf = oracle::naive_inf_term(cells.at({q.level, q.index}), static_cast<long>(count(q.level)), rho);
    return std::min(std::max(inf, sup), average(q.level, q.index));
  };

  std::vector<CubeStats> out;
  for (const auto& q : q0 ? z : qa) {
    if (q.level > top) continue;
    CubeStats s;
    s.cube = q;
    s.f_q = average(q.level, q.index);
    s.value_alpha = std::exp2(static_cast<double>(q.level) * alpha) * s.f_q;
    s.in_q_alpha = std::find(qa.begin(), qa.end(), q) != qa.end();
    s.in_q0 = std::find(z.begin(), z.end(), q) != z.end();
    s.lambda_qq = threshold(q, qa, std::exp2(-f.dim - 2.0));
    s.lambda_bar = threshold(q, z, 0.5);
    out.push_back(s);
  }
  return out;
}

void dump(const fs::path& path, const GridFunction& f, double alpha, bool q0) {
  std::ofstream os(path, std::ios::binary);
  write_cube_dump(os, oracle_dump(f, alpha, q0), f.dim);
}

}  // namespace

void write_all(const fs::path& dir) {
  fs::create_directories(dir);
  write_grid(unit_step(), dir / "unit_step.json", true);
  write_grid(unit_interval(), dir / "unit_interval.json", true);
  write_grid(cells_2d(), dir / "cells_2d.json", true);
  write_grid(GridFunction::zeros(1, std::vector<long>{8}, 0.125, std::vector<double>{0.0}), dir / "zero.json", true);

  for (Flavor fl : {Flavor::Centered, Flavor::Uncentered}) {
    const std::string tag = std::string("_") + to_string(fl) + ".json";
    write_maximal_field(oracle_field(unit_step(), 0.5, fl), dir / ("maxfun_unit_step" + tag), true);
    write_maximal_field(oracle_field(cells_2d(), 1.0, fl), dir / ("maxfun_cells_2d" + tag), true);
  }
  dump(dir / "qalpha_unit_interval.jsonl", unit_interval(), 0.5, false);
  dump(dir / "qalpha_unit_step.jsonl", unit_step(), 0.5, false);
  dump(dir / "qalpha_cells_2d.jsonl", cells_2d(), 1.0, false);
  dump(dir / "q0_cells_2d.jsonl", cells_2d(), 0.0, true);
  std::ofstream(dir / "qalpha_zero.jsonl", std::ios::binary);
}

}  // namespace golden
