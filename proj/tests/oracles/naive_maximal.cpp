#include "naive_maximal.hpp"

#include <cmath>

namespace oracle {

using fracmax::GridFunction;
using fracmax::Index;

namespace {

double lattice_r2(const GridFunction& f, double r) {
  const double rho = r / (0.5 * f.spacing);
  double r2 = rho * rho;
  const double n = std::nearbyint(r2);
  if (std::abs(r2 - n) <= 1e-9 * std::max(1.0, std::abs(r2))) r2 = n;
  const double nr = std::nearbyint(rho);
  if (std::abs(rho - nr) <= 1e-9 * std::max(1.0, rho)) r2 = nr * nr;
  return r2;
}

double sq(double x) { return x * x; }

}  // namespace

bool naive_ball(const GridFunction& f, const Index& u, double r, double& avg) {
  const double r2 = lattice_r2(f, r);
  const long reach = static_cast<long>(std::ceil(std::sqrt(r2))) + 2;
  double sum = 0.0;
  long count = 0;
  // Sum over the box in row-major order.
  for (long i = 0; i < f.shape[0]; ++i)
    for (long j = 0; j < f.shape[1]; ++j) {
      double d2 = sq(static_cast<double>(2 * i + 1 - u[0]));
      if (f.dim == 2) d2 += sq(static_cast<double>(2 * j + 1 - u[1]));
      if (d2 < r2) sum += f.values[static_cast<std::size_t>(i * f.shape[1] + j)];
    }
  // Count over the bounding square, box or not.
  const long i0 = (u[0] - reach) / 2 - 1;
  const long i1 = (u[0] + reach) / 2 + 1;
  const long j0 = f.dim == 2 ? (u[1] - reach) / 2 - 1 : 0;
  const long j1 = f.dim == 2 ? (u[1] + reach) / 2 + 1 : 0;
  for (long i = i0; i <= i1; ++i)
    for (long j = j0; j <= j1; ++j) {
      double d2 = sq(static_cast<double>(2 * i + 1 - u[0]));
      if (f.dim == 2) d2 += sq(static_cast<double>(2 * j + 1 - u[1]));
      if (d2 < r2) ++count;
    }
  if (count == 0) return false;
  avg = sum / static_cast<double>(count);
  return true;
}

NaiveField naive_frac_max(const GridFunction& f, double alpha, bool centered, const std::vector<double>& radii) {
  struct Cand {
    Index u;
    int k;
    double r2;
    double avg;
    double value;
  };
  std::vector<Cand> cands;
  const long n0 = f.shape[0];
  const long n1 = f.dim == 2 ? f.shape[1] : 0;
  for (int k = 0; k < static_cast<int>(radii.size()); ++k) {
    const double r = radii[static_cast<std::size_t>(k)];
    for (long u0 = 0; u0 <= 2 * n0; ++u0)
      for (long u1 = 0; u1 <= 2 * n1; ++u1) {
        if (centered && (u0 % 2 == 0 || (f.dim == 2 && u1 % 2 == 0))) continue;
        Index u{u0, u1};
        double avg = 0.0;
        if (!naive_ball(f, u, r, avg)) continue;
        cands.push_back({u, k, lattice_r2(f, r), avg, std::pow(r, alpha) * avg});
      }
  }
  NaiveField out;
  out.values.assign(f.size(), 0.0);
  out.witness.assign(f.size(), NaiveWitness{});
  for (long i = 0; i < f.shape[0]; ++i)
    for (long j = 0; j < f.shape[1]; ++j) {
      const Index x{2 * i + 1, f.dim == 2 ? 2 * j + 1 : 0};
      const Cand* best = nullptr;
      for (const Cand& c : cands) {
        double d2 = sq(static_cast<double>(x[0] - c.u[0]));
        if (f.dim == 2) d2 += sq(static_cast<double>(x[1] - c.u[1]));
        const bool admissible = centered ? d2 == 0.0 : d2 <= c.r2;
        if (!admissible) continue;
        if (!best || c.value > best->value ||
            (c.value == best->value && (c.k > best->k || (c.k == best->k && c.u < best->u))))
          best = &c;
      }
      const std::size_t cell = static_cast<std::size_t>(i * f.shape[1] + j);
      if (best) {
        out.values[cell] = best->value;
        out.witness[cell] = {best->u, best->k, best->avg, best->value};
      }
    }
  return out;
}

}  // namespace oracle
