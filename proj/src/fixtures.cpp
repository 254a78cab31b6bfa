#include "fracmax/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "fracmax/error.hpp"

namespace fracmax {

double quantize(double v) { return std::ldexp(std::nearbyint(std::ldexp(v, 16)), -16); }

const char* to_string(Generator g) {
  switch (g) {
    case Generator::Indicators: return "indicators";
    case Generator::Staircase: return "staircase";
    case Generator::Bumps: return "bumps";
    case Generator::Noise: return "noise";
  }
  return "?";
}

Generator parse_generator(const std::string& s) {
  if (s == "indicators") return Generator::Indicators;
  if (s == "staircase") return Generator::Staircase;
  if (s == "bumps") return Generator::Bumps;
  if (s == "noise") return Generator::Noise;
  throw Error(ErrorCode::InvalidParamRange, "unknown generator: " + s);
}

namespace {

// Uniform integer in [0, n) from the raw engine; avoids the
// implementation-defined standard distributions.
long draw(std::mt19937_64& rng, long n) { return static_cast<long>(rng() % static_cast<std::uint64_t>(n)); }
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Feature {
  std::array<double, 2> lo{0.0, 0.0};
  double len = 0.0;
  double height = 0.0;
};

}  // namespace

GridFunction make_fixture(const FixtureSpec& s) {
  const long n = static_cast<long>(std::llround(s.box_len / s.spacing));
  std::array<long, 2> shape{n, s.dim == 2 ? n : 1};
  const std::array<double, 2> origin{s.box_lo[0], s.box_lo[1]};
  GridFunction f = GridFunction::zeros(s.dim, std::span<const long>(shape.data(), static_cast<std::size_t>(s.dim)),
                                       s.spacing, std::span<const double>(origin.data(), static_cast<std::size_t>(s.dim)));
  std::mt19937_64 rng(s.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(s.generator) + 1);
  const double step = 0.125;
  const long slots = std::max(1L, static_cast<long>(std::floor(s.support_len / step)));
  std::vector<Feature> feats;
  switch (s.generator) {
    case Generator::Indicators: {
      const long count = 1 + draw(rng, 4);
      for (long k = 0; k < count; ++k) {
        Feature ft;
        const long len = 1 + draw(rng, std::max(1L, slots / 2));
        for (int a = 0; a < s.dim; ++a)
          ft.lo[a] = s.support_lo[a] + step * static_cast<double>(draw(rng, std::max(1L, slots - len + 1)));
        ft.len = step * static_cast<double>(len);
        ft.height = 1.0;
        feats.push_back(ft);
      }
      break;
    }
    case Generator::Staircase: {
      const long levels = 2 + draw(rng, 3);
      long len = slots;
      std::array<long, 2> at{0, 0};
      for (long k = 0; k < levels && len > 0; ++k) {
        Feature ft;
        for (int a = 0; a < s.dim; ++a) ft.lo[a] = s.support_lo[a] + step * static_cast<double>(at[a]);
        ft.len = step * static_cast<double>(len);
        ft.height = 0.25 * static_cast<double>(1 + draw(rng, 4));
        feats.push_back(ft);
        const long shrink = 1 + draw(rng, std::max(1L, len / 2));
        for (int a = 0; a < s.dim; ++a) at[a] += draw(rng, shrink + 1);
        len -= shrink;
      }
      break;
    }
    case Generator::Bumps: {
      const long count = 1 + draw(rng, 3);
      for (long k = 0; k < count; ++k) {
        Feature ft;
        ft.len = s.support_len * (0.15 + 0.35 * unit(rng));
        for (int a = 0; a < s.dim; ++a) ft.lo[a] = s.support_lo[a] + (s.support_len - ft.len) * unit(rng);
        ft.height = 0.5 + unit(rng);
        feats.push_back(ft);
      }
      break;
    }
    case Generator::Noise: {
      for (std::size_t c = 0; c < f.size(); ++c)
        if (unit(rng) < 0.3) f.values[c] = quantize(4.0 * unit(rng));
      return f;
    }
  }
  for (long i = 0; i < shape[0]; ++i) {
    for (long j = 0; j < shape[1]; ++j) {
      const std::array<double, 2> x{f.cell_center(0, i), s.dim == 2 ? f.cell_center(1, j) : 0.0};
      double v = 0.0;
      for (const Feature& ft : feats) {
        if (s.generator == Generator::Bumps) {
          double t = 1.0;
          for (int a = 0; a < s.dim; ++a) {
            const double c = ft.lo[a] + 0.5 * ft.len;
            t = std::min(t, 1.0 - std::abs(x[a] - c) / (0.5 * ft.len));
          }
          if (t > 0.0) v += ft.height * t;
        } else {
          bool in = true;
          for (int a = 0; a < s.dim; ++a) in = in && x[a] >= ft.lo[a] && x[a] < ft.lo[a] + ft.len;
          if (!in) continue;
          v = s.generator == Generator::Indicators ? 1.0 : v + ft.height;
        }
      }
      f.values[f.flat(i, j)] = quantize(v);
    }
  }
  return f;
}

GridFunction indicator(int dim, long n, double spacing, double origin, double lo, double hi) {
  std::array<long, 2> shape{n, dim == 2 ? n : 1};
  std::array<double, 2> org{origin, origin};
  GridFunction f = GridFunction::zeros(dim, std::span<const long>(shape.data(), static_cast<std::size_t>(dim)), spacing,
                                       std::span<const double>(org.data(), static_cast<std::size_t>(dim)));
  for (long i = 0; i < shape[0]; ++i)
    for (long j = 0; j < shape[1]; ++j) {
      bool in = f.cell_center(0, i) >= lo && f.cell_center(0, i) < hi;
      if (dim == 2) in = in && f.cell_center(1, j) >= lo && f.cell_center(1, j) < hi;
      f.values[f.flat(i, j)] = in ? 1.0 : 0.0;
    }
  return f;
}

GridFunction random_cells(int dim, long n, std::uint64_t seed, double density) {
  std::array<long, 2> shape{n, dim == 2 ? n : 1};
  std::array<double, 2> org{0.0, 0.0};
  GridFunction f = GridFunction::zeros(dim, std::span<const long>(shape.data(), static_cast<std::size_t>(dim)),
                                       1.0 / static_cast<double>(n),
                                       std::span<const double>(org.data(), static_cast<std::size_t>(dim)));
  std::mt19937_64 rng(seed ^ 0xA5A5A5A5ULL);
  for (double& v : f.values)
    if (unit(rng) < density) v = 0.0625 * static_cast<double>(1 + draw(rng, 64));
  return f;
}

}  // namespace fracmax
