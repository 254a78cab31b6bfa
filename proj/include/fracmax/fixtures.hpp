#pragma once

#include <cstdint>
#include <string>

#include "fracmax/grid.hpp"

namespace fracmax {

/// Rounds to the nearest multiple of 2^-16. Sums of such values stay exact,
/// which makes every summation order agree bit for bit.
double quantize(double v);

enum class Generator {
  Indicators,  // unions of cubes on a 1/8 lattice
  Staircase,   // nested cubes with decreasing heights
  Bumps,       // sums of tents
  Noise,       // sparse random cell values
};

const char* to_string(Generator g);
Generator parse_generator(const std::string& s);

struct FixtureSpec {
  int dim = 1;
  double spacing = 1.0 / 64;
  Vec box_lo{0.0, 0.0};
  double box_len = 1.0;      // box [box_lo, box_lo + box_len)^d
  Vec support_lo{0.0, 0.0};
  double support_len = 1.0;  // features live in [support_lo, support_lo + support_len)^d
  Generator generator = Generator::Bumps;
  std::uint64_t seed = 0;
};

/// Deterministic quantized test function. Identical specs at spacings h and
/// h/2 describe the same continuum function sampled at cell centers.
GridFunction make_fixture(const FixtureSpec& spec);

/// Indicator of [lo, hi)^d (cell-center rule) on the box [origin, origin + n h)^d.
GridFunction indicator(int dim, long n, double spacing, double origin, double lo, double hi);

/// Cells set with probability `density` to a random multiple of 2^-4 in (0, 4].
GridFunction random_cells(int dim, long n, std::uint64_t seed, double density = 0.3);

}  // namespace fracmax
