#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "fracmax/cube.hpp"
#include "fracmax/grid.hpp"

namespace fracmax {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Mean of the (zero-extended) cell values whose centers lie in the open ball.
/// Throws EmptyBall when no cell center is covered.
double ball_average(const GridFunction& f, const Ball& b);

/// Number of lattice cells (box or exterior) covered by the ball.
long ball_cell_count(const GridFunction& f, const Ball& b);

/// Mean over a cell-aligned dyadic cube; throws MisalignedCube otherwise.
double cube_average(const GridFunction& f, const DyadicCube& q);

/// Exact average of the piecewise-constant function over [lo, lo + side)^d.
double box_average(const GridFunction& f, const Vec& lo, double side);

LevelSet superlevel(const GridFunction& f, double lambda);

enum class WindowMode {
  Closed,  // faces whose centers lie in the closed window
  Open,    // faces strictly inside the window
};

/// Anisotropic perimeter: number of faces between a member and a non-member
/// cell (exterior cells are non-members) times h^(d-1).
double perimeter(const LevelSet& e, const std::optional<CellBox>& window = std::nullopt,
                 WindowMode mode = WindowMode::Closed);

/// p = 1: face sum of |jumps| * h^(d-1). p > 1: grid L^p norm of the per-cell
/// forward-difference gradient (cells -1..n-1 per axis so the low-side jump
/// into the box is seen). p = infinity: max gradient magnitude.
double variation(const GridFunction& f, double p);

struct CoareaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_error = 0.0;
};

/// lhs: face sum of f clamped to [lambda0, lambda1]. rhs: integral over the
/// band of the (integer) perimeter counts of the superlevel sets, which are
/// constant between consecutive distinct values of f.
CoareaCheck coarea_identity_check(const GridFunction& f, double lambda0, double lambda1);

/// Perimeter counts of {f > v_k} for the sorted distinct values v_k of f
/// (including 0). Exposed for tests.
struct LevelPerimeters {
  std::vector<double> levels;     // v_0 < v_1 < ... (v_0 = 0)
  std::vector<long> face_counts;  // faces of {f > v_k}, k < levels.size()
};
LevelPerimeters level_perimeters(const GridFunction& f);

struct IsoperimetricResult {
  double ratio = 0.0;
  bool degenerate = false;
};

/// min{|Q cap E|, |Q \ E|}^(d-1) / P(E; open Q)^d, 0 when both vanish.
IsoperimetricResult isoperimetric_ratio(const LevelSet& e, const CellBox& q);

}  // namespace fracmax
