#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracmax/cube.hpp"
#include "fracmax/grid.hpp"

namespace fracmax {

struct CubeStats {
  DyadicCube cube;
  double f_q = 0.0;
  double value_alpha = 0.0;  // sle(Q)^alpha f_Q
  bool in_q_alpha = false;
  bool in_q0 = false;
  double lambda_qq = 0.0;   // quarter density, sup over Q_alpha ancestors
  double lambda_bar = 0.0;  // half density, sup over Q_0 ancestors
};

enum class LambdaMode {
  Quarter,  // density 2^(-d-2)
  Half,     // density 1/2
};

double lambda_density(LambdaMode mode, int dim);

/// Standard-grid tower over a grid whose spacing is a power of two and whose
/// origin lies on the cell lattice. Levels run from log2(h) up to the first
/// level where the cube pattern over the box stops changing ("stable top"),
/// then `tail_levels` further levels. Above the stable top the cube sums are
/// constant and averages decay by 2^-d per level, so every membership test
/// that involves ancestors above the materialized range is decided exactly.
class DyadicTower {
 public:
  DyadicTower(const GridFunction& f, double alpha, int tail_levels = 60);

  int dim() const { return f_.dim; }
  double alpha() const { return alpha_; }
  const GridFunction& grid() const { return f_; }
  int level_min() const { return lmin_; }
  int level_top() const { return ltop_; }
  int level_max() const { return lmin_ + static_cast<int>(levels_.size()) - 1; }

  bool has(const DyadicCube& q) const;
  /// Cube of the given level containing box cell (i, j).
  DyadicCube cell_cube(int level, long i, long j) const;
  std::vector<DyadicCube> cubes_at(int level) const;

  double cell_count(const DyadicCube& q) const;  // 2^((level - lmin) d)
  double sum(const DyadicCube& q) const;
  double average(const DyadicCube& q) const;
  double value(const DyadicCube& q, double s) const;  // sle^s f_Q
  bool in_q_alpha(const DyadicCube& q) const;
  bool in_q0(const DyadicCube& q) const;
  /// Largest value_alpha / f_Q among ancestors inside the tower (0 if none).
  double ancestor_max_alpha(const DyadicCube& q) const;
  double ancestor_max_f(const DyadicCube& q) const;

  /// Box cell values inside the cube (exterior cells are implicit zeros).
  std::vector<double> cell_values(const DyadicCube& q) const;
  /// Box cells [lo, hi) per axis covered by the cube.
  CellBox cell_range(const DyadicCube& q) const;

  CubeStats stats(const DyadicCube& q) const;

 private:
  struct Level {
    Index kmin{0, 0};
    Index count{1, 1};
    std::vector<double> sum;
    std::vector<unsigned char> qa;
    std::vector<unsigned char> q0;
    std::vector<double> anc_a;
    std::vector<double> anc_f;
  };
  const Level& lvl(int level) const { return levels_[static_cast<std::size_t>(level - lmin_)]; }
  std::size_t slot(const Level& l, const Index& k) const;

  GridFunction f_;
  double alpha_ = 0.0;
  int lmin_ = 0;
  int ltop_ = 0;
  Index org_{0, 0};  // origin / h
  std::vector<Level> levels_;
};

/// Cubes of grid `shift_id` at levels [level_min, level_max] meeting the box,
/// sorted by (level desc, index). f_Q is exact (fractional cell overlap for
/// shifted grids); membership flags compare against ancestors inside the
/// enumerated range. Lambda fields are filled on the standard grid only.
std::vector<CubeStats> enumerate_cubes(const GridFunction& f, int shift_id, int level_min, int level_max,
                                       double alpha = 0.0);

struct DyadicField {
  GridFunction grid;  // values: sup over cubes containing the cell
  std::vector<DyadicCube> witness;
  double alpha = 0.0;
  bool degenerate_zero = false;
};

/// Per-cell sup of sle(Q)^alpha f_Q; witness = largest attaining cube.
DyadicField dyadic_max(const DyadicTower& tower);
DyadicField dyadic_max(const GridFunction& f, double alpha);

/// Every Q_alpha cube of the tower (tail included), sorted by (level desc, index).
std::vector<CubeStats> q_alpha_extract(const DyadicTower& tower);

/// inf{lambda : |{f > lambda} cap Q| < rho |Q|}: the k-th largest cell value
/// of Q with k = ceil(rho m), exterior cells counted as zeros.
double lambda_inf_term(const DyadicTower& tower, const DyadicCube& q, double rho);

/// min{max{inf term, sup{f_P : P in family, P strictly contains Q}}, f_Q};
/// sup over an empty family is 0.
double lambda_threshold(const DyadicTower& tower, const DyadicCube& q, std::span<const DyadicCube> family,
                        LambdaMode mode);
double lambda_threshold(const DyadicTower& tower, const DyadicCube& q,
                        const std::function<bool(const DyadicCube&)>& in_family, LambdaMode mode);

struct MassSparseResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// |Q|(f_Q - lambda_Q^empty) <= 2^(d+2) sum_{P in Q_0, P strictly in Q} int_{lambda_bar_P}^{f_P} |P cap {f > l}| dl.
/// Throws NotInQ0.
MassSparseResult mass_sparse_check(const DyadicTower& tower, const DyadicCube& q);
/// Same for every Q_0 cube of the tower, sharing the descendant sums.
std::vector<std::pair<DyadicCube, MassSparseResult>> mass_sparse_all(const DyadicTower& tower);

struct DyadicAlphaBeta {
  GridFunction grid;
  std::vector<unsigned char> covered;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Per-cell max of sle(Q)^(alpha+beta) f_Q over the given cubes whose closure
/// holds the cell center. Throws BetaOutOfRange unless -1 <= alpha+beta < d.
DyadicAlphaBeta dyadic_max_ab(const GridFunction& f, double alpha, double beta, std::span<const CubeStats> cubes);

/// JSON lines, one cube per line, sorted by (shift_id, level desc, index).
void write_cube_dump(std::ostream& os, std::vector<CubeStats> cubes, int dim);

}  // namespace fracmax
