#pragma once

#include <string>
#include <vector>

#include "fracmax/dyadic.hpp"
#include "fracmax/maximal.hpp"

namespace fracmax {

struct SelectionParams {
  double eps = 0.0;
  double c1 = 2.0;
  double c2 = 2.0;

  /// c1 = 2, c2 = 2^d, eps = 2^-20 |f|_inf h^(alpha+beta).
  static SelectionParams defaults(const GridFunction& f, double alpha, double beta);
  void validate() const;  // InvalidParamRange unless c1 >= 2, c2 >= 1, eps > 0
  double c3(int dim, double alpha, double beta) const;
  /// Radius window for a captured ball relative to its witness, as stated:
  /// (5c1)^(1-d/alpha) c2^(1/alpha) r(A) <= r <= 5c1 r(A).
  double sandwich_lower(int dim, double alpha) const;
  /// The same bound re-derived from f_B <= c2 f_A: (5c1)^(1-d/alpha) c2^(-1/alpha).
  double sandwich_lower_derived(int dim, double alpha) const;
  double sandwich_upper() const { return 5.0 * c1; }
};

enum class PairLabel { Disjoint, RatioExcluded, Violation };
const char* to_string(PairLabel l);

struct CoverRecord {
  std::size_t ball = 0;  // family index
  long witness = -1;     // family index of the selected A, -1 if none
  int layer = -1;
  double radius_ratio = 0.0;  // r(B) / r(A)
  bool sandwich_ok = false;
  bool sandwich_derived_ok = false;
  double value_ratio = 0.0;  // r^(a+b) f_B / (c3 r(A)^(a+b) f_A)
  bool value_ok = false;
};

struct PairRecord {
  std::size_t a = 0;
  std::size_t b = 0;
  PairLabel label = PairLabel::Violation;
};

struct GreedySelection {
  double K = 0.0;  // largest active radius; layer n holds r in (2^-n-1 K, 2^-n K]
  double c3 = 0.0;
  std::vector<std::size_t> active;
  std::vector<std::size_t> selected;
  std::vector<int> selected_layer;
  std::vector<PairRecord> pairs;
  std::vector<CoverRecord> cover;
  long pair_violations = 0;
  long uncovered = 0;
  long sandwich_violations = 0;
  long sandwich_derived_violations = 0;
  long value_violations = 0;
};

/// Layered greedy selection over the active balls (r^(a+b) f_B > eps). Within
/// a layer the scan runs by descending f_B (ties: lexicographic center, then
/// larger radius) and keeps every ball whose c1-dilation misses the earlier
/// picks of the layer. Dilation tests are exact in the continuum:
/// |x_A - x_B| >= c1 (r_A + r_B).
GreedySelection greedy_disjoint_balls(const BallFamily& family, const SelectionParams& params, double alpha,
                                      double beta);

/// Literal: generation n+1 compares against generation n only. Cumulative:
/// against every earlier generation. Screened: cumulative, candidates admitted
/// largest first and skipped when they break the trichotomy with an earlier pick.
enum class RepresentativeMode { Literal, Cumulative, Screened };
const char* to_string(RepresentativeMode m);
RepresentativeMode parse_representative_mode(const std::string& s);

struct RepresentativeSelection {
  std::vector<CubeStats> selected;
  std::vector<int> generation;
  std::vector<CubeStats> hat;  // one cube of largest average per parent
  long active = 0;
  long uncovered = 0;
  long pair_checks = 0;
  long trichotomy_violations = 0;
  long screened = 0;  // candidates skipped in Screened mode
  RepresentativeMode mode = RepresentativeMode::Screened;
};

/// Generation 0: maximal active cubes (sle^alpha f_Q > eps). Generation n+1:
/// maximal active cubes Q lying in prt(P) for some P of generation n (see
/// RepresentativeMode) with f_Q > 2^d sup f_P over those P.
RepresentativeSelection disjoint_cube_representatives(const std::vector<CubeStats>& q_alpha, int dim, double eps,
                                                      double alpha,
                                                      RepresentativeMode mode = RepresentativeMode::Screened);

struct HypothesisReport {
  bool ok = true;
  long ancestor_violations = 0;  // item (1)
  long pair_violations = 0;      // item (2)
  long pair_checks = 0;
  std::vector<std::string> messages;
};

struct CubeWithAncestor {
  CubeStats cube;
  CubeStats ancestor;
};

/// (1) p(Q) strictly contains Q, sle(p(Q)) <= sle(Q)/eps, f_Q > 2^eps f_p(Q).
/// (2) distinct Q, P with intersecting p(Q), p(P): f_Q/f_P not in (2^-eps, 2^eps).
HypothesisReport disjoint_family_hypothesis_check(const std::vector<CubeWithAncestor>& family, double eps, int dim);

struct BallCube {
  DyadicCube cube;
  double side_ratio = 0.0;  // sle(Q_B) / r(B)
};

/// Grid-count constant certified for cube_for_ball on d <= 2.
inline constexpr double kGridConstant = 8.0;

/// Smallest cube over the 3^d shifted grids containing the open ball (ties by
/// shift id). Throws OutOfRange when no cube within 8 levels above 2r fits or
/// the certificate sle <= 8 r fails.
BallCube cube_for_ball(const Ball& b, int dim);

/// Discretization widening of the transfer windows: a discrete ball of radius
/// h covers one cell where the continuum ball has volume 2h.
inline constexpr double kTransferAllowance = 2.0;

struct TransferWindows {
  double average_lo = 0.0;  // f_QB / f_B
  double average_hi = 0.0;
  double side_lo = 0.0;     // sle(Q_B) / r(B)
  double side_hi = 0.0;
  double ancestor_hi = 0.0;  // sle(P)^a f_P / (sle(Q_B)^a f_QB)
  double allowance = 1.0;

  /// Continuum chains with C_grid = 8, widened by `allowance`.
  static TransferWindows derive(int dim, double alpha, double allowance);
};

struct TransferReport {
  bool skipped = false;  // zero-average ball
  DyadicCube cube;
  double average_ratio = 0.0;
  double side_ratio = 0.0;
  double max_ancestor_ratio = 0.0;
  int ancestors = 0;
  bool ok = false;
};

/// Comparability of a family ball with its covering cube and the cube's
/// ancestors up to the level that holds the whole box. Throws NotWitness when
/// `index` is not a family ball.
TransferReport transfer_audit(const GridFunction& f, const BallFamily& family, std::size_t index, double alpha,
                              const TransferWindows& windows);

}  // namespace fracmax
