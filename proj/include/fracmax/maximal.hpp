#pragma once

#include <string>
#include <vector>

#include "fracmax/geometry.hpp"
#include "fracmax/grid.hpp"

namespace fracmax {

enum class Flavor { Centered, Uncentered };

const char* to_string(Flavor flavor);
Flavor parse_flavor(const std::string& s);

/// Finite ascending set of candidate radii.
struct RadiusGrid {
  std::vector<double> radii;

  /// r_k = (h/2) 2^(k/steps), k = 0..ceil(steps log2(2K/h)).
  static RadiusGrid geometric(double h, double max_radius, int steps_per_octave = 4);
  /// r_k = k h/2, k = 1..ceil(2K/h). Dense enumeration.
  static RadiusGrid linear(double h, double max_radius);
  /// Ladders reaching the default a-priori bound for f: the box diameter plus
  /// one cell. Past it every admissible ball holds all of f's mass, so
  /// r^alpha f_B = r^(alpha-d) |f|_1 / sigma_d only decreases.
  static RadiusGrid geometric_for(const GridFunction& f, int steps_per_octave = 4);
  static RadiusGrid linear_for(const GridFunction& f);

  std::size_t size() const { return radii.size(); }
};

double default_radius_bound(const GridFunction& f);

/// Candidate ball on the half-cell lattice: center at origin + u h/2.
struct Witness {
  Index center{0, 0};  // half-cell lattice coordinates
  int radius_index = -1;
  double radius = 0.0;
  double average = 0.0;
  double value = 0.0;  // radius^alpha * average
};

/// Strict "better witness" order: larger value, then larger radius, then
/// lexicographically smaller center.
bool better_witness(const Witness& a, const Witness& b);

struct MaximalField {
  GridFunction grid;  // metadata of f; values hold the maximal function
  std::vector<Witness> witness;
  Flavor flavor = Flavor::Uncentered;
  double alpha = 0.0;
  RadiusGrid radii;
  bool degenerate_zero = false;

  Ball witness_ball(std::size_t cell) const;
};

Vec lattice_point(const GridFunction& f, const Index& u);

/// Fractional maximal function over the finite candidate family. Centered:
/// balls B(x_cell, r). Uncentered: centers on the half-cell lattice of the box
/// and x in the closed ball. Averages use row prefix sums.
MaximalField frac_max(const GridFunction& f, double alpha, Flavor flavor, const RadiusGrid& radii);

struct FamilyBall {
  Index center_u{0, 0};
  int radius_index = -1;
  double radius = 0.0;
  Vec center{0.0, 0.0};
  double average = 0.0;
  double value_alpha = 0.0;

  double value(double alpha, double beta) const;
  Ball ball() const { return {center, radius}; }
};

struct BallFamily {
  int dim = 1;
  double alpha = 0.0;
  double spacing = 1.0;
  Vec origin{0.0, 0.0};
  std::vector<FamilyBall> balls;  // sorted by (center_u, radius_index)
  bool degenerate_zero = false;
  std::size_t discarded_nonmaximal = 0;
};

/// Deduplicated witnesses. Uncentered: drops witnesses with a concentric
/// larger candidate attaining the same value.
BallFamily optimal_balls(const GridFunction& f, const MaximalField& field);

struct AlphaBetaField {
  GridFunction grid;                   // values: max r^(alpha+beta) f_B
  std::vector<unsigned char> covered;  // 0 where no family closure holds the cell
  std::vector<int> witness;            // family index or -1
  double alpha = 0.0;
  double beta = 0.0;
};

/// Throws BetaOutOfRange unless -1 <= alpha + beta < d.
AlphaBetaField m_alpha_beta(const GridFunction& f, const BallFamily& family, double beta);

struct VectorField {
  int dim = 1;
  std::array<long, 2> shape{1, 1};
  double spacing = 1.0;
  std::vector<Vec> grad;

  std::vector<double> magnitude() const;
};

/// Central differences inside the box, one-sided at its faces. Needs >= 3
/// cells per axis.
VectorField gradient_field(const GridFunction& field_values);

/// Allowance for comparing finite differences of a kinked field:
/// 4 h^(1/2) (1 + |f|_inf).
double fd_tolerance(double h, double f_sup);

struct GradientBoundReport {
  std::vector<double> lhs;
  std::vector<double> rhs;
  double tolerance = 0.0;
  double max_margin = 0.0;  // max(lhs - rhs - tol, 0)
  double max_excess = 0.0;  // max(lhs - rhs, 0)
  long violations = 0;
  long interior_cells = 0;
  long interior_violations = 0;
};

GradientBoundReport gradient_bound_check(const GridFunction& f, const MaximalField& field);

struct LipschitzReport {
  double r0 = 0.0;
  double constant = 0.0;  // sigma_d^-1 r0^(alpha-d) var f
  double max_difference = 0.0;
  double allowed = 0.0;   // constant h + tol(h) h
  bool ok = false;
};

/// Throws ZeroFunction when the enclosing ball carries no mass.
LipschitzReport lipschitz_check(const GridFunction& f, const MaximalField& field, const Ball& test,
                                const Ball& enclosing);

/// Three-alternatives property for a pair of family balls.
struct AlternativesResult {
  bool disjoint = false;
  bool ranges_disjoint = false;
  bool radii_comparable = false;
  bool ok() const { return disjoint || ranges_disjoint || radii_comparable; }
};

double alternatives_constant(int dim, double alpha);  // (3^(d-alpha) 2)^(1/alpha)
AlternativesResult three_alternatives(const GridFunction& f, const FamilyBall& b,
                                      const FamilyBall& a, double alpha);

}  // namespace fracmax
