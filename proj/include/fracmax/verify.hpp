#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracmax/dyadic.hpp"
#include "fracmax/fixtures.hpp"
#include "fracmax/maximal.hpp"

namespace fracmax {

enum class InequalityId {
  TheoGoal,
  TheoMfdr,
  TheoMfdrDyadic,
  FiniteDyadicLinear,
  DensityLow,
  MassSparse,
  GradientBound,
  EndpointSup,
};

const char* to_string(InequalityId id);
InequalityId parse_inequality(const std::string& s);  // InvalidParamRange on unknown ids
bool is_theorem_level(InequalityId id);

struct VerificationReport {
  InequalityId id = InequalityId::TheoGoal;
  int dim = 1;
  double alpha = 0.0;  // NaN when the id has no alpha
  double beta = 0.0;   // NaN when the id has no beta
  double p = 1.0;
  double p_star = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  double h = 0.0;
  std::string source;  // endpoint_sup: id whose left-hand field was tested
  std::vector<std::string> flags;
  std::map<std::string, double> extras;
  double cap = 0.0;  // NaN when no cap applies
  bool pass = true;
};

/// (1/p - s/d)^-1; +inf at the endpoint p = d/s (1e-12 tolerance).
double sobolev_exponent(int dim, double s, double p);
bool at_endpoint(int dim, double s, double p);

/// Grid L^q norm (sum |v|^q cell_volume)^(1/q); q = inf gives max |v|.
double grid_norm(std::span<const double> values, double cell_volume, double q);
/// Sequence l^q norm; q = inf gives max |a|.
double sequence_norm(std::span<const double> a, double q);

/// |grad M_alpha f|_{p*} against variation_p(f). Endpoint p = d/alpha uses the sup.
VerificationReport verify_theo_goal(const GridFunction& f, const MaximalField& field, double p);
VerificationReport verify_theo_goal(const GridFunction& f, double alpha, double p, Flavor flavor);

/// |M_{alpha,beta} f|_{p*} with p* from 1 + alpha + beta. The endpoint uses the
/// sup of r^(alpha+beta) f_B over the optimal balls.
VerificationReport verify_mfdr(const GridFunction& f, const BallFamily& family, double beta, double p);
VerificationReport verify_mfdr(const GridFunction& f, double alpha, double beta, double p, Flavor flavor);

/// Dyadic analogue over Q_alpha. Extras: chain_lhs = (sum |Q| (sle^(a+b) f_Q)^p*)^(1/p*)
/// and chain_rhs = (sum (sle^(d/p-1) f_Q)^p)^(1/p); flag chain_violation if
/// lhs > chain_lhs or chain_lhs > chain_rhs beyond rounding.
VerificationReport verify_mfdrdyadic(const GridFunction& f, std::span<const CubeStats> q_alpha, double alpha,
                                     double beta, double p);
VerificationReport verify_mfdrdyadic(const GridFunction& f, double alpha, double beta, double p);

/// (sum_{Q_alpha} (sle^(d/p-1) f_Q)^p)^(1/p) against variation_p(f); p = inf
/// uses sup sle^-1 f_Q.
VerificationReport verify_finitedyadiclinear(const GridFunction& f, std::span<const CubeStats> q_alpha, double alpha,
                                             double p);
VerificationReport verify_finitedyadiclinear(const GridFunction& f, double alpha, double p);

/// sum_{Q in family} (sle^(d/p-1) (f_Q - lambda_Q^Q))^p against variation_p(f)^p.
/// The tower must have alpha = 0; throws NotInQ0 for family cubes outside Q_0.
VerificationReport verify_densitylow(const GridFunction& f, const DyadicTower& tower0,
                                     std::span<const DyadicCube> family, double p);
/// Family = every Q_0 cube of the tower.
VerificationReport verify_densitylow(const GridFunction& f, double p);

/// Mass bound over every Q_0 cube: lhs/rhs = worst ratio, pass iff every cube holds.
VerificationReport verify_mass_sparse(const DyadicTower& tower0);

/// Pointwise gradient bound; lhs = max excess over rhs, pass iff no violation.
VerificationReport verify_gradient_bound(const GridFunction& f, const MaximalField& field);

/// L^q -> L^inf consistency of an endpoint field: the sup extrapolated from
/// |g|_4, |g|_8, |g|_16 against the sup itself, pass iff within 5%. `cell_volume` 0 selects sequence norms.
VerificationReport verify_endpoint_sup(std::span<const double> values, double cell_volume);

struct CapEntry {
  InequalityId id = InequalityId::TheoGoal;
  int dim = 1;
  double alpha = 0.0;  // NaN matches records without alpha
  double beta = 0.0;   // NaN matches records without beta
  double p = 1.0;
  double cap = 0.0;
};

struct CapTable {
  int version = 0;
  std::vector<CapEntry> entries;
  std::optional<double> find(const VerificationReport& r) const;
};

struct SweepSpec {
  int dim = 1;
  std::vector<InequalityId> ids;
  std::vector<double> alphas{0.25, 0.5, 0.75};
  std::vector<double> betas{-1.0, 0.0};
  std::vector<double> ps{1.0, 2.0};
  bool endpoints = true;
  std::uint64_t seed0 = 0;
  int seeds = 50;
  double spacing = 1.0 / 128;
  bool refine = true;  // also run at spacing / 2
  Flavor flavor = Flavor::Uncentered;
  std::optional<Generator> generator;  // default: staircase/indicators for p = 1, bumps otherwise
  double box_lo = -1.0;
  double box_len = 3.0;
  double support_lo = 0.0;
  double support_len = 1.0;

  static SweepSpec theorem_suite(int dim);
};

struct BucketSummary {
  InequalityId id = InequalityId::TheoGoal;
  std::string source;
  int dim = 1;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 1.0;
  double h = 0.0;
  long count = 0;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  double cap = 0.0;
  bool pass = true;
};

struct DriftRow {
  InequalityId id = InequalityId::TheoGoal;
  bool endpoint = false;  // informational; not part of the sweep verdict
  int dim = 1;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 1.0;
  double ratio_coarse = 0.0;
  double ratio_fine = 0.0;
  double drift = 0.0;  // |fine - coarse| / coarse
  bool pass = true;
};

inline constexpr double kDriftLimit = 0.10;

struct SweepResult {
  std::vector<VerificationReport> records;  // ordered by (h, seed, id, params)
  std::vector<BucketSummary> buckets;
  std::vector<DriftRow> drift;
  long exact_failures = 0;
  long cap_failures = 0;
  long drift_failures = 0;
  bool pass = true;
};

/// Runs every valid (id, alpha, beta, p) combination over the seeds at one or
/// two resolutions. Seeds run in parallel; the fold is ordered, so the result
/// does not depend on the thread count.
SweepResult ensemble_sweep(const SweepSpec& spec, const CapTable& caps);

}  // namespace fracmax
