#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fracmax/dyadic.hpp"
#include "fracmax/error.hpp"
#include "fracmax/fixtures.hpp"
#include "fracmax/geometry.hpp"
#include "fracmax/io.hpp"
#include "fracmax/maximal.hpp"
#include "fracmax/parallel.hpp"
#include "fracmax/selection.hpp"
#include "fracmax/verify.hpp"
#include "json.hpp"

namespace fracmax::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Usage("not a number: " + s);
  }
  if (used != s.size()) throw Usage("not a number: " + s);
  return v;
}

std::vector<double> parse_numbers(const std::vector<std::string>& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(parse_number(s));
  return out;
}

// Output sink: "-" is the caller's stream, anything else a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::Io, "cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

bool on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// JSON config keys are the long flag names; flags given on the command line win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw Usage("cannot open config " + *path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Usage("bad config " + *path + ": " + e.what());
  }
  if (!j.is_object()) throw Usage("config must be a JSON object");
  auto token = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || on_command_line(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) extra.push_back(flag + "=" + token(v));
    } else if (!value.is_null()) {
      extra.push_back(flag + "=" + token(value));
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

struct Common {
  std::string input;
  std::string fixture;
  int dim = 1;
  double spacing = 1.0 / 64;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out = "-";
  std::string csv;
  std::string config;
};

GridFunction load_input(const Common& c) {
  if (!c.input.empty() && !c.fixture.empty()) throw Usage("--input and --fixture are exclusive");
  if (!c.input.empty()) {
    if (!fs::exists(c.input)) throw Error(ErrorCode::Io, "no such file: " + c.input);
    return read_grid(c.input);
  }
  if (c.fixture.empty()) throw Usage("one of --input or --fixture is required");
  if (c.dim != 1 && c.dim != 2) throw Usage("--dim must be 1 or 2");
  if (c.fixture == "unit_step") {
    const long n = std::lround(3.0 / c.spacing);
    return indicator(c.dim, n, c.spacing, -1.0, 0.0, 1.0);
  }
  FixtureSpec s;
  s.dim = c.dim;
  s.spacing = c.spacing;
  s.box_lo = {-1.0, -1.0};
  s.box_len = 3.0;
  s.generator = parse_generator(c.fixture);
  s.seed = c.seed;
  return make_fixture(s);
}

RadiusGrid ladder(const GridFunction& f, const std::string& kind, int steps) {
  if (kind == "linear") return RadiusGrid::linear_for(f);
  if (kind == "geometric") return RadiusGrid::geometric_for(f, steps);
  throw Usage("--radii must be linear or geometric");
}

void add_common(CLI::App* app, Common& c, bool input = true) {
  if (input) {
    app->add_option("--input", c.input, "GridFunction manifest");
    app->add_option("--fixture", c.fixture, "Built-in fixture: unit_step, indicators, staircase, bumps, noise");
    app->add_option("--dim", c.dim, "Fixture dimension");
    app->add_option("--spacing", c.spacing, "Fixture cell size");
  }
  app->add_option("--seed", c.seed, "Seed");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  app->add_option("--out", c.out, "Output path ('-' for stdout)");
  app->add_option("--emit-csv", c.csv, "Also write a CSV summary here");
  app->add_option("--config", c.config, "JSON config; keys are flag names");
}

std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  const std::string stem = p.stem().string();
  p.replace_filename(stem + suffix + p.extension().string());
  return p.string();
}

// maxfun ----------------------------------------------------------------------

struct MaxfunArgs {
  Common c;
  double alpha = 0.0;
  std::string flavor = "uncentered";
  std::string radii = "linear";
  int steps = 4;
  bool inline_data = false;
};

int cmd_maxfun(const MaxfunArgs& a, std::ostream& out) {
  if (a.c.out.empty() || a.c.out == "-") throw Usage("maxfun needs --out <manifest path>");
  const GridFunction f = load_input(a.c);
  const RadiusGrid radii = ladder(f, a.radii, a.steps);
  std::vector<Flavor> flavors;
  if (a.flavor == "both") {
    flavors = {Flavor::Centered, Flavor::Uncentered};
  } else {
    flavors = {parse_flavor(a.flavor)};
  }
  for (Flavor fl : flavors) {
    const MaximalField m = frac_max(f, a.alpha, fl, radii);
    const std::string path = flavors.size() > 1 ? sibling(a.c.out, std::string("_") + to_string(fl)) : a.c.out;
    write_maximal_field(m, path, a.inline_data);
    out << path << '\n';
  }
  return kExitPass;
}

// qalpha ----------------------------------------------------------------------

struct QalphaArgs {
  Common c;
  double alpha = 0.0;
  bool q0 = false;
};

int cmd_qalpha(const QalphaArgs& a, std::ostream& out) {
  if (a.q0 && a.alpha != 0.0) throw Usage("--q0 selects alpha = 0; drop --alpha");
  if (!a.q0 && a.alpha == 0.0)
    throw Usage("alpha = 0 is not a fractional operator; use --q0 for the Q_0 tower (Q_0-only mode)");
  const GridFunction f = load_input(a.c);
  std::vector<CubeStats> cubes;
  if (f.max_value() > 0.0) {
    const DyadicTower t(f, a.q0 ? 0.0 : a.alpha);
    for (int level = t.level_top(); level >= t.level_min(); --level)
      for (const DyadicCube& q : t.cubes_at(level))
        if (a.q0 ? t.in_q0(q) : t.in_q_alpha(q)) cubes.push_back(t.stats(q));
  }
  Sink sink(a.c.out, out);
  write_cube_dump(sink.get(), cubes, f.dim);
  return kExitPass;
}

// verify ----------------------------------------------------------------------

struct VerifyArgs {
  Common c;
  std::vector<std::string> ids;
  std::vector<double> alphas;
  std::vector<double> betas{-1.0, 0.0};
  std::vector<std::string> ps{"1"};
  std::string flavor = "uncentered";
  std::string radii = "linear";
  std::string caps;
  std::optional<double> cap;
  std::string suite;
};

std::vector<VerificationReport> exact_suite() {
  std::vector<VerificationReport> out;
  for (int dim : {1, 2})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const GridFunction f = random_cells(dim, dim == 1 ? 256 : 32, seed);
      auto r = verify_mass_sparse(DyadicTower(f, 0.0));
      r.seed = seed;
      out.push_back(std::move(r));
    }
  const GridFunction step = indicator(1, 768, 1.0 / 256, -1.0, 0.0, 1.0);
  for (double alpha : {0.25, 0.5, 0.75})
    out.push_back(verify_gradient_bound(step, frac_max(step, alpha, Flavor::Uncentered, RadiusGrid::linear_for(step))));
  return out;
}

std::vector<VerificationReport> theorem_records(const VerifyArgs& a, const GridFunction& f,
                                                const std::vector<InequalityId>& ids) {
  const int d = f.dim;
  const Flavor flavor = parse_flavor(a.flavor);
  const std::vector<double> ps = parse_numbers(a.ps);
  const RadiusGrid radii = ladder(f, a.radii, 4);
  auto wants = [&](InequalityId id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };
  std::map<double, MaximalField> fields;
  std::map<double, BallFamily> families;
  std::map<double, std::vector<CubeStats>> qalphas;
  auto field = [&](double alpha) -> const MaximalField& {
    auto it = fields.find(alpha);
    if (it == fields.end()) it = fields.emplace(alpha, frac_max(f, alpha, flavor, radii)).first;
    return it->second;
  };
  auto family = [&](double alpha) -> const BallFamily& {
    auto it = families.find(alpha);
    if (it == families.end()) it = families.emplace(alpha, optimal_balls(f, field(alpha))).first;
    return it->second;
  };
  auto qalpha = [&](double alpha) -> const std::vector<CubeStats>& {
    auto it = qalphas.find(alpha);
    if (it == qalphas.end()) it = qalphas.emplace(alpha, q_alpha_extract(DyadicTower(f, alpha))).first;
    return it->second;
  };

  std::vector<VerificationReport> out;
  auto endpoint = [&](const VerificationReport& src, std::span<const double> values, double vol) {
    if (!wants(InequalityId::EndpointSup)) return;
    auto e = verify_endpoint_sup(values, vol);
    e.source = to_string(src.id);
    e.dim = src.dim;
    e.alpha = src.alpha;
    e.beta = src.beta;
    e.p = src.p;
    e.h = src.h;
    out.push_back(std::move(e));
  };
  std::map<InequalityId, long> produced;
  auto push = [&](VerificationReport r) {
    ++produced[r.id];
    out.push_back(std::move(r));
  };

  const bool needs_alpha = std::any_of(ids.begin(), ids.end(), [](InequalityId id) {
    return id != InequalityId::DensityLow && id != InequalityId::MassSparse && id != InequalityId::EndpointSup;
  });
  if (needs_alpha && a.alphas.empty()) throw Usage("--alpha is required for the requested ids");

  for (double alpha : a.alphas) {
    if (!(alpha > 0.0 && alpha < d)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, d)");
    if (wants(InequalityId::TheoGoal))
      for (double p : ps) {
        if (p < 1.0 || p > d / alpha + kTol) continue;
        auto r = verify_theo_goal(f, field(alpha), p);
        if (std::isinf(r.p_star)) endpoint(r, gradient_field(field(alpha).grid).magnitude(), f.cell_volume());
        push(std::move(r));
      }
    for (double beta : a.betas) {
      const double s = 1.0 + alpha + beta;
      if (s < 0.0 || alpha + beta >= d) continue;
      for (double p : ps) {
        if (p < 1.0 || s > d / p + kTol) continue;
        if (wants(InequalityId::TheoMfdr)) {
          auto r = verify_mfdr(f, family(alpha), beta, p);
          if (std::isinf(r.p_star)) endpoint(r, m_alpha_beta(f, family(alpha), beta).grid.values, f.cell_volume());
          push(std::move(r));
        }
        if (wants(InequalityId::TheoMfdrDyadic)) {
          auto r = verify_mfdrdyadic(f, qalpha(alpha), alpha, beta, p);
          if (std::isinf(r.p_star))
            endpoint(r, dyadic_max_ab(f, alpha, beta, qalpha(alpha)).grid.values, f.cell_volume());
          push(std::move(r));
        }
      }
    }
    if (wants(InequalityId::FiniteDyadicLinear))
      for (double p : ps) {
        if (p < 1.0) continue;
        auto r = verify_finitedyadiclinear(f, qalpha(alpha), alpha, p);
        if (std::isinf(p)) {
          std::vector<double> v;
          for (const auto& cs : qalpha(alpha)) v.push_back(std::ldexp(cs.f_q, -cs.cube.level));
          endpoint(r, v, 0.0);
        }
        push(std::move(r));
      }
    if (wants(InequalityId::GradientBound)) push(verify_gradient_bound(f, field(alpha)));
  }
  if (wants(InequalityId::DensityLow) || wants(InequalityId::MassSparse)) {
    const DyadicTower t0(f, 0.0);
    if (wants(InequalityId::MassSparse)) push(verify_mass_sparse(t0));
    if (wants(InequalityId::DensityLow))
      for (double p : ps)
        if (p >= 1.0 && std::isfinite(p)) push(verify_densitylow(f, p));
  }
  for (InequalityId id : ids)
    if (id != InequalityId::EndpointSup && produced[id] == 0)
      throw Usage(std::string("no valid (alpha, beta, p) combination for ") + to_string(id));
  return out;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  std::vector<VerificationReport> records;
  if (!a.suite.empty()) {
    if (a.suite != "exact") throw Usage("--suite must be exact");
    records = exact_suite();
  } else {
    const GridFunction f = load_input(a.c);
    std::vector<InequalityId> ids;
    if (a.ids.empty()) {
      ids = {InequalityId::TheoGoal,  InequalityId::TheoMfdr,   InequalityId::TheoMfdrDyadic,
             InequalityId::FiniteDyadicLinear, InequalityId::DensityLow, InequalityId::MassSparse};
    } else {
      for (const auto& s : a.ids) ids.push_back(parse_inequality(s));
    }
    records = theorem_records(a, f, ids);
    for (auto& r : records) r.seed = a.c.fixture.empty() ? 0 : a.c.seed;
  }

  std::optional<CapTable> table;
  if (!a.caps.empty()) table = read_caps(a.caps);
  for (auto& r : records) {
    if (!is_theorem_level(r.id)) continue;
    std::optional<double> cap = a.cap;
    if (!cap && table) cap = table->find(r);
    if (!cap) {
      r.cap = std::nan("");
      if (table) {
        r.flags.push_back("no_cap");
        r.pass = false;
      } else {
        r.flags.push_back("uncapped");
      }
      continue;
    }
    r.cap = *cap;
    if (!(std::isfinite(r.ratio) && r.ratio <= *cap)) {
      r.flags.push_back("cap_exceeded");
      r.pass = false;
    }
  }

  {
    Sink sink(a.c.out, out);
    write_reports_json(sink.get(), records);
  }
  if (!a.c.csv.empty()) {
    Sink sink(a.c.csv, out);
    write_reports_csv(sink.get(), records);
  }
  const bool pass = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
  return pass ? kExitPass : kExitFail;
}

// sweep -----------------------------------------------------------------------

struct SweepArgs {
  Common c;
  int dim = 1;
  std::vector<std::string> ids;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<std::string> ps;
  int seeds = 50;
  std::optional<double> spacing;
  bool no_refine = false;
  bool no_endpoints = false;
  std::string generator;
  std::string flavor = "uncentered";
  std::string caps;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.dim != 1 && a.dim != 2) throw Usage("--dim must be 1 or 2");
  SweepSpec s = SweepSpec::theorem_suite(a.dim);
  if (!a.ids.empty()) {
    s.ids.clear();
    for (const auto& id : a.ids) s.ids.push_back(parse_inequality(id));
  }
  if (!a.alphas.empty()) s.alphas = a.alphas;
  if (!a.betas.empty()) s.betas = a.betas;
  if (!a.ps.empty()) s.ps = parse_numbers(a.ps);
  for (double alpha : s.alphas)
    if (!(alpha > 0.0 && alpha < a.dim)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, d)");
  for (double p : s.ps)
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidParamRange, "p must be >= 1");
  if (a.seeds < 1) throw Usage("--seeds must be positive");
  s.seeds = a.seeds;
  s.seed0 = a.c.seed;
  if (a.spacing) s.spacing = *a.spacing;
  s.refine = !a.no_refine;
  s.endpoints = !a.no_endpoints;
  if (!a.generator.empty()) s.generator = parse_generator(a.generator);
  s.flavor = parse_flavor(a.flavor);

  CapTable caps;
  std::string caps_path = a.caps;
  if (caps_path.empty() && fs::exists(FRACMAX_DEFAULT_CAPS)) caps_path = FRACMAX_DEFAULT_CAPS;
  if (!caps_path.empty()) caps = read_caps(caps_path);
  else err << "warning: no cap table; every theorem-level bucket fails with no_cap\n";

  const SweepResult res = ensemble_sweep(s, caps);
  {
    Sink sink(a.c.out, out);
    write_sweep_json(sink.get(), res);
  }
  if (!a.c.csv.empty()) {
    Sink sink(a.c.csv, out);
    write_sweep_csv(sink.get(), res);
  }
  return res.pass ? kExitPass : kExitFail;
}

// select ----------------------------------------------------------------------

struct SelectArgs {
  Common c;
  double alpha = 0.0;
  double beta = 0.0;
  std::string flavor = "uncentered";
  std::optional<double> eps;
  std::optional<double> c1;
  std::optional<double> c2;
  std::string representatives = "screened";
};

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const GridFunction f = load_input(a.c);
  const MaximalField m = frac_max(f, a.alpha, parse_flavor(a.flavor), RadiusGrid::linear_for(f));
  const BallFamily fam = optimal_balls(f, m);
  SelectionParams params = SelectionParams::defaults(f, a.alpha, a.beta);
  if (a.eps) params.eps = *a.eps;
  if (a.c1) params.c1 = *a.c1;
  if (a.c2) params.c2 = *a.c2;
  params.validate();
  const GreedySelection g = greedy_disjoint_balls(fam, params, a.alpha, a.beta);
  const auto q = q_alpha_extract(DyadicTower(f, a.alpha));
  const RepresentativeSelection reps = disjoint_cube_representatives(q, f.dim, params.eps, a.alpha,
                                                                    parse_representative_mode(a.representatives));

  SelectionAudit audit;
  audit.family = &fam;
  audit.greedy = &g;
  audit.params = params;
  audit.alpha = a.alpha;
  audit.beta = a.beta;
  audit.representatives = &reps;
  audit.windows = TransferWindows::derive(f.dim, a.alpha, kTransferAllowance);
  long transfer_bad = 0;
  for (std::size_t i = 0; i < fam.balls.size(); ++i) {
    audit.transfers.push_back(transfer_audit(f, fam, i, a.alpha, *audit.windows));
    if (!audit.transfers.back().skipped && !audit.transfers.back().ok) ++transfer_bad;
  }
  Sink sink(a.c.out, out);
  write_selection_audit(sink.get(), audit);
  const long bad = g.pair_violations + g.uncovered + g.sandwich_violations + g.sandwich_derived_violations +
                   g.value_violations + reps.uncovered + reps.trichotomy_violations + transfer_bad;
  return bad == 0 ? kExitPass : kExitFail;
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional maximal functions on grids: operators, dyadic towers and inequality checks", "fracmax"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fracmax 0.1.0");

  MaxfunArgs mx;
  auto* maxfun = app.add_subcommand("maxfun", "Write the fractional maximal field and its witnesses");
  add_common(maxfun, mx.c);
  maxfun->add_option("--alpha", mx.alpha, "Order alpha in (0, d)")->required();
  maxfun->add_option("--flavor", mx.flavor, "centered, uncentered or both");
  maxfun->add_option("--radii", mx.radii, "Radius ladder: linear or geometric");
  maxfun->add_option("--steps-per-octave", mx.steps, "Geometric ladder density");
  maxfun->add_flag("--inline", mx.inline_data, "Store values inline in the manifest");

  QalphaArgs qa;
  auto* qalpha = app.add_subcommand("qalpha", "Dump the Q_alpha cubes as JSON lines");
  add_common(qalpha, qa.c);
  qalpha->add_option("--alpha", qa.alpha, "Order alpha in (0, d)");
  qalpha->add_flag("--q0", qa.q0, "Dump Q_0 instead (alpha = 0)");

  VerifyArgs va;
  std::optional<double> verify_cap;
  auto* verify = app.add_subcommand("verify", "Evaluate inequalities on one input");
  add_common(verify, va.c);
  verify->add_option("--ids", va.ids, "Inequality ids");
  verify->add_option("--alpha", va.alphas, "Alpha values");
  verify->add_option("--beta", va.betas, "Beta values");
  verify->add_option("--p", va.ps, "Exponents (inf allowed)");
  verify->add_option("--flavor", va.flavor, "centered or uncentered");
  verify->add_option("--radii", va.radii, "Radius ladder: linear or geometric");
  verify->add_option("--caps", va.caps, "Cap table (JSON)");
  verify->add_option("--cap", verify_cap, "Uniform cap for theorem-level ratios");
  verify->add_option("--suite", va.suite, "Run a built-in suite instead of --input: exact");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Seeded ensemble sweep with caps and drift");
  add_common(sweep, sa.c, false);
  sweep->add_option("--dim", sa.dim, "Dimension");
  sweep->add_option("--ids", sa.ids, "Inequality ids");
  sweep->add_option("--alpha", sa.alphas, "Alpha values");
  sweep->add_option("--beta", sa.betas, "Beta values");
  sweep->add_option("--p", sa.ps, "Exponents");
  sweep->add_option("--seeds", sa.seeds, "Number of seeds");
  sweep->add_option("--spacing", sa.spacing, "Coarse cell size");
  sweep->add_flag("--no-refine", sa.no_refine, "Skip the h/2 run");
  sweep->add_flag("--no-endpoints", sa.no_endpoints, "Skip endpoint exponents");
  sweep->add_option("--generator", sa.generator, "Force one generator");
  sweep->add_option("--flavor", sa.flavor, "centered or uncentered");
  sweep->add_option("--caps", sa.caps, "Cap table (JSON)");

  SelectArgs se;
  auto* select = app.add_subcommand("select", "Selection audit: greedy balls, cube representatives, transfer");
  add_common(select, se.c);
  select->add_option("--alpha", se.alpha, "Order alpha in (0, d)")->required();
  select->add_option("--beta", se.beta, "Beta");
  select->add_option("--flavor", se.flavor, "centered or uncentered");
  select->add_option("--eps", se.eps, "Activity threshold");
  select->add_option("--c1", se.c1, "Dilation constant (>= 2)");
  select->add_option("--c2", se.c2, "Ratio constant (>= 1)");
  select->add_option("--representatives", se.representatives, "screened (default), literal or cumulative")
      ->check(CLI::IsMember({"literal", "cumulative", "screened"}));

  try {
    std::vector<std::string> args = merge_config(raw);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  } catch (const Usage& e) {
    err << "fracmax: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const Common* common = maxfun->parsed()   ? &mx.c
                           : qalpha->parsed() ? &qa.c
                           : verify->parsed() ? &va.c
                           : sweep->parsed()  ? &sa.c
                                              : &se.c;
    if (common->threads < 0) throw Usage("--threads must be >= 0");
    set_thread_count(common->threads);
    if (maxfun->parsed()) return cmd_maxfun(mx, out);
    if (qalpha->parsed()) return cmd_qalpha(qa, out);
    if (verify->parsed()) {
      va.cap = verify_cap;
      if (va.cap && !(*va.cap > 0.0)) throw Usage("--cap must be positive");
      return cmd_verify(va, out);
    }
    if (sweep->parsed()) return cmd_sweep(sa, out, err);
    return cmd_select(se, out);
  } catch (const Usage& e) {
    err << "fracmax: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "fracmax: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "fracmax: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace fracmax::cli
