#include "fracmax/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fracmax/error.hpp"
#include "json.hpp"

namespace fracmax {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {


json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_double(const json& j, const char* what) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw Error(ErrorCode::Io, std::string("bad number for ") + what + ": " + s);
  }
  if (!j.is_number()) throw Error(ErrorCode::Io, std::string("bad number for ") + what);
  return j.get<double>();
}

json parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

std::uint64_t swap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int k = 0; k < 8; ++k) r = (r << 8) | ((v >> (8 * k)) & 0xff);
  return r;
}

std::vector<double> read_binary(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), 8)) throw Error(ErrorCode::Io, "short data file " + path.string());
    if constexpr (std::endian::native == std::endian::big) bits = swap64(bits);
    out[i] = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::Io, "trailing bytes in " + path.string());
  return out;
}

void write_binary(const fs::path& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = swap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), 8);
  }
  if (!out) throw Error(ErrorCode::Io, "write failed " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed " + path.string());
}

json vec_json(const Vec& v, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(v[k]);
  return a;
}

json grid_manifest(const GridFunction& f) {
  json j;
  j["dim"] = f.dim;
  j["shape"] = json::array();
  for (int k = 0; k < f.dim; ++k) j["shape"].push_back(f.shape[k]);
  j["spacing"] = f.spacing;
  j["origin"] = vec_json(f.origin, f.dim);
  return j;
}

void store_grid(const GridFunction& f, const fs::path& manifest, bool inline_data) {
  json j = grid_manifest(f);
  if (inline_data) {
    j["data_inline"] = f.values;
  } else {
    fs::path bin = manifest;
    bin.replace_extension(".bin");
    write_binary(bin, f.values);
    j["data"] = bin.filename().string();
  }
  write_text(manifest, j.dump(2) + "\n");
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

json report_json(const VerificationReport& r) {
  json j;
  j["id"] = to_string(r.id);
  j["d"] = r.dim;
  j["alpha"] = number(r.alpha);
  j["beta"] = number(r.beta);
  j["p"] = number(r.p);
  j["p_star"] = number(r.p_star);
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["ratio"] = number(r.ratio);
  j["seed"] = r.seed;
  j["h"] = r.h;
  if (!r.source.empty()) j["source"] = r.source;
  j["flags"] = r.flags;
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = number(v);
  j["extras"] = extras;
  j["cap"] = number(r.cap);
  j["pass"] = r.pass;
  return j;
}

void csv_row(std::ostream& os, const std::string& id, int d, double alpha, double beta, double p, double h,
             double ratio, double cap, bool pass) {
  os << id << ',' << d << ',' << csv_number(alpha) << ',' << csv_number(beta) << ',' << csv_number(p) << ','
     << csv_number(h) << ',' << csv_number(ratio) << ',' << csv_number(cap) << ',' << (pass ? "true" : "false")
     << '\n';
}

constexpr const char* kCsvHeader = "id,d,alpha,beta,p,h,ratio,cap,pass\n";

json cube_json(const DyadicCube& c, int dim) {
  json j;
  j["shift_id"] = c.shift_id;
  j["level"] = c.level;
  j["corner"] = json::array();
  for (int k = 0; k < dim; ++k) j["corner"].push_back(c.index[k]);
  return j;
}

}  // namespace

GridFunction read_grid(const fs::path& manifest) {
  const json j = parse_file(manifest);
  try {
    const int dim = j.at("dim").get<int>();
    if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidGrid, "dim must be 1 or 2");
    const auto shape = j.at("shape").get<std::vector<long>>();
    const double spacing = j.at("spacing").get<double>();
    std::vector<double> origin = j.contains("origin") ? j.at("origin").get<std::vector<double>>()
                                                      : std::vector<double>(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(shape.size()) != dim || static_cast<int>(origin.size()) != dim)
      throw Error(ErrorCode::InvalidGrid, "shape/origin length must equal dim");
    std::size_t count = 1;
    for (long s : shape) {
      if (s <= 0) throw Error(ErrorCode::InvalidGrid, "shape entries must be positive");
      count *= static_cast<std::size_t>(s);
    }
    std::vector<double> values;
    if (j.contains("data_inline")) {
      for (const json& v : j.at("data_inline")) values.push_back(to_double(v, "data_inline"));
    } else if (j.contains("data")) {
      fs::path bin = j.at("data").get<std::string>();
      if (bin.is_relative()) bin = manifest.parent_path() / bin;
      values = read_binary(bin, count);
    } else {
      throw Error(ErrorCode::Io, "manifest has neither data nor data_inline");
    }
    return GridFunction::make(dim, shape, spacing, origin, std::move(values));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, manifest.string() + ": " + e.what());
  }
}

void write_grid(const GridFunction& f, const fs::path& manifest, bool inline_data) {
  store_grid(f, manifest, inline_data);
}

void write_maximal_field(const MaximalField& m, const fs::path& manifest, bool inline_data) {
  store_grid(m.grid, manifest, inline_data);
  json w = json::array();
  for (std::size_t c = 0; c < m.witness.size(); ++c) {
    const Ball b = m.witness_ball(c);
    json e;
    e["center"] = vec_json(b.center, m.grid.dim);
    e["radius"] = b.radius;
    e["avg"] = m.witness[c].average;
    w.push_back(std::move(e));
  }
  fs::path side = manifest;
  side.replace_extension(".witness.json");
  write_text(side, w.dump() + "\n");
}

void write_reports_json(std::ostream& os, const std::vector<VerificationReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) a.push_back(report_json(r));
  os << a.dump(2) << '\n';
}

void write_reports_csv(std::ostream& os, const std::vector<VerificationReport>& reports) {
  os << kCsvHeader;
  for (const auto& r : reports) {
    const std::string id = r.source.empty() ? to_string(r.id) : std::string(to_string(r.id)) + ":" + r.source;
    csv_row(os, id, r.dim, r.alpha, r.beta, r.p, r.h, r.ratio, r.cap, r.pass);
  }
}

void write_sweep_json(std::ostream& os, const SweepResult& s) {
  json j;
  j["pass"] = s.pass;
  j["exact_failures"] = s.exact_failures;
  j["cap_failures"] = s.cap_failures;
  j["drift_failures"] = s.drift_failures;
  json buckets = json::array();
  for (const auto& b : s.buckets) {
    json e;
    e["id"] = to_string(b.id);
    if (!b.source.empty()) e["source"] = b.source;
    e["d"] = b.dim;
    e["alpha"] = number(b.alpha);
    e["beta"] = number(b.beta);
    e["p"] = number(b.p);
    e["h"] = b.h;
    e["count"] = b.count;
    e["max_ratio"] = number(b.max_ratio);
    e["median_ratio"] = number(b.median_ratio);
    e["cap"] = number(b.cap);
    e["pass"] = b.pass;
    buckets.push_back(std::move(e));
  }
  j["buckets"] = std::move(buckets);
  json drift = json::array();
  for (const auto& d : s.drift) {
    json e;
    e["id"] = to_string(d.id);
    e["endpoint"] = d.endpoint;
    e["d"] = d.dim;
    e["alpha"] = number(d.alpha);
    e["beta"] = number(d.beta);
    e["p"] = number(d.p);
    e["ratio_coarse"] = number(d.ratio_coarse);
    e["ratio_fine"] = number(d.ratio_fine);
    e["drift"] = number(d.drift);
    e["pass"] = d.pass;
    drift.push_back(std::move(e));
  }
  j["drift"] = std::move(drift);
  json records = json::array();
  for (const auto& r : s.records) records.push_back(report_json(r));
  j["records"] = std::move(records);
  os << j.dump(2) << '\n';
}

void write_sweep_csv(std::ostream& os, const SweepResult& s) {
  os << kCsvHeader;
  for (const auto& b : s.buckets) {
    const std::string id = b.source.empty() ? to_string(b.id) : std::string(to_string(b.id)) + ":" + b.source;
    csv_row(os, id, b.dim, b.alpha, b.beta, b.p, b.h, b.max_ratio, b.cap, b.pass);
  }
}

CapTable read_caps(const fs::path& path) {
  const json j = parse_file(path);
  CapTable t;
  try {
    t.version = j.at("version").get<int>();
    for (const json& e : j.at("caps")) {
      CapEntry c;
      c.id = parse_inequality(e.at("id").get<std::string>());
      c.dim = e.at("d").get<int>();
      c.alpha = e.contains("alpha") ? to_double(e.at("alpha"), "alpha") : std::nan("");
      c.beta = e.contains("beta") ? to_double(e.at("beta"), "beta") : std::nan("");
      c.p = to_double(e.at("p"), "p");
      c.cap = to_double(e.at("cap"), "cap");
      if (!(c.cap > 0.0)) throw Error(ErrorCode::Io, path.string() + ": caps must be positive");
      t.entries.push_back(c);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
  return t;
}

void write_selection_audit(std::ostream& os, const SelectionAudit& a) {
  json j;
  const int dim = a.family ? a.family->dim : 1;
  json constants;
  constants["C_grid"] = kGridConstant;
  constants["c1"] = a.params.c1;
  constants["c2"] = a.params.c2;
  constants["eps"] = a.params.eps;
  constants["alpha"] = a.alpha;
  constants["beta"] = a.beta;
  constants["c3"] = a.params.c3(dim, a.alpha, a.beta);
  constants["sandwich_lower"] = a.params.sandwich_lower(dim, a.alpha);
  constants["sandwich_lower_derived"] = a.params.sandwich_lower_derived(dim, a.alpha);
  constants["sandwich_upper"] = a.params.sandwich_upper();
  if (a.windows) {
    json w;
    w["average"] = {a.windows->average_lo, a.windows->average_hi};
    w["side"] = {a.windows->side_lo, a.windows->side_hi};
    w["ancestor_hi"] = a.windows->ancestor_hi;
    w["allowance"] = a.windows->allowance;
    constants["ratio_windows"] = std::move(w);
  }
  j["constants"] = std::move(constants);

  if (a.family && a.greedy) {
    const auto& g = *a.greedy;
    json greedy;
    greedy["K"] = g.K;
    greedy["active"] = g.active;
    greedy["selected"] = g.selected;
    greedy["selected_layer"] = g.selected_layer;
    json balls = json::array();
    for (std::size_t i : g.selected) {
      const FamilyBall& b = a.family->balls[i];
      json e;
      e["id"] = i;
      e["center"] = vec_json(b.center, dim);
      e["radius"] = b.radius;
      e["value"] = b.value(a.alpha, a.beta);
      balls.push_back(std::move(e));
    }
    greedy["selected_balls"] = std::move(balls);
    json pairs = json::array();
    for (const auto& p : g.pairs) pairs.push_back({{"a", p.a}, {"b", p.b}, {"label", to_string(p.label)}});
    greedy["pairs"] = std::move(pairs);
    json cover = json::array();
    for (const auto& c : g.cover) {
      json e;
      e["ball"] = c.ball;
      e["witness"] = c.witness;
      e["layer"] = c.layer;
      e["radius_ratio"] = number(c.radius_ratio);
      e["sandwich_ok"] = c.sandwich_ok;
      e["sandwich_derived_ok"] = c.sandwich_derived_ok;
      e["value_ratio"] = number(c.value_ratio);
      e["value_ok"] = c.value_ok;
      cover.push_back(std::move(e));
    }
    greedy["cover"] = std::move(cover);
    greedy["violations"] = {{"pairs", g.pair_violations},
                            {"uncovered", g.uncovered},
                            {"sandwich", g.sandwich_violations},
                            {"sandwich_derived", g.sandwich_derived_violations},
                            {"value", g.value_violations}};
    j["greedy"] = std::move(greedy);
  }

  if (a.representatives) {
    const auto& r = *a.representatives;
    json rep;
    json sel = json::array();
    for (std::size_t i = 0; i < r.selected.size(); ++i) {
      json e = cube_json(r.selected[i].cube, dim);
      e["generation"] = r.generation[i];
      e["f_Q"] = r.selected[i].f_q;
      sel.push_back(std::move(e));
    }
    rep["selected"] = std::move(sel);
    json hat = json::array();
    for (const auto& c : r.hat) hat.push_back(cube_json(c.cube, dim));
    rep["hat"] = std::move(hat);
    rep["mode"] = to_string(r.mode);
    rep["screened"] = r.screened;
    rep["active"] = r.active;
    rep["pair_checks"] = r.pair_checks;
    rep["violations"] = {{"uncovered", r.uncovered}, {"trichotomy", r.trichotomy_violations}};
    j["representatives"] = std::move(rep);
  }

  if (!a.transfers.empty()) {
    json t = json::array();
    long bad = 0;
    for (std::size_t i = 0; i < a.transfers.size(); ++i) {
      const auto& r = a.transfers[i];
      json e;
      e["ball"] = i;
      e["skipped"] = r.skipped;
      if (!r.skipped) {
        e["cube"] = cube_json(r.cube, dim);
        e["average_ratio"] = number(r.average_ratio);
        e["side_ratio"] = number(r.side_ratio);
        e["max_ancestor_ratio"] = number(r.max_ancestor_ratio);
        e["ancestors"] = r.ancestors;
        e["ok"] = r.ok;
        if (!r.ok) ++bad;
      }
      t.push_back(std::move(e));
    }
    j["transfer"] = {{"records", std::move(t)}, {"violations", bad}};
  }
  os << j.dump(2) << '\n';
}

}  // namespace fracmax
