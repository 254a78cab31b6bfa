#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "fracmax/error.hpp"
#include "fracmax/fixtures.hpp"
#include "fracmax/io.hpp"
#include "json.hpp"

using namespace fracmax;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fracmax_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("grid files round-trip bit for bit") {
  const std::vector<double> awkward{0.1, 1.0 / 3.0, 5e-324, 1e308, 0.0, 2.0 / 7.0};
  const GridFunction f1 = GridFunction::make(1, std::vector<long>{6}, 0.1, std::vector<double>{-0.3}, awkward);
  const GridFunction f2 = random_cells(2, 9, 5);
  for (const GridFunction* f : {&f1, &f2})
    for (bool inl : {false, true}) {
      const fs::path m = scratch(std::string("grid") + std::to_string(f->dim) + (inl ? "i" : "b") + ".json");
      write_grid(*f, m, inl);
      const GridFunction g = read_grid(m);
      CHECK(g.dim == f->dim);
      CHECK(g.shape == f->shape);
      CHECK(g.spacing == f->spacing);
      CHECK(g.origin == f->origin);
      CHECK(bit_equal(g.values, f->values));
    }
  const fs::path m = scratch("grid1b.json");
  CHECK(fs::file_size(scratch("grid1b.bin")) == 6 * 8);
  const auto j = nlohmann::json::parse(slurp(m));
  CHECK(j["data"] == "grid1b.bin");
  CHECK(j["shape"] == nlohmann::json::array({6}));
}

TEST_CASE("grid files are little-endian binary64") {
  const GridFunction f = GridFunction::make(1, std::vector<long>{1}, 1.0, std::vector<double>{0.0}, {1.0});
  write_grid(f, scratch("one.json"));
  const std::string bytes = slurp(scratch("one.bin"));
  const unsigned char expect[8] = {0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
  REQUIRE(bytes.size() == 8);
  CHECK(std::memcmp(bytes.data(), expect, 8) == 0);
}

TEST_CASE("malformed grid files") {
  CHECK_THROWS_AS(read_grid(scratch("missing.json")), Error);
  std::ofstream(scratch("short.json")) << R"({"dim":1,"shape":[3],"spacing":1,"origin":[0],"data_inline":[1,2]})";
  try {
    read_grid(scratch("short.json"));
    FAIL("expected InvalidGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidGrid);
  }
  std::ofstream(scratch("neg.json")) << R"({"dim":1,"shape":[2],"spacing":1,"origin":[0],"data_inline":[1,-2]})";
  CHECK_THROWS_AS(read_grid(scratch("neg.json")), Error);
  std::ofstream(scratch("trunc.bin"), std::ios::binary) << "1234";
  std::ofstream(scratch("trunc.json")) << R"({"dim":1,"shape":[1],"spacing":1,"origin":[0],"data":"trunc.bin"})";
  try {
    read_grid(scratch("trunc.json"));
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("maximal field sidecar") {
  const GridFunction f = indicator(1, 8, 0.25, -0.5, 0.0, 1.0);
  const MaximalField m = frac_max(f, 0.5, Flavor::Centered, RadiusGrid::linear_for(f));
  write_maximal_field(m, scratch("field.json"));
  const auto w = nlohmann::json::parse(slurp(scratch("field.witness.json")));
  REQUIRE(w.size() == 8);
  for (std::size_t c = 0; c < 8; ++c) {
    CHECK(w[c]["center"][0].get<double>() == m.witness_ball(c).center[0]);
    CHECK(w[c]["radius"].get<double>() == m.witness[c].radius);
    CHECK(w[c]["avg"].get<double>() == m.witness[c].average);
  }
  CHECK(bit_equal(read_grid(scratch("field.json")).values, m.grid.values));
}

TEST_CASE("report CSV") {
  VerificationReport r;
  r.id = InequalityId::FiniteDyadicLinear;
  r.alpha = 0.5;
  r.beta = std::nan("");
  r.p = std::numeric_limits<double>::infinity();
  r.h = 0.125;
  r.ratio = 0.75;
  r.cap = 2.0;
  std::ostringstream os;
  write_reports_csv(os, {r});
  CHECK(os.str() == "id,d,alpha,beta,p,h,ratio,cap,pass\nfinitedyadiclinear,1,0.5,,inf,0.125,0.75,2,true\n");
  std::ostringstream js;
  write_reports_json(js, {r});
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j[0]["p"] == "inf");
  CHECK(j[0]["beta"].is_null());
}

TEST_CASE("cap tables") {
  std::ofstream(scratch("caps.json")) << R"({"version": 3, "history": [],
    "caps": [{"id": "finitedyadiclinear", "d": 1, "alpha": 0.5, "beta": null, "p": "inf", "cap": 4},
             {"id": "theo_mfdr", "d": 1, "alpha": 0.25, "beta": -1, "p": 2, "cap": 1.5}]})";
  const CapTable t = read_caps(scratch("caps.json"));
  CHECK(t.version == 3);
  REQUIRE(t.entries.size() == 2);
  VerificationReport r;
  r.id = InequalityId::FiniteDyadicLinear;
  r.alpha = 0.5;
  r.beta = std::nan("");
  r.p = std::numeric_limits<double>::infinity();
  CHECK(t.find(r).value() == 4.0);
  r.p = 2.0;
  CHECK_FALSE(t.find(r).has_value());
  r.id = InequalityId::TheoMfdr;
  r.alpha = 0.25;
  r.beta = -1.0;
  CHECK(t.find(r).value() == 1.5);
  std::ofstream(scratch("badcaps.json")) << R"({"version": 1, "caps": [{"id": "nope", "d": 1, "p": 1, "cap": 1}]})";
  CHECK_THROWS_AS(read_caps(scratch("badcaps.json")), Error);
}
