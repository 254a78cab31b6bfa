#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "fracmax/dyadic.hpp"
#include "fracmax/error.hpp"
#include "fracmax/fixtures.hpp"
#include "fracmax/geometry.hpp"
#include "fracmax/io.hpp"
#include "fracmax/maximal.hpp"
#include "fracmax/parallel.hpp"
#include "fracmax/selection.hpp"
#include "fracmax/verify.hpp"

namespace py = pybind11;
using namespace fracmax;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridFunction to_grid(const Array& values, double spacing, std::vector<double> origin) {
  const int dim = static_cast<int>(values.ndim());
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidGrid, "values must be a 1-D or 2-D array");
  std::vector<long> shape;
  for (int k = 0; k < dim; ++k) shape.push_back(static_cast<long>(values.shape(k)));
  if (origin.empty()) origin.assign(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> v(values.data(), values.data() + values.size());
  return GridFunction::make(dim, shape, spacing, origin, std::move(v));
}

Array to_array(const GridFunction& g, const std::vector<double>& values) {
  std::vector<py::ssize_t> shape{g.shape[0]};
  if (g.dim == 2) shape.push_back(g.shape[1]);
  Array a(shape);
  std::copy(values.begin(), values.end(), a.mutable_data());
  return a;
}

py::dict cube_dict(const CubeStats& c, int dim) {
  py::dict d;
  d["shift_id"] = c.cube.shift_id;
  d["level"] = c.cube.level;
  d["index"] = dim == 1 ? py::cast(std::vector<long>{c.cube.index[0]})
                        : py::cast(std::vector<long>{c.cube.index[0], c.cube.index[1]});
  d["side"] = cube_side(c.cube);
  d["f_Q"] = c.f_q;
  d["value_alpha"] = c.value_alpha;
  return d;
}

py::dict report_dict(const VerificationReport& r) {
  py::dict d;
  d["id"] = to_string(r.id);
  d["source"] = r.source;
  d["d"] = r.dim;
  d["alpha"] = r.alpha;
  d["beta"] = r.beta;
  d["p"] = r.p;
  d["p_star"] = r.p_star;
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["ratio"] = r.ratio;
  d["h"] = r.h;
  d["seed"] = r.seed;
  d["cap"] = r.cap;
  d["pass"] = r.pass;
  d["flags"] = r.flags;
  d["extras"] = r.extras;
  return d;
}

VerificationReport verify_one(const GridFunction& f, const std::string& id, double alpha, double beta, double p,
                              const std::string& flavor) {
  const Flavor fl = parse_flavor(flavor);
  switch (parse_inequality(id)) {
    case InequalityId::TheoGoal: return verify_theo_goal(f, alpha, p, fl);
    case InequalityId::TheoMfdr: return verify_mfdr(f, alpha, beta, p, fl);
    case InequalityId::TheoMfdrDyadic: return verify_mfdrdyadic(f, alpha, beta, p);
    case InequalityId::FiniteDyadicLinear: return verify_finitedyadiclinear(f, alpha, p);
    case InequalityId::DensityLow: return verify_densitylow(f, p);
    case InequalityId::MassSparse: return verify_mass_sparse(DyadicTower(f, 0.0));
    case InequalityId::GradientBound:
      return verify_gradient_bound(f, frac_max(f, alpha, fl, RadiusGrid::linear_for(f)));
    case InequalityId::EndpointSup: return verify_endpoint_sup(f.values, f.cell_volume());
  }
  throw Error(ErrorCode::InvalidParamRange, "unknown id " + id);
}

}  // namespace

PYBIND11_MODULE(_fracmax, m) {
  m.doc() = "Fractional maximal functions on uniform grids";

  // Messages start with the error code: "InvalidGrid: ...".
  py::register_exception<Error>(m, "FracmaxError", PyExc_ValueError);

  py::class_<GridFunction>(m, "Grid")
      .def(py::init(&to_grid), py::arg("values"), py::arg("spacing"), py::arg("origin") = std::vector<double>{})
      .def_readonly("dim", &GridFunction::dim)
      .def_readonly("spacing", &GridFunction::spacing)
      .def_property_readonly("shape",
                             [](const GridFunction& g) {
                               if (g.dim == 1) return py::tuple(py::make_tuple(g.shape[0]));
                               return py::tuple(py::make_tuple(g.shape[0], g.shape[1]));
                             })
      .def_property_readonly("origin",
                             [](const GridFunction& g) {
                               return std::vector<double>(g.origin.begin(), g.origin.begin() + g.dim);
                             })
      .def_property_readonly("values", [](const GridFunction& g) { return to_array(g, g.values); })
      .def("max", &GridFunction::max_value)
      .def("lp_norm", &GridFunction::lp_norm, py::arg("p"))
      .def("__repr__", [](const GridFunction& g) {
        std::ostringstream os;
        os << "Grid(dim=" << g.dim << ", shape=(" << g.shape[0];
        if (g.dim == 2) os << ", " << g.shape[1];
        os << "), spacing=" << g.spacing << ")";
        return os.str();
      });

  m.def("read_grid", [](const std::string& path) { return read_grid(path); }, py::arg("manifest"));
  m.def("write_grid", [](const GridFunction& f, const std::string& path, bool inline_data) {
    write_grid(f, path, inline_data);
  }, py::arg("grid"), py::arg("manifest"), py::arg("inline_data") = false);

  m.def("quantize", &quantize, py::arg("value"));
  m.def("indicator", &indicator, py::arg("dim"), py::arg("n"), py::arg("spacing"), py::arg("origin"), py::arg("lo"),
        py::arg("hi"));
  m.def("random_cells", &random_cells, py::arg("dim"), py::arg("n"), py::arg("seed"), py::arg("density") = 0.3);
  m.def(
      "fixture",
      [](int dim, double spacing, const std::string& generator, std::uint64_t seed, double box_lo, double box_len) {
        FixtureSpec s;
        s.dim = dim;
        s.spacing = spacing;
        s.generator = parse_generator(generator);
        s.seed = seed;
        s.box_lo = {box_lo, box_lo};
        s.box_len = box_len;
        return make_fixture(s);
      },
      py::arg("dim"), py::arg("spacing"), py::arg("generator") = "bumps", py::arg("seed") = 0,
      py::arg("box_lo") = -1.0, py::arg("box_len") = 3.0);

  m.def("variation", &variation, py::arg("grid"), py::arg("p") = 1.0);
  m.def(
      "coarea_check",
      [](const GridFunction& f) {
        const auto c = coarea_identity_check(f, 0.0, kInfinity);
        return py::make_tuple(c.lhs, c.rhs);
      },
      py::arg("grid"));

  m.def(
      "frac_max",
      [](const GridFunction& f, double alpha, const std::string& flavor, const std::string& radii) {
        if (radii != "linear" && radii != "geometric") throw Error(ErrorCode::InvalidParamRange, "radii: linear or geometric");
        const RadiusGrid r = radii == "linear" ? RadiusGrid::linear_for(f) : RadiusGrid::geometric_for(f);
        const MaximalField mf = frac_max(f, alpha, parse_flavor(flavor), r);
        std::vector<double> rad;
        std::vector<double> avg;
        for (const auto& w : mf.witness) {
          rad.push_back(w.radius);
          avg.push_back(w.average);
        }
        py::dict d;
        d["values"] = to_array(f, mf.grid.values);
        d["radius"] = to_array(f, rad);
        d["average"] = to_array(f, avg);
        return d;
      },
      py::arg("grid"), py::arg("alpha"), py::arg("flavor") = "uncentered", py::arg("radii") = "linear");

  m.def(
      "dyadic_max",
      [](const GridFunction& f, double alpha) { return to_array(f, dyadic_max(f, alpha).grid.values); },
      py::arg("grid"), py::arg("alpha"));

  m.def(
      "q_alpha",
      [](const GridFunction& f, double alpha) {
        const DyadicTower t(f, alpha);
        py::list out;
        for (int L = t.level_top(); L >= t.level_min(); --L)
          for (const auto& c : t.cubes_at(L))
            if (alpha == 0.0 ? t.in_q0(c) : t.in_q_alpha(c)) out.append(cube_dict(t.stats(c), f.dim));
        return out;
      },
      py::arg("grid"), py::arg("alpha"));

  m.def(
      "verify",
      [](const GridFunction& f, const std::string& id, double alpha, double beta, double p, const std::string& flavor) {
        return report_dict(verify_one(f, id, alpha, beta, p, flavor));
      },
      py::arg("grid"), py::arg("id"), py::arg("alpha") = 0.5, py::arg("beta") = -1.0, py::arg("p") = 1.0,
      py::arg("flavor") = "uncentered");

  m.def(
      "_sweep_json",
      [](int dim, std::vector<std::string> ids, int seeds, std::uint64_t seed0, bool refine, bool endpoints,
         const std::string& caps) {
        SweepSpec s = SweepSpec::theorem_suite(dim);
        if (!ids.empty()) {
          s.ids.clear();
          for (const auto& id : ids) s.ids.push_back(parse_inequality(id));
        }
        s.seeds = seeds;
        s.seed0 = seed0;
        s.refine = refine;
        s.endpoints = endpoints;
        const CapTable table = caps.empty() ? CapTable{} : read_caps(caps);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = ensemble_sweep(s, table);
        }
        std::ostringstream os;
        write_sweep_json(os, r);
        return os.str();
      },
      py::arg("dim"), py::arg("ids"), py::arg("seeds"), py::arg("seed0"), py::arg("refine"), py::arg("endpoints"),
      py::arg("caps"));

  m.def(
      "_select_json",
      [](const GridFunction& f, double alpha, double beta, const std::string& representatives) {
        const BallFamily fam = optimal_balls(f, frac_max(f, alpha, Flavor::Uncentered, RadiusGrid::linear_for(f)));
        const SelectionParams params = SelectionParams::defaults(f, alpha, beta);
        const GreedySelection g = greedy_disjoint_balls(fam, params, alpha, beta);
        const RepresentativeSelection reps = disjoint_cube_representatives(
            q_alpha_extract(DyadicTower(f, alpha)), f.dim, params.eps, alpha, parse_representative_mode(representatives));
        SelectionAudit audit;
        audit.family = &fam;
        audit.greedy = &g;
        audit.params = params;
        audit.alpha = alpha;
        audit.beta = beta;
        audit.representatives = &reps;
        audit.windows = TransferWindows::derive(f.dim, alpha, kTransferAllowance);
        for (std::size_t i = 0; i < fam.balls.size(); ++i)
          audit.transfers.push_back(transfer_audit(f, fam, i, alpha, *audit.windows));
        std::ostringstream os;
        write_selection_audit(os, audit);
        return os.str();
      },
      py::arg("grid"), py::arg("alpha"), py::arg("beta"), py::arg("representatives"));

  m.def("set_threads", &set_thread_count, py::arg("n"));
  m.def("threads", &thread_count);
}
