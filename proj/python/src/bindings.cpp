#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hlcalib/calibration.hpp"
#include "hlcalib/g2.hpp"
#include "hlcalib/report.hpp"
#include "hlcalib/spin7.hpp"
#include "hlcalib/variation.hpp"
#include "hlcalib/version.hpp"

namespace py = pybind11;
using namespace hlcalib;

namespace {

Vec<Rational> rational_vec(const std::vector<long>& v) { return to_scalar_vec<Rational>(v); }

std::string exact_residual(const std::string& which, const std::vector<std::vector<long>>& vs) {
  auto want = [&](std::size_t count, std::size_t dim) {
    if (vs.size() != count) throw std::invalid_argument(which + ": expected " + std::to_string(count) + " vectors");
    for (const auto& v : vs)
      if (v.size() != dim) throw std::invalid_argument(which + ": vectors must have length " + std::to_string(dim));
  };
  if (which == "associative") {
    want(3, 7);
    return G2Structure<Rational>().associative_residual(rational_vec(vs[0]), rational_vec(vs[1]), rational_vec(vs[2]))
        .get_str();
  }
  if (which == "coassociative") {
    want(4, 7);
    return G2Structure<Rational>()
        .coassociative_residual(rational_vec(vs[0]), rational_vec(vs[1]), rational_vec(vs[2]), rational_vec(vs[3]))
        .get_str();
  }
  if (which == "cayley") {
    want(4, 8);
    return Spin7Structure<Rational>()
        .cayley_residual(rational_vec(vs[0]), rational_vec(vs[1]), rational_vec(vs[2]), rational_vec(vs[3]))
        .get_str();
  }
  throw std::invalid_argument("unknown identity: " + which);
}

py::dict comass(const std::string& form, int restarts, int iterations, std::uint64_t seed) {
  KForm<double> f(1, 0);
  if (form == "phi")
    f = standard_phi<double>();
  else if (form == "star_phi")
    f = standard_star_phi<double>();
  else if (form == "cayley")
    f = standard_cayley<double>();
  else
    throw std::invalid_argument("unknown form: " + form);
  ComassOptions opt;
  opt.restarts = restarts;
  opt.iterations = iterations;
  opt.seed = seed;
  ComassReport r;
  {
    py::gil_scoped_release release;
    r = comass_estimate(f, f.degree(), opt, form);
  }
  py::dict d;
  d["form"] = r.form_id;
  d["comass"] = r.best_value;
  d["best_frame"] = r.best_frame.vectors;
  d["best_restart"] = r.best_restart;
  d["restarts"] = r.restarts;
  return d;
}

NormalField pick_field(const FlatModel& m, std::optional<std::uint64_t> seed) {
  return seed ? random_normal_field(m, *seed) : canonical_field(m);
}

py::dict compare_dict(const std::string& kind, std::optional<std::uint64_t> seed, double h, int grid, double tol) {
  const FlatModel m = make_model(parse_kind(kind));
  const VariationReport r = compare(m, pick_field(m, seed), h, grid, tol);
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["field"] = r.field;
  d["fd"] = r.fd_value;
  d["fd_error_estimate"] = r.fd_error_estimate;
  d["formula"] = r.formula_value;
  d["ratio"] = r.ratio;
  d["mclean_ratio"] = r.mclean_ratio;
  d["grid"] = r.grid;
  d["pass"] = r.pass;
  return d;
}

std::string run_json(const std::string& command, std::uint64_t seed, int samples, int tuples, int restarts,
                     bool exact, const std::string& phi) {
  RunConfig c;
  c.command = command;
  c.seed = seed;
  c.samples = samples;
  c.tuples = tuples;
  c.restarts = restarts;
  c.scalar_mode = exact ? ScalarMode::Exact : ScalarMode::Float;
  c.phi = phi;
  return to_json(run(c), utc_timestamp());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hlcalib native core";
  m.def("version", &version);
  m.def("kinds", [] {
    std::vector<std::string> out;
    for (ModelKind k : kAllKinds) out.push_back(to_string(k));
    return out;
  });
  m.def("exact_residual", &exact_residual, py::arg("identity"), py::arg("vectors"),
        "Harvey-Lawson residual on integer vectors, as an exact rational string");
  m.def("comass", &comass, py::arg("form"), py::arg("restarts") = 100, py::arg("iterations") = 500,
        py::arg("seed") = 0);
  m.def("compare", &compare_dict, py::arg("kind"), py::arg("seed") = py::none(), py::arg("h") = 1e-2,
        py::arg("grid") = 0, py::arg("tol") = 1e-3);
  m.def(
      "second_variation_formula",
      [](const std::string& kind, std::optional<std::uint64_t> seed) {
        const FlatModel model = make_model(parse_kind(kind));
        return second_variation_formula(model, pick_field(model, seed));
      },
      py::arg("kind"), py::arg("seed") = py::none());
  m.def(
      "jacobi_residual",
      [](const std::string& kind, std::optional<std::uint64_t> seed) {
        const FlatModel model = make_model(parse_kind(kind));
        return jacobi_residual(model, pick_field(model, seed));
      },
      py::arg("kind"), py::arg("seed") = py::none());
  m.def("run_json", &run_json, py::arg("command"), py::arg("seed") = 0, py::arg("samples") = 50,
        py::arg("tuples") = 10000, py::arg("restarts") = 100, py::arg("exact") = true, py::arg("phi") = "");

  py::register_exception<GridError>(m, "GridError", PyExc_ValueError);
  py::register_exception<KindError>(m, "KindError", PyExc_ValueError);
}
