#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "folcal/cases.hpp"
#include "folcal/charforms.hpp"
#include "folcal/comass.hpp"
#include "folcal/folvol.hpp"
#include "folcal/grassmann.hpp"
#include "folcal/report.hpp"

namespace py = pybind11;
using namespace folcal;

// Records cross the boundary as JSON text; the Python side parses them.
namespace {

charforms::Split split_of(int k, int n) { return charforms::Split(k, n); }

exalg::FormExpr named_form(const std::string& name, const charforms::Split& s, const std::string& norm) {
  const auto nm = norm == "pfaffian" ? charforms::Normalization::Pfaffian : charforms::Normalization::PaperLiteral;
  if (norm != "literal" && norm != "pfaffian") throw std::invalid_argument("normalization must be literal or pfaffian");
  if (name == "euler-u") return charforms::euler_form(s, charforms::Block::U, nm);
  if (name == "euler-v") return charforms::euler_form(s, charforms::Block::V, nm);
  if (name == "p1-u") return charforms::pontryagin1(s, charforms::Block::U);
  if (name == "p1-v") return charforms::pontryagin1(s, charforms::Block::V);
  if (name == "te") return charforms::transgression(s);
  if (name == "te-printed") return charforms::transgression_printed(s);
  if (name == "phi") return charforms::calibration_phi(s).form;
  throw std::invalid_argument("unknown form '" + name + "'");
}

folvol::QuadratureSpec quadrature(const std::string& method, int nodes, long samples, const std::vector<double>& eps,
                                  std::uint64_t seed, double h, int workers) {
  folvol::QuadratureSpec q;
  q.method = report::parse_method(method);
  q.nodes = nodes;
  q.samples = samples;
  q.eps = eps;
  q.seed = seed;
  q.h = h;
  q.workers = workers;
  return q;
}

}  // namespace

PYBIND11_MODULE(_folcal, m) {
  m.doc() = "Exact invariant-form identities, comass searches and foliation volumes on spheres.";
  m.attr("__version__") = report::kVersion;

  m.def("case_ids", [] {
    std::vector<std::string> ids;
    for (const auto& c : cases::registry()) ids.push_back(c.id);
    return ids;
  });
  m.def(
      "verify_json",
      [](const std::string& id, int workers) {
        const auto* c = cases::find(id);
        if (!c) throw py::key_error("unknown case '" + id + "'");
        py::gil_scoped_release nogil;
        return cases::run_case(*c, {workers}).dump();
      },
      py::arg("case_id"), py::arg("workers") = 1);

  m.def(
      "form_text",
      [](const std::string& name, int k, int n, const std::string& norm) {
        return named_form(name, split_of(k, n), norm).to_string();
      },
      py::arg("name"), py::arg("k"), py::arg("n"), py::arg("normalization") = "literal");
  m.def(
      "differential_text",
      [](const std::string& name, int k, int n) {
        return exalg::ce_differential(named_form(name, split_of(k, n), "literal")).to_string();
      },
      py::arg("name"), py::arg("k"), py::arg("n"));
  m.def(
      "orthogonality_json",
      [](int k, int n, const std::string& method) {
        const auto meth = method == "reduced" ? charforms::OrthogonalityMethod::SymmetryReduced
                                              : charforms::OrthogonalityMethod::Direct;
        if (method != "direct" && method != "reduced") throw std::invalid_argument("method must be direct or reduced");
        py::gil_scoped_release nogil;
        return report::to_json(charforms::euler_orthogonality(split_of(k, n), meth)).dump();
      },
      py::arg("k"), py::arg("n"), py::arg("method") = "direct");
  m.def(
      "evaluation_table",
      [](const std::string& name, int k, int n) {
        const auto s = split_of(k, n);
        const auto f = named_form(name, s, "literal");
        std::vector<std::tuple<std::vector<int>, std::vector<int>, std::string, double>> out;
        for (const auto& r : comass::evaluation_table(f, grassmann::TangentSpace::grassmann(s), f.degree().value_or(0)))
          out.emplace_back(r.rows, r.cols, r.exact.to_string(), r.value);
        return out;
      },
      py::arg("form"), py::arg("k"), py::arg("n"));
  m.def(
      "evaluate_plane",
      [](const std::string& name, int k, int n, const Eigen::MatrixXd& basis, bool flag) {
        const auto s = split_of(k, n);
        auto space = flag ? grassmann::TangentSpace::flag(s) : grassmann::TangentSpace::grassmann(s);
        if (basis.rows() != space.dim()) throw std::invalid_argument("basis has the wrong number of rows");
        Eigen::MatrixXd b = basis;
        if (!grassmann::orthonormalize(b)) throw std::invalid_argument("basis columns are dependent");
        return comass::evaluate_on_plane(named_form(name, s, "literal"), grassmann::TangentPlane{space, b});
      },
      py::arg("form"), py::arg("k"), py::arg("n"), py::arg("basis"), py::arg("flag") = false);
  m.def(
      "comass_json",
      [](const std::string& name, int k, int n, int restarts, std::uint64_t seed, double tol, int workers) {
        const auto s = split_of(k, n);
        const auto f = named_form(name, s, "literal");
        const auto space = name == "phi" ? grassmann::TangentSpace::flag(s) : grassmann::TangentSpace::grassmann(s);
        comass::MaximizeOptions opt;
        opt.restarts = restarts;
        opt.seed = seed;
        opt.tol = tol;
        opt.workers = workers;
        py::gil_scoped_release nogil;
        return report::to_json(comass::maximize(f, space, f.degree().value_or(0), opt)).dump();
      },
      py::arg("form"), py::arg("k"), py::arg("n"), py::arg("restarts") = 64, py::arg("seed") = 1,
      py::arg("tol") = 1e-10, py::arg("workers") = 1);
  m.def(
      "mixed_scan_json",
      [](int grid, double c) { return report::to_json(comass::mixed_vertical_scan(grid, c)).dump(); },
      py::arg("grid") = 9, py::arg("comass_constant") = 1.0);

  m.def(
      "gauss_jacobian",
      [](const std::string& model, const Eigen::VectorXd& p, double h) {
        return folvol::gauss_jacobian(folvol::FoliationModel::parse(model), p, h);
      },
      py::arg("model"), py::arg("p"), py::arg("h") = 1e-5);
  m.def(
      "leaf_tangent",
      [](const std::string& model, const Eigen::VectorXd& p) {
        return folvol::leaf_tangent(folvol::FoliationModel::parse(model), p);
      },
      py::arg("model"), py::arg("p"));
  m.def(
      "volume_json",
      [](const std::string& model, const std::string& method, int nodes, long samples, const std::vector<double>& eps,
         std::uint64_t seed, double h, int workers) {
        const auto mdl = folvol::FoliationModel::parse(model);
        const auto q = quadrature(method, nodes, samples, eps, seed, h, workers);
        py::gil_scoped_release nogil;
        return report::to_json(folvol::foliation_volume(mdl, q)).dump();
      },
      py::arg("model"), py::arg("method") = "profile", py::arg("nodes") = 48, py::arg("samples") = 200000,
      py::arg("eps") = std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5}, py::arg("seed") = 1, py::arg("h") = 1e-5,
      py::arg("workers") = 1);
  m.def(
      "ratio_json",
      [](const std::string& a, const std::string& b, const std::string& method, int nodes, long samples,
         std::uint64_t seed, int workers) {
        const auto ma = folvol::FoliationModel::parse(a), mb = folvol::FoliationModel::parse(b);
        const auto q = quadrature(method, nodes, samples, {1e-2, 1e-3, 1e-4, 1e-5}, seed, 1e-5, workers);
        py::gil_scoped_release nogil;
        return report::to_json(folvol::volume_ratio(ma, mb, q)).dump();
      },
      py::arg("a"), py::arg("b"), py::arg("method") = "profile", py::arg("nodes") = 48, py::arg("samples") = 200000,
      py::arg("seed") = 1, py::arg("workers") = 1);
  m.def("sphere_volume", &folvol::sphere_volume, py::arg("d"));
}
