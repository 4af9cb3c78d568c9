// folcal: batch front end for the verification cases, comass searches and
// foliation volumes. JSON on stdout (or --out / $FOLCAL_OUT_DIR), CSV for
// tables. Exit codes: 0 pass, 1 verification failure, 2 usage error.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "folcal/cases.hpp"
#include "folcal/report.hpp"

using namespace folcal;
using report::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  int workers = 1;
  std::string out;
  bool slow = false;
};

charforms::Split parse_split(const std::string& s) {
  int k = 0, n = 0;
  char comma = 0;
  std::istringstream in(s);
  if (!(in >> k >> comma >> n) || comma != ',' || !in.eof()) throw UsageError("--split expects k,n, got '" + s + "'");
  try {
    return charforms::Split(k, n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// --samples accepts 1e6 as well as 1000000
long parse_count(double v, const char* flag) {
  if (!(v >= 1.0) || v > 1e12 || std::floor(v) != v) throw UsageError(std::string(flag) + " must be a positive integer");
  return static_cast<long>(v);
}

void emit_text(const Global& g, const std::string& stem, const std::string& ext, const std::string& text) {
  std::string path = g.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("FOLCAL_OUT_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (stem + ext)).string();
    }
  }
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  std::cerr << "wrote " << path << "\n";
}

void emit_json(const Global& g, const std::string& stem, json doc, std::chrono::steady_clock::time_point t0) {
  doc["elapsed_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  emit_text(g, stem, ".json", doc.dump(2) + "\n");
}

std::string fmt_double(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::vector<std::string> ids;
  bool all = false;
  bool list = false;
};

int run_verify(const Global& g, const VerifyArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.list) {
    for (const auto& c : cases::registry())
      std::cout << c.id << (c.slow ? "  [slow]" : "") << "  " << c.description << "\n";
    return kPass;
  }
  if (a.ids.empty() && !a.all) throw UsageError("verify needs case ids or --all");
  std::vector<const cases::VerificationCase*> todo;
  json skipped = json::array();
  if (a.all) {
    for (const auto& c : cases::registry()) {
      if (c.slow && !g.slow)
        skipped.push_back(c.id);
      else
        todo.push_back(&c);
    }
  }
  for (const auto& id : a.ids) {
    const auto* c = cases::find(id);
    if (!c) throw UsageError("unknown case '" + id + "' (see verify --list)");
    if (c->slow && !g.slow) throw UsageError("case '" + id + "' is slow; pass --slow");
    if (std::find(todo.begin(), todo.end(), c) == todo.end()) todo.push_back(c);
  }
  json verdicts = json::array();
  int failed = 0;
  std::string anchors;
  for (const auto* c : todo) {
    json v = cases::run_case(*c, {g.workers});
    if (!v["pass"].get<bool>()) ++failed;
    std::cerr << (v["pass"].get<bool>() ? "pass  " : "FAIL  ") << c->id << "\n";
    if (!anchors.empty()) anchors += "; ";
    anchors += c->anchor;
    verdicts.push_back(std::move(v));
  }
  json config = {{"cases", a.ids}, {"all", a.all}, {"slow", g.slow}, {"workers", g.workers}};
  json result = {{"passed", static_cast<int>(todo.size()) - failed}, {"failed", failed}, {"skipped", skipped},
                 {"cases", verdicts}};
  const std::string stem = todo.size() == 1 ? "verify-" + todo.front()->id : "verify";
  emit_json(g, stem, report::envelope("verify", config, 0, todo.size() == 1 ? anchors : "registry", result), t0);
  return failed ? kFail : kPass;
}

// ------------------------------------------------------------------ table

struct TableArgs {
  std::string split = "4,8";
  std::string form = "euler-v";
  std::string plucker;
  std::uint64_t seed = 1;
  std::string normalization = "literal";
};

charforms::Normalization parse_normalization(const std::string& s) {
  if (s == "literal") return charforms::Normalization::PaperLiteral;
  if (s == "pfaffian") return charforms::Normalization::Pfaffian;
  throw UsageError("--normalization expects literal|pfaffian");
}

exalg::FormExpr block_form(const std::string& form, const charforms::Split& s, charforms::Normalization norm,
                           int& degree) {
  try {
    if (form == "euler-v") {
      degree = s.v_rank();
      return charforms::euler_form(s, charforms::Block::V, norm);
    }
    if (form == "p1-v") {
      degree = 4;
      return charforms::pontryagin1(s, charforms::Block::V);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unsupported form '" + form + "'");
}

int run_table(const Global& g, const TableArgs& a) {
  const auto s = parse_split(a.split);
  const auto space = grassmann::TangentSpace::grassmann(s);
  std::ostringstream csv;
  if (!a.plucker.empty()) {
    const int deg = s.v_rank();
    grassmann::TangentPlane plane;
    if (a.plucker == "axis")
      plane = grassmann::axis_sphere_family_plane(s).to_numeric();
    else if (a.plucker == "quaternionic")
      plane = grassmann::quaternionic_tangent_plane(s).to_numeric();
    else if (a.plucker == "quaternionic-left")
      plane = grassmann::quaternionic_tangent_plane_left(s).to_numeric();
    else if (a.plucker == "random")
      plane = grassmann::random_tangent_plane(space, deg, a.seed);
    else
      throw UsageError("--plucker expects axis|quaternionic|quaternionic-left|random");
    const auto pc = grassmann::plucker_coords(plane);
    const int d = pc.degree();
    for (int r = 0; r < d; ++r) csv << "i" << r + 1 << ",";
    for (int r = 0; r < d; ++r) csv << "k" << r + 1 << ",";
    csv << "coefficient\n";
    for (const auto& [mask, v] : pc.entries()) {
      std::vector<int> rows, cols;
      for (int b = 0; b < space.dim(); ++b)
        if ((mask >> b) & 1u) {
          rows.push_back(space.generator(b).i);
          cols.push_back(space.generator(b).j);
        }
      for (int x : rows) csv << x << ",";
      for (int x : cols) csv << x << ",";
      csv << fmt_double(v) << "\n";
    }
    emit_text(g, "plucker-" + a.plucker, ".csv", csv.str());
    return kPass;
  }
  int degree = 0;
  const auto f = block_form(a.form, s, parse_normalization(a.normalization), degree);
  std::vector<comass::TableRow> rows;
  try {
    rows = comass::evaluation_table(f, space, degree);
  } catch (const std::length_error& e) {
    throw UsageError(std::string("unsupported split for a full table: ") + e.what());
  }
  for (int r = 0; r < degree; ++r) csv << "i" << r + 1 << ",";
  for (int r = 0; r < degree; ++r) csv << "k" << r + 1 << ",";
  csv << "exact,value\n";
  for (const auto& row : rows) {
    for (int x : row.rows) csv << x << ",";
    for (int x : row.cols) csv << x << ",";
    csv << row.exact.to_string() << "," << fmt_double(row.value) << "\n";
  }
  emit_text(g, "table-" + a.form, ".csv", csv.str());
  return kPass;
}

// ------------------------------------------------------------------ comass

struct ComassArgs {
  std::string split = "4,8";
  int degree = 0;
  std::string form = "euler-v";
  int restarts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  double samples = 0;
  int max_iterations = 10000;
  std::string normalization = "literal";
  std::optional<double> expect;
  double expect_tol = 1e-6;
};

int run_comass(const Global& g, const ComassArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = parse_split(a.split);
  exalg::FormExpr f(s.n);
  grassmann::TangentSpace space;
  int degree = 0;
  std::string anchor;
  if (a.form == "phi") {
    try {
      f = charforms::calibration_phi(s).form;
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    space = grassmann::TangentSpace::flag(s);
    degree = f.degree().value_or(0);
    anchor = "C chosen so that the comass of Phi is one";
  } else {
    f = block_form(a.form, s, parse_normalization(a.normalization), degree);
    space = grassmann::TangentSpace::grassmann(s);
    anchor = "e(Omega*)(xi) <= 3/2 pi^2";
  }
  if (a.degree && a.degree != degree)
    throw UsageError("--degree " + std::to_string(a.degree) + " does not match the form degree " +
                     std::to_string(degree));
  if (a.restarts < 1) throw UsageError("--restarts must be positive");
  comass::MaximizeOptions opt;
  opt.restarts = a.restarts;
  opt.seed = a.seed;
  opt.tol = a.tol;
  opt.max_iterations = a.max_iterations;
  opt.workers = g.workers;
  const auto rep = comass::maximize(f, space, degree, opt);
  json result = report::to_json(rep);
  result["exact_reference"] = (a.form == "euler-v" && s.k == 4 && s.n == 8) ? json(1.5 / (std::numbers::pi * std::numbers::pi))
                                                                          : json(nullptr);
  if (a.form == "phi") result["implied_constant"] = rep.best_value > 0 ? json(1.0 / rep.best_value) : json(nullptr);
  bool ok = true;
  if (a.samples > 0) {
    const long n = parse_count(a.samples, "--samples");
    const auto bv = comass::verify_bound(f, space, degree, rep.best_value, n, a.seed, g.workers);
    result["bound_check"] = {{"samples", bv.samples},     {"bound", bv.bound},         {"max_value", bv.max_value},
                             {"argmax_sample", bv.argmax_sample}, {"tolerance", bv.tolerance}, {"pass", bv.pass}};
    ok = ok && bv.pass;
  }
  if (a.expect) {
    const bool hit = std::abs(rep.best_value - *a.expect) <= a.expect_tol;
    result["expect"] = {{"value", *a.expect}, {"tol", a.expect_tol}, {"pass", hit}};
    ok = ok && hit;
  }
  result["pass"] = ok;
  json config = {{"split", a.split},     {"degree", degree},  {"form", a.form},    {"normalization", a.normalization},
                 {"restarts", a.restarts}, {"seed", a.seed},  {"tol", a.tol},      {"max_iterations", a.max_iterations},
                 {"samples", a.samples},  {"workers", g.workers}};
  emit_json(g, "comass-" + a.form, report::envelope("comass", config, a.seed, anchor, result), t0);
  return ok ? kPass : kFail;
}

// ------------------------------------------------------------------ volume / compare

struct VolumeArgs {
  std::string model;
  std::string models;
  std::string method = "profile";
  double samples = 200000;
  int nodes = 48;
  std::string eps = "1e-2,1e-3,1e-4,1e-5";
  std::uint64_t seed = 1;
  double h = 1e-5;
  std::string profile_csv;
};

folvol::FoliationModel parse_model(const Global& g, const std::string& id) {
  folvol::FoliationModel m;
  try {
    m = folvol::FoliationModel::parse(id);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (m.sphere_dim >= 15 && !g.slow) throw UsageError("model '" + id + "' lives on S^15; pass --slow");
  return m;
}

folvol::QuadratureSpec parse_quadrature(const Global& g, const VolumeArgs& a, const std::string& method) {
  folvol::QuadratureSpec q;
  try {
    q.method = report::parse_method(method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  q.samples = parse_count(a.samples, "--samples");
  if (a.nodes < 2) throw UsageError("--nodes must be at least 2");
  q.nodes = a.nodes;
  q.eps.clear();
  for (const auto& e : split_list(a.eps)) {
    char* end = nullptr;
    const double v = std::strtod(e.c_str(), &end);
    if (*end || !(v > 0.0 && v < std::numbers::pi / 2)) throw UsageError("bad --eps entry '" + e + "'");
    q.eps.push_back(v);
  }
  if (q.eps.size() < 2) throw UsageError("--eps needs at least two cutoffs");
  if (!(a.h > 0.0)) throw UsageError("--step must be positive");
  q.seed = a.seed;
  q.h = a.h;
  q.workers = g.workers;
  return q;
}

json volume_config(const Global& g, const VolumeArgs& a) {
  return {{"method", a.method}, {"samples", a.samples}, {"nodes", a.nodes}, {"eps", a.eps},
          {"seed", a.seed},     {"step", a.h},          {"workers", g.workers}};
}

int run_volume(const Global& g, const VolumeArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = parse_model(g, a.model);
  const auto q = parse_quadrature(g, a, a.method);
  const auto rep = folvol::foliation_volume(m, q);
  json result = report::to_json(rep);
  result["ratio_to_base"] = rep.value / rep.base_volume;
  if (!a.profile_csv.empty()) {
    std::ofstream f(a.profile_csv);
    if (!f) throw std::runtime_error("cannot write " + a.profile_csv);
    f << "latitude,jacobian\n";
    for (const auto& [t, j] : rep.jacobian_profile) f << fmt_double(t) << "," << fmt_double(j) << "\n";
  }
  json config = volume_config(g, a);
  config["model"] = a.model;
  emit_json(g, "volume-" + m.id(), report::envelope("volume", config, a.seed, "Hausdorff n-dimensional measure of the image", result), t0);
  return rep.eps_converged ? kPass : kFail;
}

int run_compare(const Global& g, const VolumeArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ids = split_list(a.models);
  if (ids.size() != 2) throw UsageError("--models expects two comma-separated model ids");
  const auto ma = parse_model(g, ids[0]), mb = parse_model(g, ids[1]);
  // both methods, so every comparison carries its own cross-check
  const auto prof = folvol::volume_ratio(ma, mb, parse_quadrature(g, a, "profile"));
  const auto mc = folvol::volume_ratio(ma, mb, parse_quadrature(g, a, "mc"));
  const double gap = std::abs(prof.ratio - mc.ratio);
  const double budget = prof.error_estimate + mc.error_estimate;
  const bool agree = gap <= budget;
  const bool conv = prof.a.eps_converged && prof.b.eps_converged;
  json result = {{"models", ids},
                 {"ratio", prof.ratio},
                 {"error_estimate", prof.error_estimate},
                 {"profile", report::to_json(prof)},
                 {"monte_carlo", report::to_json(mc)},
                 {"method_gap", gap},
                 {"combined_error", budget},
                 {"methods_agree", agree},
                 {"eps_converged", conv}};
  json config = volume_config(g, a);
  config["models"] = a.models;
  emit_json(g, "compare-" + ma.id() + "-" + mb.id(),
            report::envelope("compare", config, a.seed, "does have twice the volume of the singular foliation", result), t0);
  return agree && conv ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrations and foliation volumes on spheres: exact form identities, comass, Gauss-section mass"};
  app.set_version_flag("--version", std::string(report::kVersion));
  app.set_config("--config", "", "TOML/INI file; keys are flag names, explicit flags win");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Global g;
  app.add_option("--workers", g.workers, "worker threads (results do not depend on it)")->check(CLI::Range(1, 256));
  app.add_option("--out", g.out, "output file (default: stdout, or $FOLCAL_OUT_DIR/<command>.json)");
  app.add_flag("--slow", g.slow, "allow the (8,16) symbolic case and S^15 models");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run named exact verification cases");
  verify->add_option("ids", va.ids, "case ids");
  verify->add_flag("--all", va.all, "every registered case (slow ones need --slow)");
  verify->add_flag("--list", va.list, "list case ids and exit");

  TableArgs ta;
  auto* table = app.add_subcommand("table", "CSV of a form on every basis tuple, or Plucker coordinates of a plane");
  table->add_option("--split", ta.split, "k,n")->capture_default_str();
  table->add_option("--form", ta.form, "euler-v|p1-v")->capture_default_str();
  table->add_option("--normalization", ta.normalization, "literal|pfaffian")->capture_default_str();
  table->add_option("--plucker", ta.plucker, "dump coordinates of axis|quaternionic|quaternionic-left|random");
  table->add_option("--seed", ta.seed, "seed for --plucker random")->capture_default_str();

  ComassArgs ca;
  auto* cm = app.add_subcommand("comass", "maximize a form over unit decomposable tangent planes");
  cm->add_option("--split", ca.split, "k,n")->capture_default_str();
  cm->add_option("--degree", ca.degree, "plane dimension (checked against the form)");
  cm->add_option("--form", ca.form, "euler-v|p1-v|phi")->capture_default_str();
  cm->add_option("--normalization", ca.normalization, "literal|pfaffian")->capture_default_str();
  cm->add_option("--restarts", ca.restarts)->capture_default_str();
  cm->add_option("--seed", ca.seed)->capture_default_str();
  cm->add_option("--tol", ca.tol, "projected gradient tolerance")->capture_default_str();
  cm->add_option("--max-iterations", ca.max_iterations)->capture_default_str();
  cm->add_option("--samples", ca.samples, "random planes checked against the maximum (0 = skip)");
  cm->add_option("--expect", ca.expect, "fail unless the maximum is within --expect-tol of this");
  cm->add_option("--expect-tol", ca.expect_tol)->capture_default_str();

  VolumeArgs vol;
  auto* vs = app.add_subcommand("volume", "Gauss-section volume of a foliation");
  vs->add_option("--model", vol.model, "hopf-s3|hopf-s7|hopf-s15|ns-s3|ns-s5|ns-s7|ns-s15|ns-<k>-<m>|hopf-<d>-<m>")
      ->required();
  VolumeArgs cmpa;
  auto* cmp = app.add_subcommand("compare", "volume ratio of two foliations, both quadrature methods");
  cmp->add_option("--models", cmpa.models, "a,b")->required();
  for (auto [sub, args] : {std::pair{vs, &vol}, std::pair{cmp, &cmpa}}) {
    if (sub == vs) sub->add_option("--method", args->method, "profile|mc")->capture_default_str();
    sub->add_option("--samples", args->samples, "Monte Carlo samples (1e6 accepted)")->capture_default_str();
    sub->add_option("--nodes", args->nodes, "Gauss-Legendre nodes")->capture_default_str();
    sub->add_option("--eps", args->eps, "NS cutoffs, comma separated")->capture_default_str();
    sub->add_option("--seed", args->seed)->capture_default_str();
    sub->add_option("--step", args->h, "finite-difference step")->capture_default_str();
  }
  vs->add_option("--profile-csv", vol.profile_csv, "write the (latitude, J) samples as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*verify) return run_verify(g, va);
    if (*table) return run_table(g, ta);
    if (*cm) return run_comass(g, ca);
    if (*vs) return run_volume(g, vol);
    if (*cmp) return run_compare(g, cmpa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
