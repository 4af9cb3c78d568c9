#include "folcal/report.hpp"

#include <stdexcept>

namespace folcal::report {

json to_json(const charforms::Split& s) { return json::array({s.k, s.n}); }

json to_json(const charforms::OrthogonalityCheck& c) {
  return {{"split", to_json(c.split)},
          {"method", c.method == charforms::OrthogonalityMethod::Direct ? "direct" : "symmetry-reduced"},
          {"exact", c.exact},
          {"u_terms", c.u_terms},
          {"v_terms", c.v_terms},
          {"term_count_before", c.term_count_before},
          {"disjoint_products", c.disjoint_products},
          {"term_count_after", c.term_count_after},
          {"orbit_representatives", c.orbit_representatives}};
}

namespace {

json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const comass::ComassReport& r, bool include_restarts) {
  json basis_labels = json::array();
  for (int i = 0; i < r.argmax.space.dim(); ++i) {
    const auto g = r.argmax.space.generator(i);
    basis_labels.push_back("E" + std::to_string(g.i) + "," + std::to_string(g.j));
  }
  json j = {{"form", r.form_id},
            {"split", to_json(r.split)},
            {"degree", r.degree},
            {"best_value", r.best_value},
            {"achiever_diagnostic", optional_number(r.achiever_diagnostic)},
            {"aligned_diagnostic", optional_number(r.aligned_diagnostic)},
            {"best_restart", r.best_restart},
            {"iterations", r.iterations},
            {"nonconverged", r.nonconverged},
            {"monotone", r.monotone},
            {"options",
             {{"restarts", r.options.restarts},
              {"seed", r.options.seed},
              {"tol", r.options.tol},
              {"max_iterations", r.options.max_iterations}}},
            {"basis", basis_labels},
            {"argmax", matrix(r.argmax.basis)}};
  if (include_restarts) j["restart_values"] = r.restart_values;
  return j;
}

json to_json(const comass::MixedScan& scan, bool include_rows) {
  json j = {{"phi_at_zero", scan.phi_at_zero},
            {"literal_scale", scan.literal_scale},
            {"max_ratio", scan.max_ratio},
            {"violations", scan.violations},
            {"points", scan.rows.size()},
            {"all_ok", scan.all_ok()}};
  if (include_rows) {
    json rows = json::array();
    for (const auto& r : scan.rows)
      rows.push_back({{"theta", {r.spec.theta1, r.spec.theta2, r.spec.theta3}},
                      {"value", r.value},
                      {"bound", r.bound},
                      {"ok", r.ok}});
    j["rows"] = std::move(rows);
  }
  return j;
}

std::string method_name(folvol::QuadratureMethod m) {
  return m == folvol::QuadratureMethod::LatitudeProfile ? "profile" : "mc";
}

folvol::QuadratureMethod parse_method(const std::string& s) {
  if (s == "profile") return folvol::QuadratureMethod::LatitudeProfile;
  if (s == "mc") return folvol::QuadratureMethod::MonteCarlo;
  throw std::invalid_argument("unknown quadrature method '" + s + "' (profile|mc)");
}

json to_json(const folvol::QuadratureSpec& q) {
  json j = {{"method", method_name(q.method)}, {"seed", q.seed}, {"h", q.h}, {"eps", q.eps}};
  if (q.method == folvol::QuadratureMethod::LatitudeProfile)
    j["nodes"] = q.nodes;
  else
    j["samples"] = q.samples;
  return j;
}

json to_json(const folvol::VolumeReport& r) {
  json eps = json::array();
  for (const auto& e : r.eps_sequence) eps.push_back({{"eps", e.eps}, {"value", e.value}});
  json prof = json::array();
  for (const auto& [t, jac] : r.jacobian_profile) prof.push_back({t, jac});
  return {{"model", r.model.id()},
          {"quadrature", to_json(r.spec)},
          {"value", r.value},
          {"error_estimate", r.error_estimate},
          {"quadrature_error", r.quadrature_error},
          {"jacobian_error", r.jacobian_error},
          {"cutoff_error", r.cutoff_error},
          {"base_volume", r.base_volume},
          {"eps_sequence", eps},
          {"eps_converged", r.eps_converged},
          {"jacobian_profile", prof}};
}

json to_json(const folvol::RatioReport& r) {
  return {{"ratio", r.ratio}, {"error_estimate", r.error_estimate}, {"a", to_json(r.a)}, {"b", to_json(r.b)}};
}

json envelope(const std::string& command, const json& config, std::uint64_t seed, const std::string& anchor,
              json result) {
  return {{"artifact", "folcal"}, {"version", kVersion}, {"command", command}, {"config", config},
          {"seed", seed},         {"anchor", anchor},    {"result", std::move(result)}};
}

json strip_timing(json j) {
  if (j.is_object()) {
    j.erase("elapsed_ms");
    for (auto& [k, v] : j.items()) v = strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timing(v);
  }
  return j;
}

}  // namespace folcal::report
