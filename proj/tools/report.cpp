#include "report.hpp"

#include <cstdio>
#include <fstream>

#include "nlds/error.hpp"

namespace nlds::cli {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json pairs_json(const std::vector<std::pair<double, double>>& samples) {
  json out = json::array();
  for (const auto& [a, b] : samples) out.push_back({a, b});
  return out;
}

}  // namespace

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json to_json(const Violation& v) {
  json j = {{"hypothesis", to_string(v.hypothesis)},
            {"node", v.node},
            {"row", v.row},
            {"col", v.col},
            {"value", v.value},
            {"blocking", v.blocking},
            {"message", v.message}};
  j["species"] = v.species ? json(*v.species) : json(nullptr);
  return j;
}

json to_json(const ValidationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back(to_json(v));
  json holds = json::object();
  for (auto h : {Hypothesis::H1, Hypothesis::H2, Hypothesis::H3, Hypothesis::H4, Hypothesis::KernelSign})
    holds[to_string(h)] = r.holds(h);
  return {{"passed", r.passed()},
          {"mode", r.mode ? json(to_string(*r.mode)) : json(nullptr)},
          {"holds", holds},
          {"reducible_nodes", r.reducible_nodes()},
          {"violations", violations}};
}

json to_json(const SpectralReport& r) {
  const auto& c = r.certificate;
  json cert = {{"status", c.exists ? "Exists" : "NoCertificate"}, {"reason", c.reason}};
  if (c.exists) {
    cert["lambda"] = c.lambda;
    cert["residual"] = c.residual;
    cert["min_component"] = c.min_component;
  }
  return {{"s", r.s},
          {"s_e", r.s_e},
          {"gap", r.gap},
          {"gap_tol", r.gap_tol},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"certificate", cert}};
}

json to_json(const PerronWeight& w) {
  return {{"eigenvalue", w.eigenvalue},
          {"deviation", w.deviation},
          {"residual", w.residual},
          {"iterations", w.iterations},
          {"uniform", w.uniform}};
}

json to_json(const Threshold& t) {
  json j = {{"case", to_string(t.kind)},
            {"value", t.value},
            {"eta22", t.eta22},
            {"margin", t.margin},
            {"ladder", pairs_json(t.ladder)},
            {"iterations", t.iterations}};
  if (t.kind == Threshold::Case::A) {
    j["gamma_star"] = t.value;
    j["fixed_point_residual"] = t.fixed_point_residual;
  }
  return j;
}

json to_json(const ReducedQuantities& q, double tol) {
  json weights = json::array();
  for (const auto& w : q.weights.species) weights.push_back(to_json(w));
  json j = {{"tol", tol},
            {"weights", weights},
            {"uses_fallback", q.weights.uses_fallback()},
            {"tilde_M", matrix_json(q.tilde_M.matrix())},
            {"kappa", q.kappa},
            {"kappa_tilde", q.kappa_tilde},
            {"eta22", optional_number(q.eta22)},
            {"eta22_sup", optional_number(q.eta22_sup)}};
  j["threshold"] = q.threshold ? to_json(*q.threshold) : json(nullptr);
  return j;
}

json to_json(const SweepTable& t) {
  json rows = json::array();
  bool all = true;
  for (const auto& r : t.rows) {
    rows.push_back({{"t", r.t},
                    {"s", r.s},
                    {"s_e", r.s_e},
                    {"gap", r.gap},
                    {"reference", r.reference},
                    {"deviation", r.deviation},
                    {"converged", r.converged}});
    all = all && r.converged;
  }
  return {{"mode", to_string(t.mode)}, {"reference_kind", to_string(t.reference_kind)}, {"converged", all},
          {"rows", rows}};
}

json to_json(const IntegrabilityReport& r) {
  return {{"n", r.n},
          {"eta", r.eta},
          {"integrals", r.integrals},
          {"ratios", r.ratios},
          {"order", r.order},
          {"x_max", r.x_max},
          {"plateau_nodes", r.plateau_nodes},
          {"verdict", to_string(r.verdict)}};
}

json to_json(const R0Report& r, double tol) {
  const auto& l = r.limit;
  json limit = {{"case", to_string(l.kind)},
                {"value", l.value},
                {"hat_r0", l.hat_r0},
                {"hat_r0_sup", l.hat_r0_sup},
                {"tilde_r0", optional_number(l.tilde_r0)},
                {"margin", l.margin},
                {"ladder", pairs_json(l.ladder)},
                {"r0_zero", l.r0_zero},
                {"iterations", l.iterations}};
  return {{"tol", tol},
          {"r0", r.r0.r0},
          {"s_B", r.r0.s_B},
          {"converged", r.r0.converged},
          {"iterations", r.r0.iterations},
          {"residual", r.r0.residual},
          {"h_at_r0", r.h_at_r0},
          {"outside_assumptions", r.outside_assumptions},
          {"limit", limit},
          {"q_samples", pairs_json(r.q_samples)}};
}

json to_json(const ProbeResult& p) {
  return {{"dM", p.dM},
          {"dK", p.dK},
          {"s_base", p.s_base},
          {"s_perturbed", p.s_perturbed},
          {"ds", p.ds},
          {"sandwich_bound", p.sandwich_bound}};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { raw(header); }

std::string CsvWriter::cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(cell(v));
  raw(cells);
}

void CsvWriter::raw(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DimensionError("csv row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) text_ += ',';
    text_ += cells[k];
  }
  text_ += '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace nlds::cli
