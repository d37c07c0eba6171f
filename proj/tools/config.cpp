#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

namespace nlds::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Expr parse_expr(const std::string& text, const std::string& where) {
  try {
    return Expr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

// Expression fields accept strings or plain numbers and are parse-checked on load.
std::string expression(const json& v, const std::string& where) {
  if (v.is_string()) {
    parse_expr(v.get<std::string>(), where);
    return v.get<std::string>();
  }
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw ConfigError(where + " must be an expression string or a number");
}

Interval interval(const json& v, const std::string& where) {
  check_keys(v, where, {"a", "b"});
  Interval out{number(require(v, where, "a"), where + ".a"), number(require(v, where, "b"), where + ".b")};
  if (!(out.a < out.b)) throw ConfigError(where + " needs a < b");
  return out;
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"domain", "grid", "system", "solver", "sweep", "diagnose", "probe", "epidemic", "output", "seed"});
  RunConfig c;
  c.domain = interval(require(doc, "config", "domain"), "domain");

  const json& grid = require(doc, "config", "grid");
  check_keys(grid, "grid", {"n", "refinement"});
  c.n = count(require(grid, "grid", "n"), "grid.n");
  if (c.n == 0) throw ConfigError("grid.n must be positive");
  if (grid.contains("refinement")) {
    const auto& r = grid.at("refinement");
    if (!r.is_array()) throw ConfigError("grid.refinement must be an array");
    for (const auto& v : r) {
      const auto k = count(v, "grid.refinement");
      if (k == 0) throw ConfigError("grid.refinement entries must be positive");
      c.refinement.push_back(k);
    }
  }

  if (doc.contains("system")) {
    const json& s = doc.at("system");
    check_keys(s, "system", {"l", "l1", "d", "kernels", "coefficients"});
    SystemConfig sc;
    sc.l = count(require(s, "system", "l"), "system.l");
    sc.l1 = count(require(s, "system", "l1"), "system.l1");
    if (sc.l == 0 || sc.l1 > sc.l) throw ConfigError("system needs l >= 1 and l1 <= l");
    sc.d = numbers(require(s, "system", "d"), "system.d");
    if (sc.d.size() != sc.l) throw ConfigError("system.d must have l entries");
    const json& ks = require(s, "system", "kernels");
    if (!ks.is_array() || ks.size() != sc.l1) throw ConfigError("system.kernels must be an array of l1 expressions");
    for (std::size_t i = 0; i < ks.size(); ++i)
      sc.kernels.push_back(expression(ks[i], "system.kernels[" + std::to_string(i) + "]"));
    const json& cs = require(s, "system", "coefficients");
    if (!cs.is_array() || cs.size() != sc.l) throw ConfigError("system.coefficients must be an l x l array");
    for (std::size_t i = 0; i < sc.l; ++i) {
      if (!cs[i].is_array() || cs[i].size() != sc.l) throw ConfigError("system.coefficients must be an l x l array");
      std::vector<std::string> row;
      for (std::size_t j = 0; j < sc.l; ++j)
        row.push_back(expression(cs[i][j], "system.coefficients[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      sc.coefficients.push_back(std::move(row));
    }
    c.system = std::move(sc);
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s, "solver", {"tol", "max_iter", "gap_tol", "r0_tol", "bisection_tol"});
    if (s.contains("tol")) c.solver.tol = number(s.at("tol"), "solver.tol");
    if (s.contains("max_iter")) c.solver.max_iter = count(s.at("max_iter"), "solver.max_iter");
    if (s.contains("gap_tol") && !s.at("gap_tol").is_null()) c.solver.gap_tol = number(s.at("gap_tol"), "solver.gap_tol");
    if (s.contains("r0_tol")) c.solver.r0_tol = number(s.at("r0_tol"), "solver.r0_tol");
    if (s.contains("bisection_tol")) c.solver.bisection_tol = number(s.at("bisection_tol"), "solver.bisection_tol");
    if (!(c.solver.tol > 0.0) || !(c.solver.r0_tol > 0.0) || !(c.solver.bisection_tol > 0.0))
      throw ConfigError("solver tolerances must be positive");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    check_keys(s, "sweep", {"mode", "t_schedule"});
    SweepConfig sc;
    if (s.contains("mode")) {
      if (!s.at("mode").is_string()) throw ConfigError("sweep.mode must be a string");
      sc.mode = s.at("mode").get<std::string>();
    }
    if (!parse_sweep_mode(sc.mode)) throw ConfigError("sweep.mode must be small-d, large-d-nondegen or large-d-degen");
    sc.t_schedule = numbers(require(s, "sweep", "t_schedule"), "sweep.t_schedule");
    c.sweep = std::move(sc);
  }

  if (doc.contains("diagnose")) {
    const json& s = doc.at("diagnose");
    check_keys(s, "diagnose", {"region", "window", "lambda"});
    DiagnoseConfig dc;
    if (s.contains("region")) dc.region = interval(s.at("region"), "diagnose.region");
    if (s.contains("window")) dc.window = count(s.at("window"), "diagnose.window");
    if (s.contains("lambda")) dc.lambda = number(s.at("lambda"), "diagnose.lambda");
    c.diagnose = dc;
  }

  if (doc.contains("probe")) {
    const json& s = doc.at("probe");
    check_keys(s, "probe", {"deltas", "draws", "shift"});
    ProbeConfig pc;
    if (s.contains("deltas")) pc.deltas = numbers(s.at("deltas"), "probe.deltas");
    if (s.contains("draws")) pc.draws = count(s.at("draws"), "probe.draws");
    if (s.contains("shift")) pc.shift = number(s.at("shift"), "probe.shift");
    c.probe = std::move(pc);
  }

  if (doc.contains("epidemic")) {
    const json& s = doc.at("epidemic");
    check_keys(s, "epidemic", {"kernel", "d", "r", "m", "b", "beta_d", "beta_i", "d_schedule"});
    EpidemicConfig ec;
    ec.kernel = expression(require(s, "epidemic", "kernel"), "epidemic.kernel");
    ec.d = number(require(s, "epidemic", "d"), "epidemic.d");
    ec.r = expression(require(s, "epidemic", "r"), "epidemic.r");
    ec.m = expression(require(s, "epidemic", "m"), "epidemic.m");
    ec.b = expression(require(s, "epidemic", "b"), "epidemic.b");
    ec.beta_d = expression(require(s, "epidemic", "beta_d"), "epidemic.beta_d");
    ec.beta_i = expression(require(s, "epidemic", "beta_i"), "epidemic.beta_i");
    if (s.contains("d_schedule")) ec.d_schedule = numbers(s.at("d_schedule"), "epidemic.d_schedule");
    c.epidemic = std::move(ec);
  }

  if (doc.contains("output")) {
    const json& s = doc.at("output");
    check_keys(s, "output", {"directory", "formats"});
    if (s.contains("directory")) {
      if (!s.at("directory").is_string()) throw ConfigError("output.directory must be a string");
      c.output.directory = s.at("directory").get<std::string>();
    }
    if (s.contains("formats")) {
      const auto& f = s.at("formats");
      if (!f.is_array()) throw ConfigError("output.formats must be an array");
      c.output.formats.clear();
      for (const auto& v : f) {
        if (!v.is_string() || (v != "json" && v != "csv")) throw ConfigError("output.formats entries are json or csv");
        c.output.formats.push_back(v.get<std::string>());
      }
    }
  }

  if (doc.contains("seed")) c.seed = count(doc.at("seed"), "seed");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["domain"] = {{"a", c.domain.a}, {"b", c.domain.b}};
  j["grid"] = {{"n", c.n}, {"refinement", c.refinement}};
  if (c.system) {
    j["system"] = {{"l", c.system->l},
                   {"l1", c.system->l1},
                   {"d", c.system->d},
                   {"kernels", c.system->kernels},
                   {"coefficients", c.system->coefficients}};
  }
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"gap_tol", c.solver.gap_tol ? json(*c.solver.gap_tol) : json(nullptr)},
                 {"r0_tol", c.solver.r0_tol},
                 {"bisection_tol", c.solver.bisection_tol}};
  if (c.sweep) j["sweep"] = {{"mode", c.sweep->mode}, {"t_schedule", c.sweep->t_schedule}};
  if (c.diagnose) {
    json dj = {{"window", c.diagnose->window}};
    if (c.diagnose->region) dj["region"] = {{"a", c.diagnose->region->a}, {"b", c.diagnose->region->b}};
    if (c.diagnose->lambda) dj["lambda"] = *c.diagnose->lambda;
    j["diagnose"] = dj;
  }
  if (c.probe) j["probe"] = {{"deltas", c.probe->deltas}, {"draws", c.probe->draws}, {"shift", c.probe->shift}};
  if (c.epidemic) {
    const auto& e = *c.epidemic;
    j["epidemic"] = {{"kernel", e.kernel}, {"d", e.d},          {"r", e.r},
                     {"m", e.m},           {"b", e.b},          {"beta_d", e.beta_d},
                     {"beta_i", e.beta_i}, {"d_schedule", e.d_schedule}};
  }
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  j["seed"] = c.seed;
  return j;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

DispersalSystem build_system(const RunConfig& c) {
  if (!c.system) throw ConfigError("config has no 'system' section");
  const auto& s = *c.system;
  DispersalSystem sys;
  sys.l = s.l;
  sys.l1 = s.l1;
  sys.d = s.d;
  sys.domain = c.domain;
  for (std::size_t i = 0; i < s.kernels.size(); ++i)
    sys.kernels.push_back({parse_expr(s.kernels[i], "system.kernels[" + std::to_string(i) + "]")});
  sys.coefficients.l = s.l;
  for (std::size_t i = 0; i < s.l; ++i)
    for (std::size_t j = 0; j < s.l; ++j)
      sys.coefficients.entries.push_back(parse_expr(
          s.coefficients[i][j], "system.coefficients[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
  return sys;
}

VSIParams build_epidemic(const RunConfig& c) {
  if (!c.epidemic) throw ConfigError("config has no 'epidemic' section");
  const auto& e = *c.epidemic;
  return VSIParams{KernelSpec{parse_expr(e.kernel, "epidemic.kernel")},
                   e.d,
                   parse_expr(e.r, "epidemic.r"),
                   parse_expr(e.m, "epidemic.m"),
                   parse_expr(e.b, "epidemic.b"),
                   parse_expr(e.beta_d, "epidemic.beta_d"),
                   parse_expr(e.beta_i, "epidemic.beta_i"),
                   c.domain};
}

}  // namespace nlds::cli
