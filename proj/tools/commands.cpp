#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "nlds/analysis.hpp"
#include "nlds/assembly.hpp"
#include "nlds/epidemic.hpp"
#include "nlds/error.hpp"
#include "nlds/opspec.hpp"
#include "nlds/reduce.hpp"
#include "report.hpp"

namespace nlds::cli {

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t n = 0;
  bool force = false;
  bool quiet = false;
  std::string mode;
};

struct Context {
  std::string command;
  RunConfig config;
  Flags flags;
  json report = json::object();
  /// file name -> content
  std::map<std::string, std::string> files;
  std::string summary;

  void csv(const std::string& table, const std::string& text) {
    if (config.wants("csv")) files[command + "_" + table + ".csv"] = text;
  }
};

/// A run that completed but whose answer cannot be trusted.
struct NotConverged : Error {
  using Error::Error;
};

SpectralOptions spectral_options(const RunConfig& c) { return {c.solver.tol, c.solver.max_iter}; }

ThresholdOptions threshold_options(const RunConfig& c) { return {std::nullopt, c.solver.bisection_tol, 200}; }

Grid config_grid(const RunConfig& c) { return build_grid(c.domain.a, c.domain.b, c.n); }

/// Samples the system and runs the validation gate; the report is attached either way.
SampledSystem gated_sample(Context& ctx, const DispersalSystem& sys) {
  sys.check_shape();
  SampledSystem sampled = sample(sys, config_grid(ctx.config));
  const ValidationReport v = validate(sampled);
  ctx.report["validation"] = to_json(v);
  if (!v.passed() && !ctx.flags.force) {
    std::ostringstream msg;
    msg << "validation failed:";
    for (const auto& e : v.violations)
      if (e.blocking) {
        msg << ' ' << to_string(e.hypothesis);
        break;
      }
    msg << " (" << v.violations.size() << " entries; --force skips the gate)";
    throw ValidationError(msg.str());
  }
  return sampled;
}

std::vector<std::string> species_header(const char* first, const char* prefix, std::size_t l) {
  std::vector<std::string> h{first};
  for (std::size_t i = 0; i < l; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

void cmd_validate(Context& ctx) {
  const DispersalSystem sys = build_system(ctx.config);
  sys.check_shape();
  const SampledSystem sampled = sample(sys, config_grid(ctx.config));
  const ValidationReport v = validate(sampled);
  ctx.report["validation"] = to_json(v);
  ctx.report["result"] = {{"passed", v.passed()}, {"violations", v.violations.size()}};

  CsvWriter csv({"hypothesis", "node", "row", "col", "value", "blocking"});
  for (const auto& e : v.violations)
    csv.raw({to_string(e.hypothesis), std::to_string(e.node), std::to_string(e.row), std::to_string(e.col),
             CsvWriter::cell(e.value), e.blocking ? "true" : "false"});
  ctx.csv("violations", csv.text());
  ctx.summary = v.passed() ? "validation passed" : "validation failed";
  if (!v.passed()) throw ValidationError("validation failed with " + std::to_string(v.violations.size()) + " entries");
}

void cmd_spectrum(Context& ctx) {
  const DispersalSystem sys = build_system(ctx.config);
  const SampledSystem sampled = gated_sample(ctx, sys);
  const AssembledOperator P = assemble(sampled);
  const SpectralReport r = spectral_report(P, pointwise_A(sampled), ctx.config.solver.gap_tol,
                                           spectral_options(ctx.config));
  json result = to_json(r);
  result["tol"] = ctx.config.solver.tol;
  ctx.report["result"] = result;

  if (r.certificate.exists) {
    CsvWriter csv(species_header("x", "u", sampled.l));
    const std::size_t n = sampled.n();
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<double> row{sampled.grid.point(a)};
      for (std::size_t i = 0; i < sampled.l; ++i) row.push_back(r.certificate.eigvec(static_cast<Eigen::Index>(i * n + a)));
      csv.row(row);
    }
    ctx.csv("eigenvector", csv.text());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "s = %.17g, s_e = %.17g, certificate %s", r.s, r.s_e,
                r.certificate.exists ? "Exists" : "NoCertificate");
  ctx.summary = buf;
  if (!r.converged) throw NotConverged("spectral bound did not converge");
}

ReducedQuantities reduce_for(Context& ctx, const DispersalSystem& sys, const SampledSystem& sampled) {
  return reduce(sys, sampled, ctx.config.solver.tol, threshold_options(ctx.config));
}

void cmd_reduce(Context& ctx) {
  const DispersalSystem sys = build_system(ctx.config);
  const SampledSystem sampled = gated_sample(ctx, sys);
  const ReducedQuantities q = reduce_for(ctx, sys, sampled);
  ctx.report["result"] = to_json(q, ctx.config.solver.tol);

  CsvWriter csv(species_header("x", "p", sampled.l));
  for (std::size_t a = 0; a < sampled.n(); ++a) {
    std::vector<double> row{sampled.grid.point(a)};
    for (const auto& w : q.weights.species) row.push_back(w.p[a]);
    csv.row(row);
  }
  ctx.csv("weights", csv.text());
  if (q.threshold) {
    CsvWriter ladder({"gamma", "s_tilde_B"});
    for (const auto& [g, s] : q.threshold->ladder) ladder.row({g, s});
    ctx.csv("ladder", ladder.text());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "kappa = %.17g, kappa_tilde = %.17g%s", q.kappa, q.kappa_tilde,
                q.threshold ? (q.threshold->kind == Threshold::Case::A ? ", CaseA" : ", CaseB") : "");
  ctx.summary = buf;
}

void cmd_sweep(Context& ctx) {
  SweepConfig sc = ctx.config.sweep.value_or(SweepConfig{});
  if (!ctx.flags.mode.empty()) sc.mode = ctx.flags.mode;
  const auto mode = parse_sweep_mode(sc.mode);
  if (!mode) throw ConfigError("unknown sweep mode '" + sc.mode + "'");
  if (sc.t_schedule.empty()) throw ConfigError("sweep needs a non-empty t_schedule");

  const DispersalSystem sys = build_system(ctx.config);
  const SampledSystem sampled = gated_sample(ctx, sys);
  const ReducedQuantities q = reduce_for(ctx, sys, sampled);
  const SweepTable table = sweep(sampled, sc.t_schedule, *mode, q, spectral_options(ctx.config));

  json result = to_json(table);
  result["tol"] = ctx.config.solver.tol;
  result["reduced"] = to_json(q, ctx.config.solver.tol);
  ctx.report["result"] = result;

  std::ostringstream csv;
  write_csv(csv, table);
  ctx.csv("table", csv.str());
  ctx.summary = to_string(*mode) + " sweep with " + std::to_string(table.rows.size()) + " rows";
  for (const auto& r : table.rows)
    if (!r.converged) throw NotConverged("sweep row did not converge");
}

void cmd_diagnose(Context& ctx) {
  const DispersalSystem sys = build_system(ctx.config);
  const SampledSystem sampled = gated_sample(ctx, sys);
  const DiagnoseConfig dc = ctx.config.diagnose.value_or(DiagnoseConfig{});

  const SpectralField field = spectral_field(sampled);
  CsvWriter fcsv({"x", "H", "h"});
  double max_excess = -std::numeric_limits<double>::infinity();
  double max_h = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < field.x.size(); ++a) {
    fcsv.row({field.x[a], field.H[a], field.h[a]});
    max_excess = std::max(max_excess, field.h[a] - field.H[a]);
    max_h = std::max(max_h, field.h[a]);
  }
  ctx.csv("field", fcsv.text());

  std::vector<std::size_t> sizes = ctx.config.refinement;
  if (sizes.empty()) sizes = {ctx.config.n, 2 * ctx.config.n, 4 * ctx.config.n};
  IntegrabilityOptions io;
  io.window = dc.window;
  const IntegrabilityReport ir =
      integrability_diagnostic(field_source(sys), ctx.config.domain, sizes, dc.region.value_or(ctx.config.domain), io);
  CsvWriter icsv({"n", "eta", "integral", "ratio"});
  for (std::size_t k = 0; k < ir.n.size(); ++k)
    icsv.raw({std::to_string(ir.n[k]), CsvWriter::cell(ir.eta[k]), CsvWriter::cell(ir.integrals[k]),
              k == 0 ? "" : CsvWriter::cell(ir.ratios[k - 1])});
  ctx.csv("integrability", icsv.text());

  json result = {{"tol", ctx.config.solver.tol},
                 {"field", {{"eta", field.eta}, {"max_h", max_h}, {"max_h_minus_H", max_excess}}},
                 {"integrability", to_json(ir)}};

  json gen = {{"lambda", nullptr}, {"residual", nullptr}, {"source", nullptr}};
  if (sampled.l2() > 0) {
    std::optional<double> lambda = dc.lambda;
    if (lambda) {
      gen["source"] = "config";
    } else {
      const SpectralReport r = spectral_report(assemble(sampled), pointwise_A(sampled), ctx.config.solver.gap_tol,
                                               spectral_options(ctx.config));
      if (r.certificate.exists) {
        lambda = r.certificate.lambda;
        gen["source"] = "certificate";
      } else {
        gen["reason"] = "no principal eigenvalue certificate";
      }
    }
    if (lambda) {
      gen["lambda"] = *lambda;
      try {
        gen["residual"] = generalized_eigen_residual(sampled, *lambda, spectral_options(ctx.config));
      } catch (const DomainError& e) {
        gen["reason"] = e.what();
      }
    }
  } else {
    gen["reason"] = "system has no non-diffusing species";
  }
  result["generalized_eigen"] = gen;
  ctx.report["result"] = result;
  ctx.summary = "integrability verdict " + to_string(ir.verdict);
}

void cmd_r0(Context& ctx) {
  VSIParams params = build_epidemic(ctx.config);
  params.d = ctx.config.epidemic->d;
  const Grid grid = config_grid(ctx.config);
  const double tol = ctx.config.solver.r0_tol;
  const R0Report rep = r0_report(params, grid, tol);
  json result = to_json(rep, tol);

  CsvWriter q({"mu", "Q"});
  for (const auto& [mu, v] : rep.q_samples) q.row({mu, v});
  ctx.csv("q_samples", q.text());

  bool converged = rep.r0.converged;
  const auto& schedule = ctx.config.epidemic->d_schedule;
  if (!schedule.empty()) {
    CsvWriter csv({"d", "r0", "H_at_r0", "converged"});
    json rows = json::array();
    for (double d : schedule) {
      VSIParams p = params;
      p.d = d;
      const SampledVSI v = sample(p, grid);
      const R0Result r = r0(v, tol);
      const double h = H_mu(v, r.r0);
      csv.raw({CsvWriter::cell(d), CsvWriter::cell(r.r0), CsvWriter::cell(h), r.converged ? "true" : "false"});
      rows.push_back({{"d", d}, {"r0", r.r0}, {"H_at_r0", h}, {"converged", r.converged}});
      converged = converged && r.converged;
    }
    ctx.csv("d_sweep", csv.text());
    result["d_sweep"] = rows;
  }
  ctx.report["result"] = result;
  char buf[160];
  std::snprintf(buf, sizeof buf, "R0 = %.17g, limit %s", rep.r0.r0, to_string(rep.limit.kind).c_str());
  ctx.summary = buf;
  if (!converged) throw NotConverged("R0 iteration did not converge");
}

void cmd_oracle(Context& ctx) {
  const DispersalSystem sys = build_system(ctx.config);
  const SampledSystem sampled = gated_sample(ctx, sys);
  const AssembledOperator P = assemble(sampled);
  const auto eig = dense_spectrum(P);
  const SpectralBound sb = spectral_bound(P, spectral_options(ctx.config));

  CsvWriter csv({"re", "im"});
  for (const auto& z : eig) csv.row({z.real(), z.imag()});
  ctx.csv("eigenvalues", csv.text());
  std::ostringstream bin(std::ios::binary);
  write_matrix_binary(bin, P.matrix);
  ctx.files[ctx.command + "_matrix.bin"] = bin.str();

  const double max_re = eig.empty() ? 0.0 : eig.front().real();
  ctx.report["result"] = {{"tol", ctx.config.solver.tol},
                          {"size", P.size()},
                          {"max_re", max_re},
                          {"s", sb.s},
                          {"converged", sb.converged},
                          {"difference", std::abs(sb.s - max_re)}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "max Re = %.17g, power route s = %.17g", max_re, sb.s);
  ctx.summary = buf;
  if (!sb.converged) throw NotConverged("spectral bound did not converge");
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void cmd_probe(Context& ctx) {
  const DispersalSystem sys = build_system(ctx.config);
  const SampledSystem sampled = gated_sample(ctx, sys);
  const ProbeConfig pc = ctx.config.probe.value_or(ProbeConfig{});
  const auto opts = spectral_options(ctx.config);

  CsvWriter csv({"delta", "draw", "ds", "sandwich_bound", "within_bound"});
  json deltas = json::array();
  std::vector<double> medians;
  bool all_within = true;
  for (std::size_t k = 0; k < pc.deltas.size(); ++k) {
    std::vector<double> mags;
    json draws = json::array();
    for (std::size_t j = 0; j < pc.draws; ++j) {
      const std::uint64_t seed = ctx.config.seed + 1000003ULL * k + j;
      const ProbeResult p = perturbation_probe(sampled, pc.deltas[k], seed, ProbeMode::Random, opts);
      const bool within = std::abs(p.ds) <= p.sandwich_bound * (1.0 + 1e-9) + 1e-14;
      all_within = all_within && within;
      mags.push_back(std::abs(p.ds));
      json pj = to_json(p);
      pj["seed"] = seed;
      pj["within_bound"] = within;
      draws.push_back(pj);
      csv.raw({CsvWriter::cell(pc.deltas[k]), std::to_string(j), CsvWriter::cell(p.ds),
               CsvWriter::cell(p.sandwich_bound), within ? "true" : "false"});
    }
    medians.push_back(median(mags));
    deltas.push_back({{"delta", pc.deltas[k]}, {"median_abs_ds", medians.back()}, {"draws", draws}});
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < medians.size(); ++k) decreasing = decreasing && medians[k] < medians[k - 1];
  ctx.csv("draws", csv.text());

  const ProbeResult shift = perturbation_probe(sampled, pc.shift, ctx.config.seed, ProbeMode::DiagonalShift, opts);
  json sj = to_json(shift);
  sj["shift"] = pc.shift;
  sj["error"] = std::abs(shift.ds - pc.shift);
  ctx.report["result"] = {{"tol", ctx.config.solver.tol},
                          {"deltas", deltas},
                          {"all_within_bound", all_within},
                          {"median_decreasing", decreasing},
                          {"diagonal_shift", sj}};
  ctx.summary = std::string("bound ") + (all_within ? "held" : "violated") + ", medians " +
                (decreasing ? "decreasing" : "not decreasing");
}

json error_entry(const std::string& type, const std::exception& e) {
  return {{"type", type}, {"message", e.what()}};
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Spectral analysis of cooperative nonlocal dispersal systems"};
  app.require_subcommand(1);
  Flags flags;

  const std::map<std::string, std::pair<std::string, std::function<void(Context&)>>> commands{
      {"validate", {"hypothesis report", cmd_validate}},
      {"spectrum", {"s, s_e, gap and principal eigenvalue certificate", cmd_spectrum}},
      {"reduce", {"Perron weights, reduced matrices, kappa, eta22 and threshold", cmd_reduce}},
      {"sweep", {"limit tables along a diffusion schedule", cmd_sweep}},
      {"diagnose", {"integrability and generalized eigenvalue residual", cmd_diagnose}},
      {"r0", {"basic reproduction ratio report", cmd_r0}},
      {"oracle", {"dense spectrum dump", cmd_oracle}},
      {"probe", {"perturbation continuity probe", cmd_probe}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--out", flags.out, "output directory (default: output.directory from the config)");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&flags](std::uint64_t s) { flags.seed = s, flags.seed_set = true; }, "random seed");
    sub->add_option("--n", flags.n, "grid size override")->check(CLI::PositiveNumber);
    sub->add_flag("--force", flags.force, "skip the validation gate");
    sub->add_flag("--quiet", flags.quiet, "no summary on stdout");
    if (name == "sweep") sub->add_option("--mode", flags.mode, "small-d, large-d-nondegen or large-d-degen");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.flags = flags;
  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  json errors = json::array();
  std::string out_dir = flags.out.empty() ? "out" : flags.out;
  bool config_ok = false;

  try {
    ctx.config = load_config(flags.config);
    if (flags.n) ctx.config.n = flags.n;
    if (flags.seed_set) ctx.config.seed = flags.seed;
    if (flags.out.empty()) out_dir = ctx.config.output.directory;
    config_ok = true;
    ctx.report["config"] = to_json(ctx.config);
    commands.at(ctx.command).second(ctx);
  } catch (const ValidationError& e) {
    code = kValidation, errors.push_back(error_entry("ValidationError", e));
  } catch (const DomainError& e) {
    code = kValidation, errors.push_back(error_entry("DomainError", e));
  } catch (const ConvergenceError& e) {
    json entry = error_entry("ConvergenceError", e);
    entry["last_estimate"] = e.last_estimate();
    code = kSolver, errors.push_back(entry);
  } catch (const ClassificationError& e) {
    json entry = error_entry("ClassificationError", e);
    json samples = json::array();
    for (const auto& [a, b] : e.samples()) samples.push_back({a, b});
    entry["samples"] = samples;
    code = kSolver, errors.push_back(entry);
  } catch (const ConsistencyError& e) {
    code = kSolver, errors.push_back(error_entry("ConsistencyError", e));
  } catch (const NotConverged& e) {
    code = kSolver, errors.push_back(error_entry("NotConverged", e));
  } catch (const ConfigError& e) {
    code = kConfig, errors.push_back(error_entry("ConfigError", e));
  } catch (const ParseError& e) {
    code = kConfig, errors.push_back(error_entry("ParseError", e));
  } catch (const EvalError& e) {
    code = kConfig, errors.push_back(error_entry("EvalError", e));
  } catch (const DimensionError& e) {
    code = kConfig, errors.push_back(error_entry("DimensionError", e));
  } catch (const SizeLimitError& e) {
    code = kConfig, errors.push_back(error_entry("SizeLimitError", e));
  } catch (const std::exception& e) {
    code = kConfig, errors.push_back(error_entry("Error", e));
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.report["artifact"] = {{"name", "nlds"}, {"version", kArtifactVersion}};
  ctx.report["command"] = ctx.command;
  ctx.report["exit_code"] = code;
  ctx.report["errors"] = errors;
  ctx.report["timings"] = {{"total_seconds", seconds}};

  try {
    std::filesystem::create_directories(out_dir);
    if (!config_ok || ctx.config.wants("json"))
      write_file((std::filesystem::path(out_dir) / (ctx.command + ".json")).string(), ctx.report.dump(2) + "\n");
    for (const auto& [name, content] : ctx.files) write_file((std::filesystem::path(out_dir) / name).string(), content);
  } catch (const std::exception& e) {
    std::cerr << "nlds: " << e.what() << '\n';
    if (code == kOk) code = kConfig;
  }

  if (!flags.quiet) {
    if (!ctx.summary.empty()) std::cout << ctx.command << ": " << ctx.summary << '\n';
  }
  for (const auto& e : errors) std::cerr << "nlds " << ctx.command << ": " << e["message"].get<std::string>() << '\n';
  return code;
}

}  // namespace nlds::cli
