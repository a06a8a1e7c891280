#include "spectral_tail/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "spectral_tail/bounds.hpp"
#include "spectral_tail/errors.hpp"
#include "spectral_tail/oracle.hpp"
#include "spectral_tail/parallel.hpp"
#include "spectral_tail/partition.hpp"
#include "spectral_tail/semiclassical.hpp"

namespace spectral_tail::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{}", v); }
std::string num(std::optional<double> v) { return v ? num(*v) : std::string(); }

struct Options {
  std::string config_path;
  std::optional<double> eps;
  std::string eps_grid;
  std::optional<double> a;
  std::optional<std::size_t> refine_depth;
  std::string oracle;
  std::optional<double> h;
  std::optional<double> pad;
  std::string format;
  std::string out_path;
  std::string cells_path;
  double b = 25.0;
};

RunConfig resolve(const Options& o) {
  if (o.config_path.empty()) throw ConfigError("--config is required");
  auto c = load_config(o.config_path);
  if (o.eps) c.run.eps = *o.eps;
  if (!o.eps_grid.empty()) c.run.eps_grid = parse_grid_flag(o.eps_grid);
  if (o.a) c.run.a = *o.a;
  if (o.refine_depth) c.run.refine_depth = *o.refine_depth;
  if (!o.oracle.empty()) c.oracle.enabled = o.oracle == "on";
  if (o.h) c.oracle.h = *o.h;
  if (o.pad) c.oracle.pad = *o.pad;
  if (!o.format.empty())
    c.output.format = o.format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (!o.out_path.empty()) c.output.path = o.out_path;
  check_config(c);
  return c;
}

double require_eps(const RunConfig& c) {
  if (!c.run.eps) throw ConfigError("no eps given (--epsilon or run.eps)");
  return *c.run.eps;
}

OracleOptions oracle_options(const RunConfig& c, unsigned threads) {
  OracleOptions o;
  o.h = c.oracle.h;
  o.pad = c.oracle.pad;
  o.richardson = c.oracle.richardson;
  o.threads = threads;
  return o;
}

void check_bracket(const SpectralBracket& b) {
  if (b.n_lower > b.n_upper || b.s_lower > b.s_upper)
    throw NumericError(fmt::format(
        "bracket inverted at eps = {}: n [{}, {}], s [{}, {}]", b.eps,
        b.n_lower, b.n_upper, b.s_lower, b.s_upper));
}

// Emission sink: the configured path or the caller's stream.
class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& fallback) : stream_(&fallback) {
    if (c.output.path) {
      file_.open(*c.output.path, std::ios::binary);
      if (!file_)
        throw ConfigError(
            fmt::format("{}: cannot open output file", *c.output.path));
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

Json bracket_json(const SpectralBracket& b) {
  return Json{{"eps", b.eps},         {"M", b.cells},
              {"delta", b.delta},     {"n_lower", b.n_lower},
              {"n_upper", b.n_upper}, {"s_lower", b.s_lower},
              {"s_upper", b.s_upper}, {"l_eps", b.l_eps}};
}

constexpr const char* kBracketHeader =
    "eps,M,delta,n_lower,n_upper,s_lower,s_upper,l_eps\n";

std::string bracket_row(const SpectralBracket& b) {
  return fmt::format("{},{},{},{},{},{},{},{}\n", num(b.eps), b.cells,
                     num(b.delta), b.n_lower, b.n_upper, num(b.s_lower),
                     num(b.s_upper), b.l_eps);
}

void write_cells(const std::string& path, const SpectralBracket& b) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("{}: cannot open output file", path));
  f << "cell,left,right,n_dirichlet,s_dirichlet,n_neumann,s_neumann\n";
  for (const auto& c : b.per_cell)
    f << fmt::format("{},{},{},{},{},{},{}\n", c.index, num(c.cell.left),
                     num(c.cell.right), c.dirichlet.count, num(c.dirichlet.sum),
                     c.neumann.count, num(c.neumann.sum));
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const auto report = validate_family(c.family(), c.stiffness(), c.run.samples);
  Sink sink(c, out);
  if (c.output.format == OutputFormat::json) {
    Json checks = Json::array();
    for (const auto& k : report.checks)
      checks.push_back({{"condition", k.name},
                        {"passed", k.passed},
                        {"informational", k.informational},
                        {"detail", k.detail}});
    *sink << Json{{"passed", report.all_passed()}, {"checks", checks}}.dump(2)
          << "\n";
  } else {
    *sink << "condition,status,detail\n";
    for (const auto& k : report.checks) {
      const char* status = k.informational ? (k.passed ? "info" : "info-fail")
                                           : (k.passed ? "pass" : "fail");
      std::string detail = k.detail;
      for (auto& ch : detail)
        if (ch == ',' || ch == '\n') ch = ';';
      *sink << fmt::format("{},{},{}\n", k.name, status, detail);
    }
  }
  return report.all_passed() ? kExitOk : kExitValidationFailed;
}

int cmd_bracket(const RunConfig& c, const Options& o, unsigned threads,
                std::ostream& out) {
  const double eps = require_eps(c);
  const auto family = c.family();
  const auto p = c.stiffness();
  const auto b = assemble_bracket(family, p, eps, c.run.a, threads);
  check_bracket(b);
  if (!o.cells_path.empty()) write_cells(o.cells_path, b);
  Sink sink(c, out);
  if (c.output.format == OutputFormat::csv) {
    *sink << kBracketHeader << bracket_row(b);
    return kExitOk;
  }
  auto j = bracket_json(b);
  if (b.cells > 0) {
    const auto t = theorem_expressions(family, p, eps, c.run.a, c.run.C1, c.run.C2);
    j["theorem"] = {{"C1", t.C1},
                    {"C2", t.C2},
                    {"main", t.components.main},
                    {"alpha_pow", t.components.alpha_pow},
                    {"psi_weight", t.components.psi_weight},
                    {"lower_expr", t.lower_expr},
                    {"upper_expr", t.upper_expr},
                    {"lower_vacuous", t.lower_vacuous}};
  }
  *sink << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_partition(const RunConfig& c, std::ostream& out) {
  const double eps = require_eps(c);
  const auto part = build_partition(c.family(), eps, c.run.a);
  if (!part)
    throw AdmissibilityError(
        fmt::format("no spectrum below -{}: psi_1 is absent", eps));
  const std::size_t depth =
      c.run.refine_depth.value_or(default_refine_depth(c.run.a));
  const auto seq = refine_delta_sequence(*part, depth);
  Sink sink(c, out);
  if (c.output.format == OutputFormat::csv) {
    *sink << "i,delta\n";
    for (std::size_t i = 0; i < seq.deltas.size(); ++i)
      *sink << fmt::format("{},{}\n", i, num(seq.deltas[i]));
    return kExitOk;
  }
  Json j{{"eps", eps},          {"a", c.run.a},
         {"psi1", part->psi1},  {"M", part->cells},
         {"delta", part->delta}, {"deltas", seq.deltas}};
  j["first_unit_index"] =
      seq.first_unit_index ? Json(*seq.first_unit_index) : Json(nullptr);
  *sink << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_weyl(const RunConfig& c, unsigned threads, std::ostream& out) {
  const double eps = require_eps(c);
  const auto family = c.family();
  const auto w = weyl_tail_sum(family, c.stiffness(), eps, 1e-12, threads);
  Sink sink(c, out);
  if (c.output.format == OutputFormat::csv) {
    *sink << "eps,l_eps,weyl,quad_err\n"
          << fmt::format("{},{},{},{}\n", num(eps), w.per_branch.size(),
                         num(w.total), num(w.error_estimate));
    return kExitOk;
  }
  Json branches = Json::array();
  for (const auto& b : w.per_branch)
    branches.push_back({{"j", b.j}, {"psi", b.psi}, {"contribution", b.contribution}});
  Json j{{"eps", eps},
         {"l_eps", w.per_branch.size()},
         {"weyl", w.total},
         {"quad_err", w.error_estimate},
         {"per_branch", branches}};
  if (const auto* d = std::get_if<PowerDecay>(&family.decay_class())) {
    try {
      const auto e = error_exponents(d->a0, family.summability_exponent());
      j["exponents"] = {{"a0", e.a0},
                        {"m", e.m},
                        {"admissible_m_sup", e.admissible_m_sup},
                        {"a", e.a_param},
                        {"t0", e.t0}};
    } catch (const AdmissibilityError& e) {
      j["exponents"] = {{"error", e.what()}};
    }
  }
  *sink << j.dump(2) << "\n";
  return kExitOk;
}

Json oracle_json(const OracleResult& r) {
  Json branches = Json::array();
  for (const auto& b : r.per_branch)
    branches.push_back({{"j", b.j},
                        {"psi", b.psi},
                        {"x_max", b.x_max},
                        {"h", b.h},
                        {"eigenvalues", b.eigenvalues}});
  return Json{{"eps", r.eps},
              {"count", r.count},
              {"sum", r.sum},
              {"err", r.error()},
              {"disc_err", r.discretization_error},
              {"trunc_err", r.truncation_error},
              {"threshold_err", r.threshold_error},
              {"per_branch", branches}};
}

int cmd_oracle(const RunConfig& c, unsigned threads, std::ostream& out) {
  const double eps = require_eps(c);
  const auto r =
      negative_tail(c.family(), c.stiffness(), eps, oracle_options(c, threads));
  Sink sink(c, out);
  if (c.output.format == OutputFormat::csv) {
    *sink << "eps,count,sum,err,disc_err,trunc_err,threshold_err\n"
          << fmt::format("{},{},{},{},{},{},{}\n", num(eps), r.count, num(r.sum),
                         num(r.error()), num(r.discretization_error),
                         num(r.truncation_error), num(r.threshold_error));
  } else {
    *sink << oracle_json(r).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& c, unsigned threads, std::ostream& out,
              std::ostream& err) {
  std::vector<double> grid;
  if (c.run.eps_grid)
    grid = expand_grid(*c.run.eps_grid);
  else if (c.run.eps)
    grid = {*c.run.eps};
  else
    throw ConfigError("no eps grid given (--eps-grid or run.eps_grid)");
  const auto rows = run_sweep(c, grid, threads, err);
  Sink sink(c, out);
  if (c.output.format == OutputFormat::csv) {
    write_sweep_csv(*sink, rows);
    return kExitOk;
  }
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j{{"eps", r.eps}, {"s_lower", r.s_lower}, {"s_upper", r.s_upper},
           {"weyl", r.weyl}};
    j["oracle_sum"] = r.oracle_sum ? Json(*r.oracle_sum) : Json(nullptr);
    j["oracle_err"] = r.oracle_err ? Json(*r.oracle_err) : Json(nullptr);
    arr.push_back(j);
  }
  *sink << arr.dump(2) << "\n";
  return kExitOk;
}

int cmd_example33(const Options& o, unsigned threads, std::ostream& out) {
  if (!o.eps) throw ConfigError("example33: --epsilon is required");
  const double eps = *o.eps;
  if (!(eps > 0.0)) throw ConfigError("example33: eps must be > 0");
  const double b = o.b;
  if (!(b > std::exp(3.0)))
    throw ConfigError(fmt::format("example33: b > e^3 is required (got {})", b));
  const BranchFamily family(Example33Envelope{b}, InverseSquare{},
                            LogDecay{1.0, 2, b}, 1.0);
  const auto p = Stiffness::constant(1.0);
  const double a = o.a.value_or(0.5);

  std::vector<double> psi;
  for (std::size_t j = 1; j <= family.l_epsilon(eps); ++j)
    psi.push_back(family.psi(j, eps).value_or(0.0));
  const auto w = weyl_tail_sum(family, p, eps, 1e-12, threads);
  const auto br = assemble_bracket(family, p, eps, a, threads);
  check_bracket(br);
  std::optional<OracleResult> oracle;
  if (o.oracle != "off" && eps >= 0.5 && !psi.empty()) {
    OracleOptions opts;
    opts.h = o.h;
    if (o.pad) opts.pad = *o.pad;
    opts.threads = threads;
    oracle = negative_tail(family, p, eps, opts);
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) throw ConfigError(fmt::format("{}: cannot open output file", o.out_path));
    sink = &file;
  }
  if (o.format == "json") {
    Json j{{"eps", eps}, {"b", b}, {"alpha1_0", family.alpha(1, 0.0)},
           {"l_eps", psi.size()}, {"psi", psi}, {"weyl", w.total},
           {"bracket", bracket_json(br)}};
    j["oracle"] = oracle ? oracle_json(*oracle) : Json(nullptr);
    *sink << j.dump(2) << "\n";
    return kExitOk;
  }
  std::string psi_list;
  for (std::size_t k = 0; k < psi.size(); ++k)
    psi_list += (k ? ";" : "") + num(psi[k]);
  *sink << "eps,b,l_eps,psi,weyl,M,delta,n_lower,n_upper,s_lower,s_upper,"
           "oracle_count,oracle_sum,oracle_err\n";
  *sink << fmt::format(
      "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(eps), num(b), psi.size(),
      psi_list, num(w.total), br.cells, num(br.delta), br.n_lower, br.n_upper,
      num(br.s_lower), num(br.s_upper),
      oracle ? fmt::format("{}", oracle->count) : std::string(),
      oracle ? num(oracle->sum) : std::string(),
      oracle ? num(oracle->error()) : std::string());
  return kExitOk;
}

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("SPECTRAL_TAIL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> run_sweep(const RunConfig& config,
                                const std::vector<double>& eps_values,
                                unsigned threads, std::ostream& warnings) {
  const auto family = config.family();
  const auto p = config.stiffness();
  std::vector<std::optional<SweepRow>> rows(eps_values.size());
  std::vector<std::string> skipped(eps_values.size());
  parallel_for(eps_values.size(), threads, [&](std::size_t k) {
    const double eps = eps_values[k];
    SweepRow row{eps, 0.0, 0.0, 0.0, std::nullopt, std::nullopt};
    try {
      const auto b = assemble_bracket(family, p, eps, config.run.a, 1);
      check_bracket(b);
      row.s_lower = b.s_lower;
      row.s_upper = b.s_upper;
    } catch (const AdmissibilityError& e) {
      skipped[k] = e.what();
      return;
    }
    row.weyl = weyl_tail_sum(family, p, eps).total;
    if (config.oracle.enabled) {
      const auto r = negative_tail(family, p, eps, oracle_options(config, 1));
      row.oracle_sum = r.sum;
      row.oracle_err = r.error();
    }
    rows[k] = row;
  });
  std::vector<SweepRow> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k])
      out.push_back(*rows[k]);
    else
      warnings << fmt::format("warning: skipping eps = {}: {}\n",
                              num(eps_values[k]), skipped[k]);
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "eps,s_lower,s_upper,weyl,oracle_sum,ratio_lower,ratio_upper,"
         "ratio_oracle,oracle_err\n";
  for (const auto& r : rows) {
    const bool has_weyl = r.weyl > 0.0;
    auto ratio = [&](std::optional<double> v) {
      return has_weyl && v ? num(*v / r.weyl) : std::string();
    };
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", num(r.eps),
                       num(r.s_lower), num(r.s_upper), num(r.weyl),
                       num(r.oracle_sum), ratio(r.s_lower), ratio(r.s_upper),
                       ratio(r.oracle_sum), num(r.oracle_err));
  }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bounds, Weyl sums and reference spectra for the negative tail "
               "of half-line Sturm-Liouville operators with separable "
               "operator-valued potentials.",
               "spectral_tail"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "YAML run configuration");
  app.add_option("--epsilon", o.eps, "threshold eps > 0");
  app.add_option("--eps-grid", o.eps_grid, "geometric grid START:STOP:COUNT");
  app.add_option("--a", o.a, "partition exponent in (0, 1)");
  app.add_option("--refine-depth", o.refine_depth, "delta recursion depth");
  app.add_option("--oracle", o.oracle, "enable the reference solver")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--h", o.h, "oracle grid step");
  app.add_option("--pad", o.pad, "oracle truncation pad factor");
  app.add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", o.out_path, "output file (default stdout)");

  auto* validate = app.add_subcommand("validate", "check the standing hypotheses");
  auto* bracket = app.add_subcommand("bracket", "Dirichlet-Neumann bracket at eps");
  bracket->add_option("--cells", o.cells_path, "write the per-cell table to PATH");
  auto* partition = app.add_subcommand("partition", "partition and delta recursion");
  auto* weyl = app.add_subcommand("weyl", "semiclassical tail sum at eps");
  auto* oracle = app.add_subcommand("oracle", "reference eigenvalues below -eps");
  auto* sweep = app.add_subcommand("sweep", "bracket, Weyl and oracle over a grid");
  auto* ex33 = app.add_subcommand("example33", "log-log decay example");
  ex33->add_option("--b", o.b, "envelope constant, b > e^3")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const unsigned threads = thread_budget();
  try {
    if (ex33->parsed()) return cmd_example33(o, threads, out);
    const auto c = resolve(o);
    if (validate->parsed()) return cmd_validate(c, out);
    if (bracket->parsed()) return cmd_bracket(c, o, threads, out);
    if (partition->parsed()) return cmd_partition(c, out);
    if (weyl->parsed()) return cmd_weyl(c, threads, out);
    if (oracle->parsed()) return cmd_oracle(c, threads, out);
    if (sweep->parsed()) return cmd_sweep(c, threads, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedDecoupling& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AdmissibilityError& e) {
    err << "admissibility error: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace spectral_tail::cli
