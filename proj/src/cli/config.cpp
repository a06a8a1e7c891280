#include "spectral_tail/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "spectral_tail/errors.hpp"

namespace spectral_tail::cli {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const YAML::Mark& mark, std::string_view field,
                         std::string_view message) const {
    if (mark.is_null())
      throw ConfigError(fmt::format("{}: {}: {}", source_, field, message));
    throw ConfigError(fmt::format("{}:{}:{}: {}: {}", source_, mark.line + 1,
                                  mark.column + 1, field, message));
  }

  void expect_map(const YAML::Node& node, std::string_view field) const {
    if (!node.IsMap()) fail(node.Mark(), field, "expected a mapping");
  }

  void allow_keys(const YAML::Node& node, std::string_view field,
                  std::initializer_list<std::string_view> keys) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known)
        fail(kv.first.Mark(), field, fmt::format("unknown key '{}'", key));
    }
  }

  YAML::Node require(const YAML::Node& parent, const char* key,
                     std::string_view field) const {
    const auto node = parent[key];
    if (!node)
      fail(parent.Mark(), fmt::format("{}.{}", field, key), "missing field");
    return node;
  }

  double number(const YAML::Node& node, std::string_view field) const {
    if (!node.IsScalar()) fail(node.Mark(), field, "expected a number");
    try {
      const double v = node.as<double>();
      if (!std::isfinite(v)) fail(node.Mark(), field, "must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(node.Mark(), field,
           fmt::format("'{}' is not a number", node.Scalar()));
    }
  }

  std::size_t integer(const YAML::Node& node, std::string_view field) const {
    if (!node.IsScalar()) fail(node.Mark(), field, "expected an integer");
    try {
      const long long v = node.as<long long>();
      if (v < 0) fail(node.Mark(), field, "must be >= 0");
      return static_cast<std::size_t>(v);
    } catch (const YAML::BadConversion&) {
      fail(node.Mark(), field,
           fmt::format("'{}' is not an integer", node.Scalar()));
    }
  }

  bool boolean(const YAML::Node& node, std::string_view field) const {
    try {
      return node.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(node.Mark(), field, "expected true or false");
    }
  }

  std::string string(const YAML::Node& node, std::string_view field) const {
    if (!node.IsScalar()) fail(node.Mark(), field, "expected a string");
    return node.Scalar();
  }

  double number_at(const YAML::Node& parent, const char* key,
                   std::string_view field) const {
    return number(require(parent, key, field), fmt::format("{}.{}", field, key));
  }

 private:
  std::string source_;
};

Envelope read_envelope(const Reader& r, const YAML::Node& n) {
  const std::string_view field = "potential.envelope";
  r.expect_map(n, field);
  const auto kind = r.string(r.require(n, "kind", field), "potential.envelope.kind");
  if (kind == "power") {
    r.allow_keys(n, field, {"kind", "a0", "scale"});
    PowerEnvelope e{r.number_at(n, "a0", field)};
    if (n["scale"]) e.scale = r.number(n["scale"], "potential.envelope.scale");
    return e;
  }
  if (kind == "linear-cutoff") {
    r.allow_keys(n, field, {"kind", "x0"});
    return LinearCutoffEnvelope{r.number_at(n, "x0", field)};
  }
  if (kind == "example33") {
    r.allow_keys(n, field, {"kind", "b"});
    return Example33Envelope{r.number_at(n, "b", field)};
  }
  r.fail(n["kind"].Mark(), "potential.envelope.kind",
         fmt::format("unknown envelope '{}' (power, linear-cutoff, example33)",
                     kind));
}

Coefficients read_coefficients(const Reader& r, const YAML::Node& n) {
  const std::string_view field = "potential.coefficients";
  r.expect_map(n, field);
  const auto kind =
      r.string(r.require(n, "kind", field), "potential.coefficients.kind");
  if (kind == "inverse-square") {
    r.allow_keys(n, field, {"kind"});
    return InverseSquare{};
  }
  if (kind == "geometric") {
    r.allow_keys(n, field, {"kind", "ratio"});
    return Geometric{r.number_at(n, "ratio", field)};
  }
  if (kind == "explicit") {
    r.allow_keys(n, field, {"kind", "values"});
    const auto values = r.require(n, "values", field);
    if (!values.IsSequence())
      r.fail(values.Mark(), "potential.coefficients.values", "expected a list");
    ExplicitSequence s;
    for (std::size_t i = 0; i < values.size(); ++i)
      s.values.push_back(r.number(
          values[i], fmt::format("potential.coefficients.values[{}]", i)));
    return s;
  }
  r.fail(n["kind"].Mark(), "potential.coefficients.kind",
         fmt::format("unknown coefficients '{}' (inverse-square, geometric, "
                     "explicit)",
                     kind));
}

void read_p(const Reader& r, const YAML::Node& n, PotentialConfig& out) {
  const std::string_view field = "potential.p";
  r.expect_map(n, field);
  const auto kind = r.string(r.require(n, "kind", field), "potential.p.kind");
  if (kind == "constant") {
    r.allow_keys(n, field, {"kind", "c"});
    out.p_constant = true;
    out.p_knots = {Knot{0.0, r.number_at(n, "c", field)}};
    return;
  }
  if (kind == "piecewise-linear") {
    r.allow_keys(n, field, {"kind", "knots"});
    const auto knots = r.require(n, "knots", field);
    if (!knots.IsSequence() || knots.size() == 0)
      r.fail(knots.Mark(), "potential.p.knots", "expected a list of [x, p] pairs");
    out.p_constant = false;
    out.p_knots.clear();
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const auto f = fmt::format("potential.p.knots[{}]", i);
      const auto k = knots[i];
      if (!k.IsSequence() || k.size() != 2)
        r.fail(k.Mark(), f, "expected [x, p]");
      out.p_knots.push_back({r.number(k[0], f), r.number(k[1], f)});
    }
    return;
  }
  r.fail(n["kind"].Mark(), "potential.p.kind",
         fmt::format("unknown p '{}' (constant, piecewise-linear)", kind));
}

DecayClass read_decay(const Reader& r, const YAML::Node& n) {
  const std::string_view field = "potential.decay_class";
  r.expect_map(n, field);
  const auto kind =
      r.string(r.require(n, "kind", field), "potential.decay_class.kind");
  if (kind == "none") {
    r.allow_keys(n, field, {"kind"});
    return Unclassified{};
  }
  if (kind == "power") {
    r.allow_keys(n, field, {"kind", "a0"});
    return PowerDecay{r.number_at(n, "a0", field)};
  }
  if (kind == "log") {
    r.allow_keys(n, field, {"kind", "xi", "n", "b"});
    LogDecay d{};
    d.xi = r.number_at(n, "xi", field);
    d.n = static_cast<unsigned>(
        r.integer(r.require(n, "n", field), "potential.decay_class.n"));
    d.b = r.number_at(n, "b", field);
    return d;
  }
  r.fail(n["kind"].Mark(), "potential.decay_class.kind",
         fmt::format("unknown decay class '{}' (none, power, log)", kind));
}

RunConfig read_config(const Reader& r, const YAML::Node& root) {
  RunConfig c;
  if (!root.IsMap()) r.fail(root.Mark(), "config", "expected a mapping");
  r.allow_keys(root, "config", {"potential", "run", "oracle", "output"});

  const auto pot = r.require(root, "potential", "config");
  r.expect_map(pot, "potential");
  r.allow_keys(pot, "potential", {"envelope", "coefficients", "p", "decay_class",
                                  "m", "fixed_eigenbasis"});
  c.potential.envelope = read_envelope(r, r.require(pot, "envelope", "potential"));
  c.potential.coefficients =
      read_coefficients(r, r.require(pot, "coefficients", "potential"));
  read_p(r, r.require(pot, "p", "potential"), c.potential);
  c.potential.decay_class =
      read_decay(r, r.require(pot, "decay_class", "potential"));
  c.potential.m = r.number_at(pot, "m", "potential");
  if (pot["fixed_eigenbasis"])
    c.potential.fixed_eigenbasis =
        r.boolean(pot["fixed_eigenbasis"], "potential.fixed_eigenbasis");

  if (const auto run = root["run"]) {
    r.expect_map(run, "run");
    r.allow_keys(run, "run",
                 {"eps", "eps_grid", "a", "refine_depth", "C1", "C2", "samples"});
    if (const auto n = run["eps"]) {
      c.run.eps = r.number(n, "run.eps");
      if (!(*c.run.eps > 0.0)) r.fail(n.Mark(), "run.eps", "must be > 0");
    }
    if (const auto g = run["eps_grid"]) {
      r.expect_map(g, "run.eps_grid");
      r.allow_keys(g, "run.eps_grid", {"start", "stop", "count"});
      c.run.eps_grid = EpsGrid{
          r.number_at(g, "start", "run.eps_grid"),
          r.number_at(g, "stop", "run.eps_grid"),
          r.integer(r.require(g, "count", "run.eps_grid"), "run.eps_grid.count")};
      if (!(c.run.eps_grid->start > 0.0 && c.run.eps_grid->stop > 0.0))
        r.fail(g.Mark(), "run.eps_grid", "start and stop must be > 0");
      if (c.run.eps_grid->count < 1)
        r.fail(g.Mark(), "run.eps_grid.count", "must be >= 1");
    }
    if (const auto n = run["a"]) {
      c.run.a = r.number(n, "run.a");
      if (!(c.run.a > 0.0 && c.run.a < 1.0))
        r.fail(n.Mark(), "run.a", "must lie in (0, 1)");
    }
    if (const auto n = run["refine_depth"]) {
      c.run.refine_depth = r.integer(n, "run.refine_depth");
      if (*c.run.refine_depth < 1) r.fail(n.Mark(), "run.refine_depth", "must be >= 1");
    }
    if (const auto n = run["C1"]) {
      c.run.C1 = r.number(n, "run.C1");
      if (!(c.run.C1 >= 0.0)) r.fail(n.Mark(), "run.C1", "must be >= 0");
    }
    if (const auto n = run["C2"]) {
      c.run.C2 = r.number(n, "run.C2");
      if (!(c.run.C2 >= 0.0)) r.fail(n.Mark(), "run.C2", "must be >= 0");
    }
    if (const auto n = run["samples"]) {
      c.run.samples = r.integer(n, "run.samples");
      if (c.run.samples < 2) r.fail(n.Mark(), "run.samples", "must be >= 2");
    }
  }

  if (const auto o = root["oracle"]) {
    r.expect_map(o, "oracle");
    r.allow_keys(o, "oracle", {"enabled", "h", "pad", "richardson"});
    if (o["enabled"]) c.oracle.enabled = r.boolean(o["enabled"], "oracle.enabled");
    if (const auto n = o["h"]) {
      c.oracle.h = r.number(n, "oracle.h");
      if (!(*c.oracle.h > 0.0)) r.fail(n.Mark(), "oracle.h", "must be > 0");
    }
    if (const auto n = o["pad"]) {
      c.oracle.pad = r.number(n, "oracle.pad");
      if (!(c.oracle.pad >= 0.0)) r.fail(n.Mark(), "oracle.pad", "must be >= 0");
    }
    if (o["richardson"])
      c.oracle.richardson = r.boolean(o["richardson"], "oracle.richardson");
  }

  if (const auto o = root["output"]) {
    r.expect_map(o, "output");
    r.allow_keys(o, "output", {"format", "path"});
    if (o["format"]) {
      const auto f = r.string(o["format"], "output.format");
      if (f == "csv")
        c.output.format = OutputFormat::csv;
      else if (f == "json")
        c.output.format = OutputFormat::json;
      else
        r.fail(o["format"].Mark(), "output.format",
               fmt::format("unknown format '{}' (csv, json)", f));
    }
    if (o["path"]) c.output.path = r.string(o["path"], "output.path");
  }

  try {
    (void)c.family();
    (void)c.stiffness();
  } catch (const ConfigError& e) {
    r.fail(pot.Mark(), "potential", e.what());
  }
  check_config(c);
  return c;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

std::vector<double> expand_grid(const EpsGrid& grid) {
  std::vector<double> out;
  if (grid.count == 0) return out;
  if (grid.count == 1) return {grid.start};
  const double ratio = grid.stop / grid.start;
  for (std::size_t k = 0; k + 1 < grid.count; ++k)
    out.push_back(grid.start *
                  std::pow(ratio, static_cast<double>(k) /
                                      static_cast<double>(grid.count - 1)));
  out.push_back(grid.stop);
  return out;
}

EpsGrid parse_grid_flag(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
    throw ConfigError(
        fmt::format("--eps-grid: expected START:STOP:COUNT (got '{}')", text));
  EpsGrid g{};
  try {
    std::size_t used = 0;
    const std::string s0(text.substr(0, a)), s1(text.substr(a + 1, b - a - 1)),
        s2(text.substr(b + 1));
    g.start = std::stod(s0, &used);
    if (used != s0.size()) throw std::invalid_argument(s0);
    g.stop = std::stod(s1, &used);
    if (used != s1.size()) throw std::invalid_argument(s1);
    const long long n = std::stoll(s2, &used);
    if (used != s2.size() || n < 1) throw std::invalid_argument(s2);
    g.count = static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw ConfigError(
        fmt::format("--eps-grid: expected START:STOP:COUNT (got '{}')", text));
  }
  return g;
}

BranchFamily RunConfig::family() const {
  return BranchFamily(potential.envelope, potential.coefficients,
                      potential.decay_class, potential.m,
                      potential.fixed_eigenbasis);
}

Stiffness RunConfig::stiffness() const {
  if (potential.p_constant) return Stiffness::constant(potential.p_knots.at(0).value);
  return Stiffness::piecewise_linear(potential.p_knots);
}

void check_config(const RunConfig& c) {
  (void)c.family();
  (void)c.stiffness();
  if (!(c.run.a > 0.0 && c.run.a < 1.0))
    throw ConfigError(fmt::format("run.a must lie in (0, 1) (got {})", c.run.a));
  if (c.run.eps && !(*c.run.eps > 0.0))
    throw ConfigError(fmt::format("run.eps must be > 0 (got {})", *c.run.eps));
  if (const auto& g = c.run.eps_grid) {
    if (!(g->start > 0.0 && g->stop > 0.0))
      throw ConfigError("run.eps_grid: start and stop must be > 0");
    if (g->count < 1) throw ConfigError("run.eps_grid: count must be >= 1");
  }
  if (c.run.refine_depth && *c.run.refine_depth < 1)
    throw ConfigError("run.refine_depth must be >= 1");
  if (!(c.run.C1 >= 0.0 && c.run.C2 >= 0.0))
    throw ConfigError("run.C1 and run.C2 must be >= 0");
  if (c.run.samples < 2) throw ConfigError("run.samples must be >= 2");
  if (c.oracle.h && !(*c.oracle.h > 0.0))
    throw ConfigError(fmt::format("oracle.h must be > 0 (got {})", *c.oracle.h));
  if (!(c.oracle.pad >= 0.0))
    throw ConfigError(fmt::format("oracle.pad must be >= 0 (got {})", c.oracle.pad));
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  const Reader reader(source);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    reader.fail(e.mark, "syntax", e.msg);
  }
  return read_config(reader, root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

std::string serialize_config(const RunConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;

  e << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "envelope" << YAML::Value << YAML::Flow << YAML::BeginMap;
  std::visit(overloaded{
                 [&](const PowerEnvelope& v) {
                   e << YAML::Key << "kind" << YAML::Value << "power"
                     << YAML::Key << "a0" << YAML::Value << num(v.a0)
                     << YAML::Key << "scale" << YAML::Value << num(v.scale);
                 },
                 [&](const LinearCutoffEnvelope& v) {
                   e << YAML::Key << "kind" << YAML::Value << "linear-cutoff"
                     << YAML::Key << "x0" << YAML::Value << num(v.x0);
                 },
                 [&](const Example33Envelope& v) {
                   e << YAML::Key << "kind" << YAML::Value << "example33"
                     << YAML::Key << "b" << YAML::Value << num(v.b);
                 },
             },
             c.potential.envelope);
  e << YAML::EndMap;

  e << YAML::Key << "coefficients" << YAML::Value << YAML::Flow << YAML::BeginMap;
  std::visit(overloaded{
                 [&](const InverseSquare&) {
                   e << YAML::Key << "kind" << YAML::Value << "inverse-square";
                 },
                 [&](const Geometric& v) {
                   e << YAML::Key << "kind" << YAML::Value << "geometric"
                     << YAML::Key << "ratio" << YAML::Value << num(v.ratio);
                 },
                 [&](const ExplicitSequence& v) {
                   e << YAML::Key << "kind" << YAML::Value << "explicit"
                     << YAML::Key << "values" << YAML::Value << YAML::Flow
                     << YAML::BeginSeq;
                   for (double x : v.values) e << num(x);
                   e << YAML::EndSeq;
                 },
             },
             c.potential.coefficients);
  e << YAML::EndMap;

  e << YAML::Key << "p" << YAML::Value << YAML::Flow << YAML::BeginMap;
  if (c.potential.p_constant) {
    e << YAML::Key << "kind" << YAML::Value << "constant" << YAML::Key << "c"
      << YAML::Value << num(c.potential.p_knots.at(0).value);
  } else {
    e << YAML::Key << "kind" << YAML::Value << "piecewise-linear" << YAML::Key
      << "knots" << YAML::Value << YAML::BeginSeq;
    for (const auto& k : c.potential.p_knots)
      e << YAML::Flow << YAML::BeginSeq << num(k.x) << num(k.value)
        << YAML::EndSeq;
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;

  e << YAML::Key << "decay_class" << YAML::Value << YAML::Flow << YAML::BeginMap;
  std::visit(overloaded{
                 [&](const Unclassified&) {
                   e << YAML::Key << "kind" << YAML::Value << "none";
                 },
                 [&](const PowerDecay& v) {
                   e << YAML::Key << "kind" << YAML::Value << "power"
                     << YAML::Key << "a0" << YAML::Value << num(v.a0);
                 },
                 [&](const LogDecay& v) {
                   e << YAML::Key << "kind" << YAML::Value << "log" << YAML::Key
                     << "xi" << YAML::Value << num(v.xi) << YAML::Key << "n"
                     << YAML::Value << v.n << YAML::Key << "b" << YAML::Value
                     << num(v.b);
                 },
             },
             c.potential.decay_class);
  e << YAML::EndMap;
  e << YAML::Key << "m" << YAML::Value << num(c.potential.m);
  e << YAML::Key << "fixed_eigenbasis" << YAML::Value
    << c.potential.fixed_eigenbasis;
  e << YAML::EndMap;

  e << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  if (c.run.eps) e << YAML::Key << "eps" << YAML::Value << num(*c.run.eps);
  if (const auto& g = c.run.eps_grid) {
    e << YAML::Key << "eps_grid" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "start" << YAML::Value << num(g->start) << YAML::Key
      << "stop" << YAML::Value << num(g->stop) << YAML::Key << "count"
      << YAML::Value << g->count << YAML::EndMap;
  }
  e << YAML::Key << "a" << YAML::Value << num(c.run.a);
  if (c.run.refine_depth)
    e << YAML::Key << "refine_depth" << YAML::Value << *c.run.refine_depth;
  e << YAML::Key << "C1" << YAML::Value << num(c.run.C1);
  e << YAML::Key << "C2" << YAML::Value << num(c.run.C2);
  e << YAML::Key << "samples" << YAML::Value << c.run.samples;
  e << YAML::EndMap;

  e << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "enabled" << YAML::Value << c.oracle.enabled;
  if (c.oracle.h) e << YAML::Key << "h" << YAML::Value << num(*c.oracle.h);
  e << YAML::Key << "pad" << YAML::Value << num(c.oracle.pad);
  e << YAML::Key << "richardson" << YAML::Value << c.oracle.richardson;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "format" << YAML::Value
    << (c.output.format == OutputFormat::csv ? "csv" : "json");
  if (c.output.path)
    e << YAML::Key << "path" << YAML::Value << YAML::DoubleQuoted
      << *c.output.path;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace spectral_tail::cli
