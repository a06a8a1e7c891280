#include "spectral_tail/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "spectral_tail/errors.hpp"

namespace spectral_tail {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_nonneg_x(double x, const char* what) {
  if (!(x >= 0.0))
    throw DomainError(fmt::format("{}: x must be >= 0 (got {})", what, x));
}

double example33_value(double b, double x) {
  const double lnln_b = std::log(std::log(b));
  if (x <= b) return 2.0 / lnln_b - x / (b * lnln_b);
  return 1.0 / std::log(std::log(x));
}

}  // namespace

double iterated_log(unsigned n, double x) {
  double v = x;
  for (unsigned k = 0; k < n; ++k) {
    if (!(v > 0.0))
      throw DomainError(fmt::format(
          "iterated_log: ln_{} undefined at x = {} (intermediate {} <= 0)", n,
          x, v));
    v = std::log(v);
  }
  return v;
}

// ---------------------------------------------------------------------------

Stiffness::Stiffness(std::vector<Knot> knots) : knots_(std::move(knots)) {
  lower_ = upper_ = knots_.front().value;
  for (const auto& k : knots_) {
    lower_ = std::min(lower_, k.value);
    upper_ = std::max(upper_, k.value);
  }
}

Stiffness Stiffness::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ConfigError(fmt::format("p: constant must be positive (got {})", c));
  return Stiffness({Knot{0.0, c}});
}

Stiffness Stiffness::piecewise_linear(std::vector<Knot> knots) {
  if (knots.empty()) throw ConfigError("p: piecewise-linear needs knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    if (!std::isfinite(k.x) || k.x < 0.0)
      throw ConfigError(fmt::format("p: knot {} has invalid x = {}", i, k.x));
    if (!(k.value > 0.0) || !std::isfinite(k.value))
      throw ConfigError(
          fmt::format("p: knot {} value must be positive (got {})", i, k.value));
    if (i > 0 && !(k.x > knots[i - 1].x))
      throw ConfigError(fmt::format(
          "p: knot abscissae must be strictly increasing (knot {})", i));
  }
  return Stiffness(std::move(knots));
}

double Stiffness::operator()(double x) const {
  require_nonneg_x(x, "p");
  if (x <= knots_.front().x) return knots_.front().value;
  if (x >= knots_.back().x) return knots_.back().value;
  const auto hi = std::upper_bound(
      knots_.begin(), knots_.end(), x,
      [](double v, const Knot& k) { return v < k.x; });
  const auto lo = hi - 1;
  const double t = (x - lo->x) / (hi->x - lo->x);
  return lo->value + t * (hi->value - lo->value);
}

std::vector<double> Stiffness::breakpoints() const {
  std::vector<double> out;
  if (knots_.size() < 2) return out;
  for (const auto& k : knots_)
    if (k.x > 0.0) out.push_back(k.x);
  return out;
}

double Stiffness::max_slope() const {
  double s = 0.0;
  for (std::size_t i = 1; i < knots_.size(); ++i)
    s = std::max(s, std::abs(knots_[i].value - knots_[i - 1].value) /
                        (knots_[i].x - knots_[i - 1].x));
  return s;
}

// ---------------------------------------------------------------------------

BranchFamily::BranchFamily(Envelope envelope, Coefficients coefficients,
                           DecayClass decay_class, double summability_exponent,
                           bool fixed_eigenbasis)
    : envelope_(std::move(envelope)),
      coefficients_(std::move(coefficients)),
      decay_class_(std::move(decay_class)),
      m_(summability_exponent),
      fixed_eigenbasis_(fixed_eigenbasis) {
  std::visit(
      overloaded{
          [](const PowerEnvelope& e) {
            if (!std::isfinite(e.a0))
              throw ConfigError("envelope power: a0 must be finite");
            if (!(e.scale > 0.0) || !std::isfinite(e.scale))
              throw ConfigError("envelope power: scale must be positive");
          },
          [](const LinearCutoffEnvelope& e) {
            if (!(e.x0 > 0.0) || !std::isfinite(e.x0))
              throw ConfigError("envelope linear-cutoff: x0 must be positive");
          },
          [](const Example33Envelope& e) {
            if (!(e.b > std::exp(3.0)) || !std::isfinite(e.b))
              throw ConfigError(fmt::format(
                  "envelope example33: b > e^3 is required (got b = {}, "
                  "e^3 = {:.6f})",
                  e.b, std::exp(3.0)));
          },
      },
      envelope_);

  if (!(m_ > 0.0) || !std::isfinite(m_))
    throw ConfigError(
        fmt::format("m must be a positive real (got {})", m_));

  std::visit(
      overloaded{
          [&](const InverseSquare&) {
            if (!(m_ > 0.5))
              throw ConfigError(fmt::format(
                  "coefficients inverse-square: sum_j j^(-2m) diverges for "
                  "m = {} (need m > 1/2)",
                  m_));
          },
          [](const Geometric& g) {
            if (!(g.ratio > 0.0 && g.ratio < 1.0))
              throw ConfigError(fmt::format(
                  "coefficients geometric: ratio must lie in (0, 1) (got {})",
                  g.ratio));
          },
          [](const ExplicitSequence& s) {
            if (s.values.empty())
              throw ConfigError("coefficients explicit: empty sequence");
            for (double v : s.values)
              if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError(
                    "coefficients explicit: values must be positive");
          },
      },
      coefficients_);

  std::visit(
      overloaded{
          [](const Unclassified&) {},
          [](const LogDecay& d) {
            if (!(d.xi > 0.0)) throw ConfigError("decay_class log: xi must be > 0");
            if (d.n < 1) throw ConfigError("decay_class log: n must be >= 1");
            if (!(d.b > 0.0)) throw ConfigError("decay_class log: b must be > 0");
          },
          [](const PowerDecay& d) {
            if (!(d.a0 > 0.0 && d.a0 < 2.0 / 3.0))
              throw ConfigError(fmt::format(
                  "decay_class power: a0 outside (0, 2/3) (got {})", d.a0));
          },
      },
      decay_class_);
}

double BranchFamily::envelope(double x) const {
  require_nonneg_x(x, "envelope");
  return std::visit(
      overloaded{
          [x](const PowerEnvelope& e) {
            return e.scale * std::pow(1.0 + x, -e.a0);
          },
          [x](const LinearCutoffEnvelope& e) {
            return std::max(0.0, 1.0 - x / e.x0);
          },
          [x](const Example33Envelope& e) { return example33_value(e.b, x); },
      },
      envelope_);
}

double BranchFamily::coefficient(std::size_t j) const {
  if (j == 0) throw DomainError("branch index j must be >= 1");
  return std::visit(
      overloaded{
          [j](const InverseSquare&) {
            const double dj = static_cast<double>(j);
            return 1.0 / (dj * dj);
          },
          [j](const Geometric& g) {
            return std::pow(g.ratio, static_cast<double>(j - 1));
          },
          [j](const ExplicitSequence& s) {
            return j <= s.values.size() ? s.values[j - 1] : 0.0;
          },
      },
      coefficients_);
}

double BranchFamily::alpha(std::size_t j, double x) const {
  if (j == 0) throw DomainError("alpha: branch index j must be >= 1");
  require_nonneg_x(x, "alpha");
  return coefficient(j) * envelope(x);
}

std::optional<double> BranchFamily::psi(std::size_t j, double eps) const {
  if (!(eps > 0.0)) throw DomainError("psi: eps must be > 0");
  const double c = coefficient(j);
  if (c == 0.0 || c * envelope(0.0) < eps) return std::nullopt;
  const double level = eps / c;  // need g(x) >= level

  const double x = std::visit(
      overloaded{
          [&](const PowerEnvelope& e) -> double {
            if (!(e.a0 > 0.0))
              throw NumericError(fmt::format(
                  "psi: level set of branch {} is unbounded (a0 = {})", j,
                  e.a0));
            return std::max(0.0, std::pow(e.scale / level, 1.0 / e.a0) - 1.0);
          },
          [&](const LinearCutoffEnvelope& e) -> double {
            return std::max(0.0, e.x0 * (1.0 - level));
          },
          [&](const Example33Envelope& e) -> double {
            const double lnln_b = std::log(std::log(e.b));
            if (level >= 1.0 / lnln_b)
              return std::max(0.0, e.b * (2.0 - level * lnln_b));
            return std::exp(std::exp(1.0 / level));
          },
      },
      envelope_);
  if (!std::isfinite(x))
    throw NumericError(fmt::format(
        "psi: level set sup for branch {} at eps = {} exceeds the double range",
        j, eps));
  return x;
}

std::size_t BranchFamily::l_epsilon(double eps) const {
  if (!(eps > 0.0)) throw DomainError("l_epsilon: eps must be > 0");
  const double g0 = envelope(0.0);
  if (const auto* s = std::get_if<ExplicitSequence>(&coefficients_)) {
    return static_cast<std::size_t>(std::count_if(
        s->values.begin(), s->values.end(),
        [&](double c) { return c * g0 >= eps; }));
  }
  if (std::holds_alternative<InverseSquare>(coefficients_)) {
    // j^-2 g0 >= eps  <=>  j <= sqrt(g0 / eps); fix rounding at the edge.
    auto j = static_cast<std::size_t>(std::floor(std::sqrt(g0 / eps)));
    while (j > 0 && coefficient(j) * g0 < eps) --j;
    while (coefficient(j + 1) * g0 >= eps) ++j;
    return j;
  }
  std::size_t j = 0;
  while (coefficient(j + 1) * g0 >= eps) ++j;
  return j;
}

std::optional<std::size_t> BranchFamily::branch_count() const {
  if (const auto* s = std::get_if<ExplicitSequence>(&coefficients_))
    return s->values.size();
  return std::nullopt;
}

std::vector<double> BranchFamily::breakpoints() const {
  return std::visit(
      overloaded{
          [](const PowerEnvelope&) { return std::vector<double>{}; },
          [](const LinearCutoffEnvelope& e) { return std::vector<double>{e.x0}; },
          [](const Example33Envelope& e) { return std::vector<double>{e.b}; },
      },
      envelope_);
}

double level_set_sup(const std::function<double(double)>& f, double level) {
  if (!(f(0.0) >= level))
    throw DomainError("level_set_sup: f(0) is below the level");
  double lo = 0.0;
  double hi = 1.0;
  for (int k = 0; f(hi) >= level; ++k) {
    if (k > 1100 || !std::isfinite(hi))
      throw NumericError("level_set_sup: upper bracket expansion diverged");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) {
    return c.informational || c.passed;
  });
}

namespace {

std::vector<double> sample_grid(const BranchFamily& family, const Stiffness& p,
                                std::size_t n) {
  double span = 10.0;
  for (double b : family.breakpoints()) span = std::max(span, 4.0 * b);
  for (double b : p.breakpoints()) span = std::max(span, 4.0 * b);
  std::vector<double> xs;
  xs.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k)
    xs.push_back(span * static_cast<double>(k) / static_cast<double>(n - 1));
  const double lo = std::log(1e-3), hi = std::log(span * 1e6);
  for (std::size_t k = 0; k < n; ++k)
    xs.push_back(std::exp(lo + (hi - lo) * static_cast<double>(k) /
                                   static_cast<double>(n - 1)));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

ValidationReport validate_family(const BranchFamily& family,
                                 const Stiffness& p,
                                 std::size_t sample_count) {
  if (sample_count < 2) throw DomainError("validate_family: sample_count < 2");
  const auto xs = sample_grid(family, p, sample_count);
  ValidationReport report;
  auto add = [&](std::string name, bool ok, std::string detail,
                 bool info = false) {
    report.checks.push_back({std::move(name), ok, std::move(detail), info});
  };

  // p1: 0 < c1 <= p <= c2
  {
    bool ok = p.lower_bound() > 0.0;
    for (double x : xs) {
      const double v = p(x);
      ok = ok && v >= p.lower_bound() && v <= p.upper_bound();
    }
    add("p1", ok,
        fmt::format("c1 = {}, c2 = {}", p.lower_bound(), p.upper_bound()));
  }
  // p2: bounded derivative (piecewise-linear slopes are finite)
  {
    const double s = p.max_slope();
    add("p2", std::isfinite(s), fmt::format("max |p'| = {}", s));
  }
  // p3: p nondecreasing
  {
    bool ok = true;
    double where = 0.0;
    for (std::size_t k = 1; k < xs.size() && ok; ++k)
      if (p(xs[k]) < p(xs[k - 1])) {
        ok = false;
        where = xs[k];
      }
    add("p3", ok,
        ok ? std::string("nondecreasing on sample grid")
           : fmt::format("p decreases near x = {}", where));
  }

  std::size_t branches = 8;
  if (auto n = family.branch_count()) branches = std::min(branches, *n);

  // Q1: alpha_j >= 0, strictly positive where g > 0
  {
    bool ok = true;
    for (std::size_t j = 1; j <= branches; ++j)
      for (double x : xs) {
        const double a = family.alpha(j, x);
        if (a < 0.0 || (family.envelope(x) > 0.0 && !(a > 0.0))) ok = false;
      }
    add("Q1", ok, fmt::format("checked branches 1..{}", branches));
  }
  // Q2: nonincreasing in x for every j, nonincreasing in j for every x
  {
    bool ok = true;
    std::string detail = "monotone in x and ordered in j";
    for (std::size_t j = 1; j <= branches && ok; ++j)
      for (std::size_t k = 1; k < xs.size() && ok; ++k)
        if (family.alpha(j, xs[k]) > family.alpha(j, xs[k - 1])) {
          ok = false;
          detail = fmt::format("alpha_{} increases near x = {}", j, xs[k]);
        }
    for (std::size_t j = 1; j < branches && ok; ++j)
      for (double x : xs)
        if (family.alpha(j + 1, x) > family.alpha(j, x)) {
          ok = false;
          detail = fmt::format("alpha_{} > alpha_{} at x = {}", j + 1, j, x);
          break;
        }
    add("Q2", ok, detail);
  }
  // Q3: alpha_1 -> 0; decided by the catalog entry, reported with samples
  {
    const bool decays = std::visit(
        overloaded{
            [](const PowerEnvelope& e) { return e.a0 > 0.0; },
            [](const LinearCutoffEnvelope&) { return true; },
            [](const Example33Envelope&) { return true; },
        },
        family.envelope_spec());
    const double g_first = family.envelope(xs.front());
    const double g_last = family.envelope(xs.back());
    add("Q3", decays && g_last < g_first,
        fmt::format("g({}) = {}, g({}) = {}", xs.front(), g_first, xs.back(),
                    g_last));
  }
  // summability of sum_j alpha_j(0)^m is enforced at construction
  add("summability", true,
      fmt::format("sum_j alpha_j(0)^m converges for m = {}",
                  family.summability_exponent()));
  // normalization c_1 = 1
  {
    const double c1 = family.coefficient(1);
    add("normalization", c1 == 1.0, fmt::format("c_1 = {}", c1));
  }

  std::visit(
      overloaded{
          [](const Unclassified&) {},
          [&](const LogDecay& d) {
            bool ok = true;
            std::string detail = fmt::format(
                "alpha_1(x) >= (ln_{} x)^(-{}) on sampled [{}, inf)", d.n, d.xi,
                d.b);
            const double lo = std::log(d.b), hi = std::log(d.b * 1e6);
            for (std::size_t k = 0; k < sample_count && ok; ++k) {
              const double x =
                  std::exp(lo + (hi - lo) * static_cast<double>(k) /
                                    static_cast<double>(sample_count - 1));
              double ln;
              try {
                ln = iterated_log(d.n, x);
              } catch (const DomainError&) {
                ok = false;
                detail = fmt::format("ln_{} undefined at x = {}", d.n, x);
                break;
              }
              if (!(ln > 0.0)) {
                ok = false;
                detail = fmt::format("ln_{} x <= 0 at x = {}", d.n, x);
                break;
              }
              const double a = family.alpha(1, x);
              if (a - std::pow(ln, -d.xi) < -1e-12 * a) {
                ok = false;
                detail = fmt::format("alpha_1 below (ln_{} x)^(-{}) at x = {}",
                                     d.n, d.xi, x);
              }
            }
            add("alpha1", ok, detail);
          },
          [&](const PowerDecay& d) {
            const auto* env = std::get_if<PowerEnvelope>(&family.envelope_spec());
            const bool ok = env && std::abs(env->a0 - d.a0) <= 1e-12;
            // sampled log-slope of alpha_1 far out, for the report
            const double x1 = 1e6, x2 = 1e8;
            const double g1 = family.envelope(x1), g2 = family.envelope(x2);
            const double slope = (g1 > 0.0 && g2 > 0.0)
                                     ? std::log(g2 / g1) /
                                           std::log((1.0 + x2) / (1.0 + x1))
                                     : std::numeric_limits<double>::quiet_NaN();
            add("alpha2", ok,
                fmt::format("a0 = {}, sampled log-slope of alpha_1 = {}", d.a0,
                            slope));
            const double m = family.summability_exponent();
            const double sup = (2.0 - 3.0 * d.a0) * (2.0 - 3.0 * d.a0) /
                               (2.0 * d.a0 * (4.0 - 3.0 * d.a0));
            add("exponent-range", m < sup,
                fmt::format("m = {} vs admissible sup {}", m, sup), true);
          },
      },
      family.decay_class());

  return report;
}

}  // namespace spectral_tail
