#pragma once

// Scenario runners: each samples a boundary approach, estimates the limit and checks it
// against a target at a tolerance from the profile.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iml/bergman.hpp"
#include "iml/catalog.hpp"
#include "iml/distance.hpp"
#include "iml/extrapolate.hpp"
#include "iml/metrics.hpp"
#include "iml/riemann_cache.hpp"
#include "iml/schedule.hpp"
#include "iml/serialize.hpp"
#include "iml/tolerances.hpp"

namespace iml {

enum class Comparison { abs, at_most, at_least };

inline const char* comparison_name(Comparison c) {
  switch (c) {
    case Comparison::abs: return "abs";
    case Comparison::at_most: return "at_most";
    case Comparison::at_least: return "at_least";
  }
  return "?";
}

/// One pass/fail comparison inside a scenario.
struct Check {
  std::string name;
  double estimate{0.0};
  double error_indicator{0.0};
  double target{0.0};
  double tolerance{0.0};
  Comparison cmp{Comparison::abs};

  bool pass() const {
    if (!std::isfinite(estimate)) return false;
    switch (cmp) {
      case Comparison::abs: return std::abs(estimate - target) <= tolerance;
      case Comparison::at_most: return estimate <= target + tolerance;
      case Comparison::at_least: return estimate >= target - tolerance;
    }
    return false;
  }

  /// |estimate - target| / tolerance for abs checks, 0 otherwise.
  double usage() const {
    if (cmp != Comparison::abs) return 0.0;
    return tolerance > 0.0 ? std::abs(estimate - target) / tolerance : (estimate == target ? 0.0 : 1e300);
  }
};

struct ScenarioReport {
  std::string scenario;
  json inputs = json::object();
  json raw_trace = json::array();
  json extra = json::object();
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool loose{false};

  bool pass() const {
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }

  /// The check reported at top level: the first failing one, else the first (headline) check.
  const Check& binding() const {
    if (checks.empty()) throw Error("scenario produced no checks");
    for (const auto& c : checks)
      if (!c.pass()) return c;
    return checks.front();
  }

  json to_json() const {
    json j;
    j["scenario"] = scenario;
    j["inputs"] = inputs;
    j["raw_trace"] = raw_trace;
    const Check& b = binding();
    j["estimate"] = b.estimate;
    j["error_indicator"] = b.error_indicator;
    j["target"] = b.target;
    j["tolerance"] = b.tolerance;
    j["verdict"] = pass() ? "pass" : "fail";
    j["loose"] = loose;
    j["checks"] = json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name},
                             {"estimate", c.estimate},
                             {"error_indicator", c.error_indicator},
                             {"target", c.target},
                             {"tolerance", c.tolerance},
                             {"comparison", comparison_name(c.cmp)},
                             {"verdict", c.pass() ? "pass" : "fail"}});
    if (!extra.empty()) j["extra"] = extra;
    j["notes"] = notes;
    return j;
  }
};

struct ScenarioInput {
  std::optional<DomainSpec> domain;
  std::optional<BoundaryParam> anchor;
  std::optional<double> eps;
  std::optional<QuantityId> quantity;
  std::uint64_t seed{0};
  std::optional<int> steps;  // schedule length override
};

namespace detail {

inline constexpr double eps_mach = std::numeric_limits<double>::epsilon();

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

inline const DomainSpec& require_domain(const ScenarioInput& in, const char* id) {
  if (!in.domain) throw PreconditionError(std::string(id) + ": needs a domain");
  return *in.domain;
}

inline ScenarioReport start_report(const std::string& id, const ScenarioInput& in) {
  ScenarioReport r;
  r.scenario = id;
  if (in.domain) {
    r.inputs["domain"] = in.domain->name;
    try {
      r.inputs["domain_spec"] = json::parse(dump_domain(*in.domain));
    } catch (const SerializationError&) {
    }
  }
  if (in.eps) r.inputs["eps"] = *in.eps;
  if (in.quantity) r.inputs["quantity"] = quantity_name(*in.quantity);
  r.inputs["seed"] = in.seed;
  return r;
}

inline json anchor_json(const Anchor& a) {
  return {{"piece", a.param.piece}, {"t", a.param.t}, {"point", cjson(a.point)}, {"inner_normal", cjson(a.normal)},
          {"curvature", a.curvature}};
}

inline ScheduleConfig schedule_for(const DomainSpec& d, const ScenarioInput& in, const Tolerances& tol) {
  ScheduleConfig c = ScheduleConfig::for_domain(d, tol);
  if (in.steps) c.steps = *in.steps;
  return c;
}

inline json schedule_json(const ScheduleConfig& c) {
  return {{"t0", c.t0}, {"ratio", c.ratio}, {"steps", c.steps}, {"floor", c.floor}};
}

inline std::vector<QuantityId> quantities_for(const DomainSpec& d, const ScenarioInput& in, ScenarioReport& r) {
  if (in.quantity) return {*in.quantity};
  std::vector<QuantityId> out;
  for (auto q : all_quantities) {
    if (d.is<Annulus>() && q == QuantityId::caratheodory_gamma) {
      r.notes.push_back("caratheodory_gamma skipped: not available on the annulus");
      continue;
    }
    out.push_back(q);
  }
  return out;
}

inline Check limit_check(const std::string& name, const LimitEstimate& e, double target, double tol) {
  return {name, e.value, e.error_indicator, target, tol, Comparison::abs};
}

/// Curvature from central differences of the parametrisation.
inline double curvature_fd(const DomainSpec& d, BoundaryParam at, double h = 1e-4) {
  const auto pieces = boundary_pieces(d);
  const auto& piece = pieces.at(at.piece);
  double t = at.t;
  if (!piece.closed()) t = std::clamp(t, h, 1.0 - h);
  const cplx p0 = piece.point(t - h), p1 = piece.point(t), p2 = piece.point(t + h);
  const cplx d1 = (p2 - p0) / (2.0 * h);
  const cplx d2 = (p2 - 2.0 * p1 + p0) / (h * h);
  return (std::conj(d1) * d2).imag() / std::pow(std::abs(d1), 3);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Absolute rounding of a computed position near z, which feeds into d and m.
inline double position_rounding(cplx z) { return 2.0 * eps_mach * (1.0 + std::abs(z)); }

/// Normal-ray limit of value(m, d) with a noise band per term.
struct RayTerm {
  double value;
  double band;
};

inline ScenarioReport ray_limit(const std::string& id, const ScenarioInput& in, const Tolerances& tol,
                                const std::string& label, double target, const std::string& tol_prefix,
                                const std::function<RayTerm(const MetricSample&, double, cplx)>& term) {
  const DomainSpec& d = require_domain(in, id.c_str());
  ScenarioReport r = start_report(id, in);
  const Anchor a = make_anchor(d, in.anchor.value_or(BoundaryParam{0, 0.0}));
  const ScheduleConfig cfg = schedule_for(d, in, tol);
  const auto pts = normal_ray(d, a, cfg);
  const EvalPath path = eval_path(d);
  const double tolerance = tol.get(tol_prefix + "." + eval_path_name(path));
  r.inputs["anchor"] = anchor_json(a);
  r.inputs["eval_path"] = eval_path_name(path);
  r.inputs["schedule"] = schedule_json(cfg);
  double worst_unc = 0.0;
  for (auto q : quantities_for(d, in, r)) {
    std::vector<double> seq, band;
    for (const auto& p : pts) {
      const MetricSample m = density(d, p.z, q);
      const RayTerm v = term(m, p.d, p.z);
      seq.push_back(v.value);
      band.push_back(v.band);
      worst_unc = std::max(worst_unc, v.band);
      r.raw_trace.push_back({{"quantity", quantity_name(q)},
                             {"t", p.t},
                             {"z", cjson(p.z)},
                             {"d", p.d},
                             {"m", m.value},
                             {"method", m.method},
                             {"value", v.value}});
    }
    const LimitEstimate e = extrapolate(seq, band);
    r.checks.push_back(limit_check(label + " [" + quantity_name(q) + "]", e, target, tolerance));
    r.extra[std::string("terms_used_") + quantity_name(q)] = e.used;
  }
  r.extra["max_band"] = worst_unc;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ray limits: curvature term and the product 2 m d
// ---------------------------------------------------------------------------

inline ScenarioReport scenario_prop1(const ScenarioInput& in, const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, "prop1");
  const BoundaryParam at = in.anchor.value_or(BoundaryParam{0, 0.0});
  const Anchor a = make_anchor(d, at);
  if (!std::isfinite(a.curvature)) throw PreconditionError("prop1: curvature undefined at the anchor");
  auto r = detail::ray_limit("prop1", in, tol, "lim m - 1/(2d)", a.curvature / 4.0, "prop1",
                             [](const MetricSample& m, double dd, cplx z) {
                               const double big = m.value + 0.5 / dd;
                               return detail::RayTerm{m.value - 0.5 / dd,
                                                      big * (4.0 * detail::eps_mach + detail::position_rounding(z) / dd) +
                                                          m.uncertainty};
                             });
  const double fd = detail::curvature_fd(d, at);
  r.checks.push_back({"signed_curvature vs finite differences", a.curvature, 0.0, fd, tol.get("prop1.curvature_fd"),
                      Comparison::abs});
  r.extra["target_rule"] = "signed_curvature / 4";
  return r;
}

inline ScenarioReport scenario_prop2(const ScenarioInput& in, const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, "prop2");
  auto term = [](const MetricSample& m, double dd, cplx) {
    const double v = 2.0 * m.value * dd;
    return detail::RayTerm{v, 4.0 * detail::eps_mach * v + 2.0 * dd * m.uncertainty};
  };
  auto r = detail::ray_limit("prop2", in, tol, "lim 2 m d", 1.0, "prop2", term);
  // the raw product at the schedule floor, where the numerical Riemann path stops; on the
  // other paths the floor is deep enough that only the limit is meaningful
  const ScheduleConfig cfg = detail::schedule_for(d, in, tol);
  if (eval_path(d) == EvalPath::numerical && cfg.floor > 0.0) {
    const Anchor a = make_anchor(d, in.anchor.value_or(BoundaryParam{0, 0.0}));
    const ApproachPoint p = detail::approach_point(d, a, cfg.floor);
    const MetricSample m = density(d, p.z, in.quantity.value_or(QuantityId::kobayashi_kappa));
    const double v = 2.0 * m.value * p.d;
    r.checks.push_back({"2 m d at d = floor", v, 2.0 * p.d * m.uncertainty, 1.0,
                        tol.get(std::string("prop2.") + eval_path_name(eval_path(d))), Comparison::abs});
    r.raw_trace.push_back({{"quantity", "kobayashi_kappa"}, {"t", p.t}, {"z", detail::cjson(p.z)}, {"d", p.d},
                           {"m", m.value}, {"method", m.method}, {"value", v}, {"floor_sample", true}});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Boundedness of the corrected densities
// ---------------------------------------------------------------------------

inline ScenarioReport scenario_boundedness(const std::string& id, bool curvature_form, const ScenarioInput& in,
                                           const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, id.c_str());
  const double eps = in.eps.value_or(0.5);
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError(id + ": eps must lie in (0, 1)");
  ScenarioReport r = detail::start_report(id, in);
  r.inputs["eps"] = eps;
  const Anchor a = make_anchor(d, in.anchor.value_or(BoundaryParam{0, 0.0}));
  if (curvature_form && !std::isfinite(a.curvature)) throw PreconditionError(id + ": curvature undefined at the anchor");
  const ScheduleConfig cfg = detail::schedule_for(d, in, tol);
  const auto pts = normal_ray(d, a, cfg);
  const QuantityId q = in.quantity.value_or(QuantityId::kobayashi_kappa);
  r.inputs["anchor"] = detail::anchor_json(a);
  r.inputs["schedule"] = detail::schedule_json(cfg);
  r.inputs["form"] = curvature_form ? "(4m - 2/d - chi) / d^eps" : "(2 m d - 1) / d^eps";

  std::vector<double> g, band, dd;
  for (const auto& p : pts) {
    const MetricSample m = density(d, p.z, q);
    const double scale = std::pow(p.d, eps);
    double v, b;
    if (curvature_form) {
      v = (4.0 * m.value - 2.0 / p.d - a.curvature) / scale;
      b = ((4.0 * m.value + 2.0 / p.d) * (8.0 * detail::eps_mach + detail::position_rounding(p.z) / p.d) +
           8.0 * detail::eps_mach * std::abs(a.curvature) + 4.0 * m.uncertainty) /
          scale;
    } else {
      v = (2.0 * m.value * p.d - 1.0) / scale;
      b = (8.0 * detail::eps_mach * (2.0 * m.value * p.d + 1.0) + 2.0 * p.d * m.uncertainty) / scale;
    }
    g.push_back(v);
    band.push_back(b);
    dd.push_back(p.d);
    r.raw_trace.push_back({{"t", p.t}, {"z", detail::cjson(p.z)}, {"d", p.d}, {"m", m.value}, {"g", v}, {"band", b}});
  }
  const int head = tol.get_int("prop3.head");
  if (static_cast<int>(g.size()) <= head) throw ScheduleError(id + ": schedule shorter than the median window");
  std::vector<double> first;
  for (int k = 0; k < head; ++k) first.push_back(std::abs(g[k]));
  const double med = detail::median(first);
  double tail = 0.0;
  for (std::size_t k = head; k < g.size(); ++k) tail = std::max(tail, std::abs(g[k]));
  const double factor = tol.get("prop3.median_factor");
  r.checks.push_back({"max |g| after the first " + std::to_string(head) + " / their median", med > 0.0 ? tail / med : 0.0,
                      0.0, factor, 0.0, Comparison::at_most});
  // trend of |g| against d, on samples above their rounding band
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g[k]) > 10.0 * band[k]) {
      lx.push_back(std::log(dd[k]));
      ly.push_back(std::log(std::abs(g[k])));
    }
  double slope = 0.0;
  if (lx.size() >= 3) {
    slope = detail::ls_slope(lx, ly);
  } else {
    r.notes.push_back("fewer than 3 samples above the rounding band; slope check vacuous");
  }
  r.checks.push_back({"log-log slope of |g| vs d", slope, 0.0, tol.get("prop3.min_slope"), 0.0, Comparison::at_least});
  r.extra["median_head"] = med;
  r.extra["max_tail"] = tail;
  r.extra["slope_samples"] = lx.size();
  double sup = 0.0;
  for (double v : g) sup = std::max(sup, std::abs(v));
  r.extra["sup_estimate"] = sup;
  try {
    r.extra["limit_estimate"] = extrapolate(g, band).value;
  } catch (const Error& e) {
    r.notes.push_back(std::string("no limit estimate: ") + e.what());
  }
  return r;
}

inline ScenarioReport scenario_prop3(const ScenarioInput& in, const Tolerances& tol) {
  return scenario_boundedness("prop3", false, in, tol);
}

inline ScenarioReport scenario_prop4(const ScenarioInput& in, const Tolerances& tol) {
  return scenario_boundedness("prop4", true, in, tol);
}

// ---------------------------------------------------------------------------
// Power-perturbed disc: the constant eps / 4
// ---------------------------------------------------------------------------

inline std::string example_a_name(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "example-a-%.17g", eps);
  return buf;
}

inline ScenarioReport scenario_example_a(const ScenarioInput& in, const Tolerances& tol) {
  const double eps = in.eps.value_or(0.5);
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("example-a: eps must lie in (0, 1)");
  const DomainSpec d = catalog_domain(example_a_name(eps));
  ScenarioInput local = in;
  local.domain = d;
  ScenarioReport r = detail::start_report("example-a", local);
  r.inputs["eps"] = eps;
  const auto& ci = std::get<ConformalImage>(d.variant);
  ScheduleConfig cfg = detail::schedule_for(d, in, tol);
  r.inputs["schedule"] = detail::schedule_json(cfg);

  std::vector<double> g, band;
  double factor_err = 0.0;
  for (double u : cfg.ts()) {
    double x, m;
    try {
      x = detail::invert_into_base(ci, u).real();
      m = density(d, u, QuantityId::kobayashi_kappa).value;
    } catch (const Error& e) {
      r.notes.push_back("schedule truncated at u=" + std::to_string(u) + ": " + e.what());
      break;
    }
    const double dd = dist_to_boundary(d, u).distance;
    // m(u) |f'(x)| is the density of the base disc Disc{1, 1} at x
    const double fp = std::abs(map_deriv(ci.map, x));
    factor_err = std::max(factor_err, std::abs(m * fp * x * (2.0 - x) - 1.0));
    const double scale = std::pow(dd, eps);
    const double v = (2.0 * m * dd - 1.0) / scale;
    g.push_back(v);
    band.push_back(8.0 * detail::eps_mach * (2.0 * m * dd + 1.0) / scale + 1e-13 * 2.0 * m * dd / scale);
    r.raw_trace.push_back({{"u", u}, {"x", x}, {"d", dd}, {"m", m}, {"g", v}});
  }
  const LimitEstimate e = extrapolate(g, band);
  r.checks.push_back(detail::limit_check("lim (2 m d - 1) / d^eps", e, eps / 4.0, tol.get("example_a.abs")));
  r.checks.push_back({"pullback factor m |f'| x (2 - x) = 1", factor_err, 0.0, 0.0, tol.get("example_a.pullback"),
                      Comparison::at_most});
  r.extra["terms_used"] = e.used;
  return r;
}

// ---------------------------------------------------------------------------
// Half-disc plus strip: two approach families to the point 1
// ---------------------------------------------------------------------------

inline ScenarioReport scenario_example_b(const ScenarioInput& in, const Tolerances& tol) {
  ScenarioReport r = detail::start_report("example-b", in);
  const auto heights = tol.get_list("example_b.heights");
  const int n_nodes = tol.get_int("example_b.n_nodes");
  const double floor = tol.get("schedule.floor_numerical");
  const double tolerance = tol.get("example_b.abs");
  const double loose_unc = tol.get("example_b.loose_uncertainty");
  const int steps = tol.get_int("example_b.steps");
  const double s0 = tol.get("example_b.s0");
  r.inputs["heights"] = heights;
  r.inputs["n_nodes"] = n_nodes;
  r.inputs["quantity"] = "m - 1/(2d), i.e. half of 2m - 1/d";
  r.notes.push_back("the combination m - 1/(2d) has limits 0 on the wall family and 1/4 on the arc family;"
                    " raw 2m - 1/d is in the trace");
  r.loose = true;

  std::vector<double> wall_est, arc_est;
  double worst_unc = 0.0;
  for (double H : heights) {
    const DomainSpec d = example_b_domain(H);
    RiemannOptions opts;
    opts.n_nodes = n_nodes;
    opts.graded = true;
    const auto rs = cached_riemann_map(d, default_base_point(d), opts);
    auto m_at = [&](cplx z, double& unc) {
      const cplx f = rs->value(z);
      const double omf = 1.0 - std::norm(f);
      const double v = std::abs(rs->deriv(z)) / omf;
      unc = rs->error_estimate() * (1.0 + 2.0 * v) / omf;
      return v;
    };
    for (int family = 0; family < 2; ++family) {
      std::vector<double> seq, band;
      for (int k = 0; k <= steps; ++k) {
        const double s = s0 * std::pow(2.0, -0.5 * k);
        const double t = std::max(s * s, floor);
        // wall: anchors 1 + i s, approached horizontally; arc: anchors exp(-i s), radially
        const cplx z = family == 0 ? cplx(1.0 - t, s) : (1.0 - t) * std::polar(1.0, -s);
        const double dd = dist_to_boundary(d, z).distance;
        double unc;
        const double m = m_at(z, unc);
        const double v = m - 0.5 / dd;
        seq.push_back(v);
        band.push_back(unc + 4.0 * detail::eps_mach * (m + 0.5 / dd));
        worst_unc = std::max(worst_unc, unc);
        r.raw_trace.push_back({{"H", H},
                               {"family", family == 0 ? "wall" : "arc"},
                               {"s", s},
                               {"z", detail::cjson(z)},
                               {"d", dd},
                               {"m", m},
                               {"value", v},
                               {"two_m_minus_inv_d", 2.0 * v}});
      }
      const LimitEstimate e = extrapolate(seq, band);
      const double target = family == 0 ? 0.0 : 0.25;
      char label[64];
      std::snprintf(label, sizeof label, "%s family, H=%g", family == 0 ? "wall" : "arc", H);
      r.checks.push_back(detail::limit_check(label, e, target, tolerance));
      (family == 0 ? wall_est : arc_est).push_back(e.value);
      worst_unc = std::max(worst_unc, e.error_indicator);
    }
    r.extra["riemann_error_estimate_H" + std::to_string(static_cast<int>(H))] = rs->error_estimate();
  }
  auto spread = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
  };
  const double shift = tol.get("example_b.truncation_shift");
  r.checks.push_back({"wall estimate spread over H", spread(wall_est), 0.0, 0.0, shift, Comparison::at_most});
  r.checks.push_back({"arc estimate spread over H", spread(arc_est), 0.0, 0.0, shift, Comparison::at_most});
  double lo = 1e300, hi = -1e300;
  for (double v : wall_est) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : arc_est) lo = std::min(lo, v), hi = std::max(hi, v);
  r.checks.push_back({"all estimates >= -delta", lo, 0.0, 0.0, tolerance, Comparison::at_least});
  r.checks.push_back({"all estimates <= 1/4 + delta", hi, 0.0, 0.25, tolerance, Comparison::at_most});
  r.extra["max_uncertainty"] = worst_unc;
  r.extra["loose_reason"] = worst_unc > loose_unc ? "uncertainty above threshold" : "C^{1,1} joins limit the solver accuracy";
  return r;
}

// ---------------------------------------------------------------------------
// Half-disc localisation inequality
// ---------------------------------------------------------------------------

inline double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

inline ScenarioReport scenario_lemma_l(const ScenarioInput& in, const Tolerances& tol) {
  ScenarioReport r = detail::start_report("lemma-l", in);
  const int n = tol.get_int("lemma_l.points");
  const double slack = tol.get("lemma_l.slack");
  r.inputs["points"] = n;
  double min_gap = 1e300, max_excess = -1e300, max_direct = 0.0;
  int accepted = 0;
  for (int i = 1; accepted < n; ++i) {
    const cplx z(2.0 * halton(i, 2) - 1.0, halton(i, 3));
    if (!(std::abs(z) < 1.0 && z.imag() > 0.0)) continue;
    ++accepted;
    const LemmaGap g = lemma_l_gap(z);
    min_gap = std::min(min_gap, g.gap);
    max_excess = std::max(max_excess, g.gap - g.bound);
    if (z.imag() > 0.05 && std::abs(z) < 0.95) {
      // direct difference of the two densities, away from the boundary
      const double direct = density(make_half_disc(), z, QuantityId::kobayashi_kappa).value - 0.5 / z.imag();
      max_direct = std::max(max_direct, std::abs(direct - g.gap) / std::max(1.0, g.gap));
    }
    if (accepted <= 20) r.raw_trace.push_back({{"z", detail::cjson(z)}, {"gap", g.gap}, {"bound", g.bound}});
  }
  r.checks.push_back({"min gap", min_gap, 0.0, 0.0, slack, Comparison::at_least});
  r.checks.push_back({"max gap - |z|/(1-|z|^2)", max_excess, 0.0, 0.0, slack, Comparison::at_most});
  double axis = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double y = 0.99 * k / 1000.0;
    const LemmaGap g = lemma_l_gap(cplx(0.0, y));
    axis = std::max(axis, std::abs(g.gap - y / ((1.0 - y) * (1.0 + y))));
  }
  r.checks.push_back({"equality on the imaginary axis", axis, 0.0, 0.0, tol.get("lemma_l.axis"), Comparison::at_most});
  r.checks.push_back({"gap(i/2)", lemma_l_gap(cplx(0.0, 0.5)).gap, 0.0, 2.0 / 3.0, tol.get("lemma_l.explicit"),
                      Comparison::abs});
  r.checks.push_back({"closed-form gap vs density difference (relative)", max_direct, 0.0, 0.0,
                      tol.get("lemma_l.direct"), Comparison::at_most});
  return r;
}

// ---------------------------------------------------------------------------
// Bergman pipeline
// ---------------------------------------------------------------------------

inline ScenarioReport scenario_bergman(const ScenarioInput& in, const Tolerances& tol) {
  ScenarioReport r = detail::start_report("bergman", in);
  const DomainSpec disc = make_disc(0.0, 1.0, "unit-disc");
  const BergmanBasis b = bergman_basis(disc, 24);
  r.checks.push_back({"K_disc(0)", kernel_diag(b, 0.0).value, 0.0, 1.0 / pi, tol.get("bergman.kernel_origin"),
                      Comparison::abs});
  r.checks.push_back({"beta_disc(0)", bergman_metric_gram(b, 0.0), 0.0, std::sqrt(2.0), tol.get("bergman.beta_origin"),
                      Comparison::abs});
  const double q = tol.get("bergman.annulus_q");
  const int degree = tol.get_int("bergman.annulus_degree");
  const DomainSpec an = make_annulus(0.0, q, 1.0, "annulus");
  const BergmanBasis ba = bergman_basis(an, degree);
  r.inputs["annulus_q"] = q;
  r.inputs["annulus_degree"] = degree;
  const int npts = tol.get_int("bergman.annulus_points");
  double rel = 0.0;
  for (int k = 0; k < npts; ++k) {
    // radii in [q + 0.2 (1 - q), q + 0.7 (1 - q)], inside the degree's truncation range
    const double rho = q + (1.0 - q) * (0.2 + 0.5 * k / std::max(1, npts - 1));
    const cplx z = std::polar(rho, 0.3 * k);
    const double kv = kernel_diag(ba, z).value;
    const double ks = annulus_kernel(q, z);
    rel = std::max(rel, std::abs(kv - ks) / ks);
    r.raw_trace.push_back({{"z", detail::cjson(z)}, {"variational", kv}, {"series", ks}});
  }
  r.checks.push_back({"annulus variational vs series kernel (relative)", rel, 0.0, 0.0, tol.get("bergman.annulus_rel"),
                      Comparison::at_most});
  std::mt19937_64 rng(in.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int nm = tol.get_int("bergman.monotone_points");
  double worst = -1e300;
  for (int k = 0; k < nm; ++k) {
    const double rho = q + (1.0 - q) * (0.01 + 0.98 * U(rng));
    const cplx z = std::polar(rho, 2.0 * pi * U(rng));
    const double kd = 1.0 / (pi * sqr((1.0 - rho) * (1.0 + rho)));
    const double ka = annulus_kernel(q, z);
    worst = std::max(worst, (kd - ka) / ka);
  }
  r.checks.push_back({"max (K_disc - K_annulus) / K_annulus", worst, 0.0, 0.0, 0.0, Comparison::at_most});
  return r;
}

// ---------------------------------------------------------------------------
// p - s along separated pairs, and the Bergman variant
// ---------------------------------------------------------------------------

inline ScenarioReport scenario_prop5(const ScenarioInput& in, const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, "prop5");
  ScenarioReport r = detail::start_report("prop5", in);
  const Anchor a = make_anchor(d, in.anchor.value_or(BoundaryParam{0, 0.0}));
  const ScheduleConfig cfg = detail::schedule_for(d, in, tol);
  const double t_end = tol.get("prop5.t_end");
  const double tolerance = d.is<HalfPlane>() ? tol.get("prop5.half_plane") : tol.get("prop5.abs");
  r.inputs["anchor"] = detail::anchor_json(a);
  r.inputs["t_end"] = t_end;
  const QuantityId kind = in.quantity.value_or(QuantityId::kobayashi_kappa);
  for (Separation sep : {Separation::linear, Separation::sqrt, Separation::square}) {
    double last = 0.0;
    for (double t : pair_ts(cfg, t_end)) {
      const ApproachPair pr = separated_pair(d, a, sep, t);
      const double p = poincare_dist(d, pr.z, pr.w, kind).value;
      const double s = s_dist(d, pr.z, pr.w);
      last = p - s;
      r.raw_trace.push_back({{"separation", separation_name(sep)},
                             {"t", t},
                             {"z", detail::cjson(pr.z)},
                             {"w", detail::cjson(pr.w)},
                             {"p", p},
                             {"s", s},
                             {"p_minus_s", p - s}});
    }
    char label[64];
    std::snprintf(label, sizeof label, "p - s at t=%g, sigma=%s", t_end, separation_name(sep));
    r.checks.push_back({label, last, 0.0, 0.0, tolerance, Comparison::abs});
  }
  return r;
}

inline ScenarioReport scenario_prop5_bergman(const ScenarioInput& in, const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, "prop5-bergman");
  ScenarioReport r = detail::start_report("prop5-bergman", in);
  const Anchor a = make_anchor(d, in.anchor.value_or(BoundaryParam{0, 0.0}));
  ScheduleConfig cfg = detail::schedule_for(d, in, tol);
  cfg.ratio = tol.get("prop5.bergman_ratio");
  const double t_end = tol.get("prop5.t_end");
  r.inputs["anchor"] = detail::anchor_json(a);
  r.inputs["t_end"] = t_end;
  for (Separation sep : {Separation::linear, Separation::sqrt, Separation::square}) {
    double last = 0.0, last_tol = 0.0;
    for (double t : pair_ts(cfg, t_end)) {
      const ApproachPair pr = separated_pair(d, a, sep, t);
      const DistanceResult b = bergman_dist(d, pr.z, pr.w);
      const double s = s_dist(d, pr.z, pr.w);
      last = b.value - std::sqrt(2.0) * s;
      last_tol = b.tolerance;
      r.raw_trace.push_back({{"separation", separation_name(sep)},
                             {"t", t},
                             {"z", detail::cjson(pr.z)},
                             {"w", detail::cjson(pr.w)},
                             {"b", b.value},
                             {"b_tolerance", b.tolerance},
                             {"s", s},
                             {"b_minus_sqrt2_s", last}});
    }
    char label[64];
    std::snprintf(label, sizeof label, "b - sqrt2 s at t=%g, sigma=%s", t_end, separation_name(sep));
    r.checks.push_back({label, last, last_tol, 0.0, tol.get("prop5.bergman"), Comparison::abs});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Distance ratios near the boundary
// ---------------------------------------------------------------------------

inline ScenarioReport scenario_prop7(const ScenarioInput& in, const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, "prop7");
  ScenarioReport r = detail::start_report("prop7", in);
  const Anchor a = make_anchor(d, in.anchor.value_or(BoundaryParam{0, 0.0}));
  const ScheduleConfig cfg = detail::schedule_for(d, in, tol);
  const double t_end = tol.get("prop7.t_end");
  const bool with_h = d.is<Disc>();
  r.inputs["anchor"] = detail::anchor_json(a);
  r.inputs["t_end"] = t_end;
  r.inputs["pair"] = "z = a + t^2 n, w = a + t n";
  if (!with_h) r.notes.push_back("h ratios are only checked on discs");
  double ps = 0.0, hs = 0.0, hp = 0.0, radial = 0.0, h_tol = 0.0;
  for (double t : pair_ts(cfg, t_end)) {
    const ApproachPair pr = radial_pair(d, a, t);
    const double p = poincare_dist(d, pr.z, pr.w).value;
    const double s = s_dist(d, pr.z, pr.w);
    ps = p / s;
    json row{{"t", t}, {"z", detail::cjson(pr.z)}, {"w", detail::cjson(pr.w)}, {"p", p}, {"s", s}, {"p_over_s", ps}};
    if (with_h) {
      const DistanceResult h = quasi_hyperbolic_dist(d, pr.z, pr.w);
      // |grad d| <= 1, so h >= |log(d(w)/d(z))|, with equality along a disc radius
      const double dz = dist_to_boundary(d, pr.z).distance, dw = dist_to_boundary(d, pr.w).distance;
      const double lower = std::abs(std::log(dw / dz));
      hs = h.value / s;
      hp = h.value / p;
      radial = h.value - lower;
      h_tol = h.tolerance;
      row["h"] = h.value;
      row["h_tolerance"] = h.tolerance;
      row["h_radial"] = lower;
    }
    r.raw_trace.push_back(row);
  }
  char label[64];
  std::snprintf(label, sizeof label, "p/s at t=%g", t_end);
  r.checks.push_back({label, ps, 0.0, 1.0, tol.get("prop7.ratio_ps"), Comparison::abs});
  if (with_h) {
    std::snprintf(label, sizeof label, "h/s at t=%g", t_end);
    r.checks.push_back({label, hs, h_tol, 2.0, tol.get("prop7.ratio_h"), Comparison::abs});
    std::snprintf(label, sizeof label, "h/p at t=%g", t_end);
    r.checks.push_back({label, hp, h_tol, 2.0, tol.get("prop7.ratio_h"), Comparison::abs});
    r.checks.push_back({"h - radial closed form", radial, h_tol, 0.0, tol.get("prop7.radial"), Comparison::abs});
  }
  return r;
}

inline ScenarioReport scenario_prop7b(const ScenarioInput& in, const Tolerances& tol) {
  const DomainSpec& d = detail::require_domain(in, "prop7b");
  if (!is_bounded(d) || !is_simply_connected(d)) throw PreconditionError("prop7b: needs a bounded simply connected domain");
  ScenarioReport r = detail::start_report("prop7b", in);
  const int n_anchor = tol.get_int("prop7b.anchors");
  const int mesh = tol.get_int("prop7b.mesh");
  const double d_end = tol.get("prop7b.d_end");
  const auto box = *bounding_box(d);
  std::vector<cplx> ws;
  for (int i = 0; i < mesh; ++i)
    for (int j = 0; j < mesh; ++j) {
      const cplx w(box[0] + (box[1] - box[0]) * (i + 0.5) / mesh, box[2] + (box[3] - box[2]) * (j + 0.5) / mesh);
      if (contains(d, w) && dist_to_boundary(d, w).distance > 1e-3) ws.push_back(w);
    }
  r.inputs["mesh_points"] = ws.size();
  r.inputs["anchors"] = n_anchor;
  std::vector<double> levels;
  for (double dl = 0.1; dl >= d_end * (1.0 - 1e-12); dl /= 10.0) levels.push_back(dl);
  std::vector<double> worst;
  for (double dl : levels) {
    double mx = 0.0;
    cplx at_z{0.0}, at_w{0.0};
    for (int j = 0; j < n_anchor; ++j) {
      const Anchor a = make_anchor(d, {0, double(j) / n_anchor});
      const cplx z = a.point + dl * a.normal;
      if (!contains(d, z)) throw ScheduleError("prop7b: normal point outside the domain");
      for (const cplx& w : ws) {
        if (std::abs(z - w) < 1e-12) continue;
        const double v = std::abs(poincare_dist(d, z, w).value / s_dist(d, z, w) - 1.0);
        if (v > mx) mx = v, at_z = z, at_w = w;
      }
    }
    worst.push_back(mx);
    r.raw_trace.push_back({{"d", dl}, {"max_abs_p_over_s_minus_1", mx}, {"z", detail::cjson(at_z)}, {"w", detail::cjson(at_w)}});
  }
  int rises = 0;
  for (std::size_t k = 1; k < worst.size(); ++k)
    if (worst[k] > worst[k - 1]) ++rises;
  r.checks.push_back({"increases of max_w |p/s - 1| along d", double(rises), 0.0, 0.0, 0.0, Comparison::at_most});
  char label[80];
  std::snprintf(label, sizeof label, "max_w |p/s - 1| at d=%g", d_end);
  r.checks.push_back({label, worst.back(), 0.0, 0.0, tol.get("prop7b.abs"), Comparison::at_most});
  return r;
}

// ---------------------------------------------------------------------------
// Oracle equivalences
// ---------------------------------------------------------------------------

/// e^{i theta} (z - a) / (1 - conj(a) z).
inline MapSpec disc_automorphism(cplx a, double theta) {
  const cplx e = std::polar(1.0, theta);
  return Moebius{e, -e * a, -std::conj(a), cplx{1.0}};
}

/// Explicit map of the upper half-disc onto the unit disc with f(a) = 0, f'(a) > 0.
inline cplx half_disc_explicit(cplx z, cplx a) {
  auto F = [](cplx x) {
    const cplx c = (1.0 + x) / (1.0 - x);
    return c * c;
  };
  auto Fp = [](cplx x) { return 4.0 * (1.0 + x) / std::pow(1.0 - x, 3); };
  const cplx Fa = F(a);
  const cplx g = (F(z) - Fa) / (F(z) - std::conj(Fa));
  // derivative at a of (F - Fa)/(F - conj Fa) is F'(a) / (Fa - conj Fa)
  const cplx ga = Fp(a) / (Fa - std::conj(Fa));
  return g * std::conj(ga) / std::abs(ga);
}

inline ScenarioReport scenario_oracles(const ScenarioInput& in, const Tolerances& tol) {
  ScenarioReport r = detail::start_report("oracles", in);
  const DomainSpec disc = make_disc(0.0, 1.0, "unit-disc");
  std::mt19937_64 rng(in.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto rand_disc = [&](double rmax) { return std::polar(rmax * std::sqrt(U(rng)), 2.0 * pi * U(rng)); };

  const int n_aut = tol.get_int("oracle.automorphisms");
  double aut = 0.0;
  for (int k = 0; k < n_aut; ++k) {
    const cplx a = rand_disc(0.9);
    const double th = 2.0 * pi * U(rng);
    const cplx z = rand_disc(0.95), w = rand_disc(0.95);
    const MapSpec phi = disc_automorphism(a, th);
    const DomainSpec img = make_conformal_image(disc, phi, "automorphism-image", 0);
    const cplx fz = map_eval(phi, z), fw = map_eval(phi, w);
    const double base = poincare_dist(disc, z, w).value;
    const double pulled = poincare_dist(img, fz, fw).value;
    const double direct = poincare_dist(disc, fz, fw).value;
    aut = std::max({aut, std::abs(pulled - base), std::abs(direct - base)});
  }
  r.checks.push_back({"disc distance under automorphisms", aut, 0.0, 0.0, tol.get("oracle.moebius"), Comparison::at_most});

  const DistanceResult h = quasi_hyperbolic_dist(disc, 0.0, 0.5);
  r.checks.push_back({"h_disc(0, 0.5) vs ln 2", h.value, h.tolerance, std::log(2.0), tol.get("oracle.qh_ln2"),
                      Comparison::abs});

  const int n_nodes = tol.get_int("oracle.riemann_nodes");
  {
    const DomainSpec jd = make_jordan({CurvePiece(Arc{0.0, 1.0, 0.0, 2.0 * pi})}, "Cinf", "disc-jordan", cplx(0.0));
    const auto rs = riemann_map(jd, 0.0, n_nodes);
    double err = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 16; ++j) {
        const cplx z = std::polar(0.99 * (i + 0.5) / 10.0, 2.0 * pi * j / 16.0 + 0.1 * i);
        err = std::max(err, std::abs(rs->value(z) - z));
      }
    r.checks.push_back({"riemann_map(disc) vs identity", err, rs->error_estimate(), 0.0, tol.get("oracle.riemann_disc"),
                        Comparison::at_most});
  }
  {
    const cplx base(0.0, 0.5);
    const DomainSpec jd = make_jordan({CurvePiece(Segment{-1.0, 1.0}), CurvePiece(Arc{0.0, 1.0, 0.0, pi})}, "C11",
                                      "half-disc-jordan", base);
    const auto rs = riemann_map(jd, base, n_nodes);
    double err = 0.0;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        const cplx z = std::polar(0.05 + 0.9 * i / 11.0, pi * (0.04 + 0.92 * j / 11.0));
        err = std::max(err, std::abs(rs->value(z) - half_disc_explicit(z, base)));
      }
    r.checks.push_back({"half-disc numerical map vs explicit map", err, rs->error_estimate(), 0.0,
                        tol.get("oracle.riemann_half_disc"), Comparison::at_most});
  }
  return r;
}

}  // namespace iml
