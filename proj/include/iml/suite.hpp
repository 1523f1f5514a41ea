#pragma once

// Property sweeps, the scenario registry and the acceptance suite.

#include <future>
#include <thread>

#include "iml/scenarios.hpp"

namespace iml {

using ScenarioFn = ScenarioReport (*)(const ScenarioInput&, const Tolerances&);

namespace detail {

/// Uniform interior point by rejection from the bounding box ([-3, 3]^2 when unbounded).
template <typename Rng>
cplx random_interior(const DomainSpec& d, Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::array<double, 4> box{-3.0, 3.0, -3.0, 3.0};
  if (auto b = bounding_box(d)) box = *b;
  for (int k = 0; k < 100000; ++k) {
    const cplx z(box[0] + (box[1] - box[0]) * U(rng), box[2] + (box[3] - box[2]) * U(rng));
    if (contains(d, z)) return z;
  }
  throw Error("random_interior: rejection sampling failed for " + d.name);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace detail

/// Invariants from every module at the profile's tolerances.
inline ScenarioReport scenario_properties(const ScenarioInput& in, const Tolerances& tol) {
  ScenarioReport r = detail::start_report("properties", in);
  std::mt19937_64 rng(in.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto add = [&](const std::string& name, double v, double bound, Comparison c = Comparison::at_most) {
    r.checks.push_back({name, v, 0.0, 0.0, bound, c});
  };
  const int flip_points = tol.get_int("property.flip_points");

  // contains() flips across the foot
  {
    double bad = 0;
    for (const char* name : {"unit-disc", "half-plane", "half-disc", "disc-1", "disc-complement", "annulus-0.5",
                             "model-chi-2", "model-chi--2", "example-a-0.5", "blob", "ellipse", "blob-jordan",
                             "example-b-H2"}) {
      const DomainSpec d = catalog_domain(name);
      for (int k = 0; k < flip_points; ++k) {
        const cplx z = detail::random_interior(d, rng);
        const BoundaryFoot f = dist_to_boundary(d, z);
        if (!contains(d, f.foot + 1e-6 * f.inner_normal) || contains(d, f.foot - 1e-6 * f.inner_normal)) ++bad;
      }
    }
    add("contains() does not flip at foot +- 1e-6 normal (count)", bad, 0.0);
  }
  // foot search vs brute force on conformal images
  {
    double worst = -1e300;
    const int n_brute = tol.get_int("property.brute_samples");
    for (const char* name : {"blob", "ellipse", "example-a-0.5"}) {
      const DomainSpec d = catalog_domain(name);
      const auto piece = boundary_pieces(d)[0];
      std::vector<cplx> samples(n_brute);
      for (int j = 0; j < n_brute; ++j) samples[j] = piece.point(double(j) / n_brute);
      double h = 0.0;
      for (int j = 0; j < n_brute; ++j) h = std::max(h, std::abs(samples[(j + 1) % n_brute] - samples[j]));
      for (int k = 0; k < 10; ++k) {
        const cplx z = detail::random_interior(d, rng);
        double brute = 1e300;
        for (const cplx& p : samples) brute = std::min(brute, std::abs(z - p));
        const double ours = dist_to_boundary(d, z).distance;
        // the sampled minimum sits above the true one by at most (h/2)^2 / (2 d)
        worst = std::max({worst, ours - brute, brute - ours - h * h / (8.0 * ours)});
      }
    }
    add("dist_to_boundary vs brute force (beyond sampling gap)", worst, tol.get("property.foot_brute"));
  }
  // curvature under t -> t^2 on arcs
  {
    double worst = 0.0;
    for (const Arc arc : {Arc{0.0, 1.0, 0.0, 2.0 * pi}, Arc{cplx(1.0, -2.0), 0.5, 0.3, 2.0}, Arc{0.0, 2.0, 2.0 * pi, 0.0}}) {
      const CurvePiece base(arc);
      const CurvePiece squared(Analytic{[=](double s) { return base.point(s * s); },
                                        [=](double s) { return base.jet(s * s).d1 * (2.0 * s); },
                                        [=](double s) {
                                          const CurveJet j = base.jet(s * s);
                                          return j.d2 * (4.0 * s * s) + j.d1 * 2.0;
                                        }});
      for (double s : {0.2, 0.45, 0.7, 0.95})
        worst = std::max(worst, std::abs(curve_curvature(squared, s) - curve_curvature(base, s * s)));
    }
    add("curvature change under t -> t^2", worst, tol.get("property.curvature_reparam"));
  }
  // model domains: distance along the real axis
  {
    double worst = 0.0;
    for (double chi : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      const DomainSpec d = classify_model(chi);
      const double top = std::min(1.0, chi == 0.0 ? 1.0 : 1.0 / std::abs(chi));
      for (int k = 1; k < 20; ++k) {
        const double tau = top * k / 20.0;
        worst = std::max(worst, std::abs(dist_to_boundary(d, tau).distance - tau));
      }
    }
    add("model domain d(tau) - tau", worst, tol.get("property.model_distance"));
  }
  // chain rule over random compositions
  {
    double worst = 0.0;
    auto random_map = [&]() -> MapSpec {
      switch (static_cast<int>(4.0 * U(rng))) {
        case 0: return Moebius{cplx(1.0 + U(rng), U(rng)), cplx(U(rng), U(rng)), cplx(0.2 * U(rng), 0.2 * U(rng)), 1.0};
        case 1: return Affine{cplx(0.5 + U(rng), U(rng) - 0.5), cplx(U(rng), U(rng))};
        case 2: return Polynomial{{cplx(U(rng)), 1.0, cplx(0.2 * U(rng), 0.1 * U(rng)), cplx(0.05 * U(rng))}};
        default: return Exp{};
      }
    };
    for (int k = 0; k < 100; ++k) {
      const int depth = 1 + static_cast<int>(3.0 * U(rng)) % 3;
      std::vector<MapSpec> maps;
      for (int j = 0; j < depth; ++j) maps.push_back(random_map());
      const MapSpec comp = Composition{maps};
      const cplx z(0.5 * U(rng) - 0.25, 0.5 * U(rng) - 0.25);
      cplx x = z, prod = 1.0;
      for (const auto& m : maps) {
        prod *= map_deriv(m, x);
        x = map_eval(m, x);
      }
      // five-point stencil on the composed value as an independent check
      const double h = 1e-3;
      const cplx fd = (-map_eval(comp, z + 2.0 * h) + 8.0 * map_eval(comp, z + h) - 8.0 * map_eval(comp, z - h) +
                       map_eval(comp, z - 2.0 * h)) /
                      (12.0 * h);
      worst = std::max({worst, std::abs(map_deriv(comp, z) - prod) / std::abs(prod), std::abs(fd - prod) / std::abs(prod)});
    }
    add("chain rule and stencil derivative, relative", worst, tol.get("property.chain_rule"));
  }
  // Newton inverse then forward
  {
    double worst = 0.0;
    for (const char* name : {"blob", "ellipse", "example-a-0.5"}) {
      const DomainSpec d = catalog_domain(name);
      const auto& ci = std::get<ConformalImage>(d.variant);
      for (int k = 0; k < 50; ++k) {
        const cplx w = detail::random_interior(d, rng);
        const cplx x = detail::invert_into_base(ci, w);
        worst = std::max(worst, std::abs(map_eval(ci.map, x) - w));
      }
    }
    add("|f(f^-1(w)) - w|", worst, tol.get("property.inverse_identity"));
  }
  // node-count convergence of the Riemann solver on a smooth boundary
  {
    const DomainSpec d = catalog_domain("blob-jordan");
    const auto a = riemann_map(d, 0.0, 256);
    const auto b = riemann_map(d, 0.0, 512);
    double worst = 0.0;
    for (int k = 0; k < 40; ++k) {
      const cplx z = std::polar(0.9 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
      worst = std::max(worst, std::abs(a->value(z) - b->value(z)));
    }
    // both solves sit at the rounding floor once converged; allow a few ulps on top
    add("riemann_map 256 vs 512 nodes (bound: estimate at 256)", worst, a->error_estimate() + 64.0 * detail::eps_mach);
  }
  // automorphism orbits of the disc density
  {
    const DomainSpec disc = make_disc(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const MapSpec phi = disc_automorphism(std::polar(0.9 * U(rng), 2.0 * pi * U(rng)), 2.0 * pi * U(rng));
      const cplx z = std::polar(0.95 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
      worst = std::max(worst, detail::rel(density_value(disc, map_eval(phi, z)) * std::abs(map_deriv(phi, z)),
                                          density_value(disc, z)));
    }
    add("density |phi'| along automorphism orbits, relative", worst, tol.get("property.orbit"));
  }
  // family coincidence: all members agree on simply connected domains
  {
    double worst = 0.0;
    const int n_family = tol.get_int("property.family_points");
    const char* names[] = {"unit-disc", "half-plane", "half-disc", "model-chi-2", "blob", "ellipse", "example-a-0.5"};
    for (int k = 0; k < n_family; ++k) {
      const DomainSpec d = catalog_domain(names[k % std::size(names)]);
      const cplx z = detail::random_interior(d, rng);
      double lo = 1e300, hi = 0.0;
      for (QuantityId q : all_quantities) {
        const double v = density(d, z, q).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, (hi - lo) / lo);
    }
    // variational Bergman members against the pullback value
    const DomainSpec blob = catalog_domain("blob");
    const BergmanBasis b = bergman_basis(blob, tol.get_int("property.bergman_degree"));
    for (int k = 0; k < 50; ++k) {
      const cplx x = std::polar(0.6 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
      const cplx z = map_eval(std::get<ConformalImage>(blob.variant).map, x);
      const double kappa = density_value(blob, z);
      const double kq = std::sqrt(pi * kernel_diag(b, z).value);
      const double bq = bergman_metric_gram(b, z) / std::sqrt(2.0);
      worst = std::max({worst, detail::rel(kq, kappa), detail::rel(bq, kappa)});
    }
    add("family coincidence, relative spread", worst, tol.get("property.family"));
  }
  // monotonicity under inclusion
  {
    const DomainSpec disc = make_disc(0.0, 1.0), hd = make_half_disc();
    double worst = -1e300;
    for (int k = 0; k < 100; ++k) {
      const cplx z = detail::random_interior(hd, rng);
      worst = std::max(worst, density_value(disc, z) - density_value(hd, z));
    }
    add("kappa_disc - kappa_half_disc", worst, 0.0);
    const DomainSpec an = make_annulus(0.0, 0.5, 1.0);
    double kworst = -1e300;
    for (int k = 0; k < 50; ++k) {
      const cplx z = detail::random_interior(an, rng), w = detail::random_interior(an, rng);
      kworst = std::max(kworst, poincare_dist(disc, z, w).value - poincare_dist(an, z, w).value);
    }
    add("c_disc - k_annulus", kworst, tol.get("property.triangle_slack"));
  }
  // pullback exactness against a second parametrisation of the same image
  {
    const DomainSpec d1 = catalog_domain("blob");
    const DomainSpec d2 = make_conformal_image(make_disc(0.0, 2.0), Composition{{Affine{0.5, 0.0}, Polynomial{{0.0, 1.0, 0.1}}}},
                                               "blob-rescaled");
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const cplx z = detail::random_interior(d1, rng);
      worst = std::max(worst, detail::rel(density_value(d2, z), density_value(d1, z)));
    }
    add("pullback through two parametrisations, relative", worst, tol.get("property.pullback"));
  }
  // model-domain limit chi / 4 through the prop1 runner
  {
    double worst = 0.0;
    for (double chi : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      ScenarioInput mi;
      mi.domain = classify_model(chi);
      mi.quantity = QuantityId::kobayashi_kappa;
      worst = std::max(worst, std::abs(scenario_prop1(mi, tol).checks[0].estimate - chi / 4.0));
    }
    add("model domains: lim m - 1/(2d) - chi/4", worst, tol.get("property.model_limit"));
  }
  // triangle inequality, Moebius-type kinds
  {
    double worst = -1e300;
    const double slack = tol.get("property.triangle_slack");
    struct Case {
      const char* name;
      QuantityId kind;
    };
    for (const Case c : {Case{"unit-disc", QuantityId::kobayashi_kappa}, Case{"half-disc", QuantityId::kobayashi_kappa},
                         Case{"blob", QuantityId::kobayashi_kappa}, Case{"disc-complement", QuantityId::kobayashi_kappa},
                         Case{"disc-complement", QuantityId::caratheodory_gamma},
                         Case{"annulus-0.5", QuantityId::kobayashi_kappa}}) {
      const DomainSpec d = catalog_domain(c.name);
      for (int k = 0; k < 200; ++k) {
        const cplx a = detail::random_interior(d, rng), b = detail::random_interior(d, rng),
                   e = detail::random_interior(d, rng);
        const double ab = poincare_dist(d, a, b, c.kind).value, be = poincare_dist(d, b, e, c.kind).value,
                     ae = poincare_dist(d, a, e, c.kind).value;
        worst = std::max(worst, ae - ab - be);
      }
    }
    add("triangle excess, Poincare-type distances", worst, slack);
    // path distances: slack of twice the optimizer tolerance
    const DomainSpec disc = make_disc(0.0, 1.0);
    double path_worst = -1e300;
    for (int k = 0; k < tol.get_int("property.path_triples"); ++k) {
      const cplx a = std::polar(0.8 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
      const cplx b = std::polar(0.8 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
      const cplx e = std::polar(0.8 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
      const auto ab = quasi_hyperbolic_dist(disc, a, b), be = quasi_hyperbolic_dist(disc, b, e),
                 ae = quasi_hyperbolic_dist(disc, a, e);
      path_worst = std::max(path_worst, ae.value - ab.value - be.value - 2.0 * (ab.tolerance + be.tolerance + ae.tolerance));
      const auto bab = bergman_dist(disc, a, b), bbe = bergman_dist(disc, b, e), bae = bergman_dist(disc, a, e);
      path_worst =
          std::max(path_worst, bae.value - bab.value - bbe.value - 2.0 * (bab.tolerance + bbe.tolerance + bae.tolerance));
      // discrete form of h >= 2k - C |z - w| with C = 4
      const double k2 = 2.0 * poincare_dist(disc, a, b).value - 4.0 * std::abs(a - b);
      path_worst = std::max(path_worst, k2 - ab.value - 2.0 * ab.tolerance);
      // c <= b, with 1e-3 slack for the one-sided optimizer
      path_worst = std::max(path_worst, poincare_dist(disc, a, b).value - bab.value - tol.get("property.c_le_b_slack"));
    }
    add("path distances: triangle (h and b), h >= 2k - 4|z-w|, c <= b", path_worst, 0.0);
  }
  // scaling covariance, lambda = 3
  {
    const double lam = 3.0;
    const DomainSpec d1 = catalog_domain("blob");
    const DomainSpec d3 = make_conformal_image(make_disc(0.0, 1.0), Composition{{Polynomial{{0.0, 1.0, 0.1}}, Affine{lam, 0.0}}},
                                               "blob-x3");
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const cplx z = detail::random_interior(d1, rng), w = detail::random_interior(d1, rng);
      worst = std::max(worst, detail::rel(density_value(d3, lam * z) * lam, density_value(d1, z)));
      worst = std::max(worst, detail::rel(2.0 * density_value(d3, lam * z) * dist_to_boundary(d3, lam * z).distance,
                                          2.0 * density_value(d1, z) * dist_to_boundary(d1, z).distance));
      const double p1 = poincare_dist(d1, z, w).value, s1 = s_dist(d1, z, w);
      const double p3 = poincare_dist(d3, lam * z, lam * w).value, s3 = s_dist(d3, lam * z, lam * w);
      worst = std::max({worst, std::abs((p3 - s3) - (p1 - s1)), detail::rel(p3 / s3, p1 / s1)});
    }
    add("scaling by 3: density, 2md, p - s, p/s", worst, tol.get("property.scaling"));
  }
  // scenario-level invariants
  {
    ScenarioInput base;
    base.domain = make_disc(0.0, 2.0 / 3.0, "disc-2/3");
    base.anchor = BoundaryParam{0, 0.0};
    base.quantity = QuantityId::kobayashi_kappa;
    const auto full = scenario_prop1(base, tol);
    const Check& cf = full.checks[0];
    double excess = -1e300;
    const int K = tol.get_int("schedule.steps");
    for (const char* name : {"unit-disc", "disc-complement", "blob", "half-disc"}) {
      for (ScenarioFn fn : {&scenario_prop1, &scenario_prop2}) {
        ScenarioInput in_short, in_long;
        in_short.domain = in_long.domain = catalog_domain(name);
        in_short.quantity = in_long.quantity = QuantityId::kobayashi_kappa;
        if (std::string(name) == "half-disc") in_short.anchor = in_long.anchor = BoundaryParam{1, 0.5};
        in_short.steps = K;
        in_long.steps = K + 4;
        const Check s1 = fn(in_short, tol).checks[0], s2 = fn(in_long, tol).checks[0];
        excess = std::max(excess, std::abs(s1.estimate - s2.estimate) - s1.error_indicator);
      }
    }
    add("extrapolation change K -> K+4 minus error indicator", excess, 0.0);
    double spread = 0.0;
    for (int j = 1; j < 8; ++j) {
      ScenarioInput rot = base;
      rot.anchor = BoundaryParam{0, j / 8.0};
      spread = std::max(spread, std::abs(scenario_prop1(rot, tol).checks[0].estimate - cf.estimate));
    }
    add("prop1 on the disc, 8 anchors", spread, tol.get("property.anchor_symmetry"));
    ScenarioInput blob;
    blob.domain = catalog_domain("blob");
    add("prop1 report bitwise repeatable (mismatches)",
        scenario_prop1(blob, tol).to_json().dump() == scenario_prop1(blob, tol).to_json().dump() ? 0.0 : 1.0, 0.0);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Registry and suite
// ---------------------------------------------------------------------------

struct ScenarioInfo {
  std::string id;
  bool needs_domain;
  std::string summary;
  ScenarioFn run;
};

inline const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> reg{
      {"prop1", true, "lim m - 1/(2d) = chi/4 along the inner normal", scenario_prop1},
      {"prop2", true, "lim 2 m d = 1 along the inner normal", scenario_prop2},
      {"prop3", true, "(2 m d - 1) / d^eps stays bounded", scenario_prop3},
      {"prop4", true, "(4m - 2/d - chi) / d^eps stays bounded", scenario_prop4},
      {"example-a", false, "(2 m d - 1) / d^eps -> eps/4 on the power-perturbed disc", scenario_example_a},
      {"example-b", false, "wall and arc limits of m - 1/(2d) at the join point 1", scenario_example_b},
      {"lemma-l", false, "0 <= half-disc minus half-plane density <= |z|/(1-|z|^2)", scenario_lemma_l},
      {"bergman", false, "variational Bergman kernel against closed forms and series", scenario_bergman},
      {"prop5", true, "p - s -> 0 on pair schedules", scenario_prop5},
      {"prop5-bergman", true, "b - sqrt2 s -> 0 on pair schedules", scenario_prop5_bergman},
      {"prop7", true, "p/s -> 1, h/s -> 2, h/p -> 2 on the radial pair", scenario_prop7},
      {"prop7b", true, "max_w |p/s - 1| at 8 anchors", scenario_prop7b},
      {"oracles", false, "closed-form and explicit-map oracle equivalences", scenario_oracles},
      {"properties", false, "module invariants", scenario_properties},
  };
  return reg;
}

inline const ScenarioInfo& find_scenario(const std::string& id) {
  for (const auto& s : scenario_registry())
    if (s.id == id) return s;
  throw PreconditionError("unknown scenario '" + id + "'");
}

struct SuiteEntry {
  int criterion;
  std::string scenario;
  std::string domain;  // catalog name, empty when the scenario builds its own
  std::optional<BoundaryParam> anchor;
  std::optional<double> eps;
};

/// Exactly the runs behind the acceptance criteria.
inline std::vector<SuiteEntry> suite_entries() {
  const BoundaryParam a0{0, 0.0};
  return {
      {1, "prop1", "disc-0.6666666666666666", a0, {}},
      {1, "prop1", "disc-complement", a0, {}},
      {1, "prop1", "half-plane", BoundaryParam{0, 0.5}, {}},
      {1, "prop1", "blob", a0, {}},
      {2, "prop2", "unit-disc", a0, {}},
      {2, "prop2", "half-disc", BoundaryParam{1, 0.5}, {}},
      {2, "prop2", "blob-jordan", a0, {}},
      {3, "prop3", "example-a-0.25", BoundaryParam{0, 0.5}, 0.25},
      {3, "prop3", "example-a-0.5", BoundaryParam{0, 0.5}, 0.5},
      {3, "prop3", "unit-disc", a0, 0.25},
      {3, "prop3", "unit-disc", a0, 0.5},
      {3, "prop4", "unit-disc", a0, 0.5},
      {4, "example-a", "", {}, 0.25},
      {4, "example-a", "", {}, 0.5},
      {5, "example-b", "", {}, {}},
      {6, "lemma-l", "", {}, {}},
      {7, "bergman", "", {}, {}},
      {8, "prop5", "unit-disc", a0, {}},
      {8, "prop5", "half-plane", BoundaryParam{0, 0.5}, {}},
      {8, "prop5-bergman", "unit-disc", a0, {}},
      {9, "prop7", "unit-disc", a0, {}},
      {9, "prop7", "blob", a0, {}},
      {9, "prop7b", "unit-disc", {}, {}},
      {9, "prop7b", "ellipse", {}, {}},
      {10, "oracles", "", {}, {}},
      {11, "properties", "", {}, {}},
  };
}

struct SuiteResult {
  SuiteEntry entry;
  std::optional<ScenarioReport> report;
  std::string error;  // set when the scenario threw
  double seconds{0.0};

  bool pass() const { return report && report->pass(); }
};

inline SuiteResult run_entry(const SuiteEntry& e, const Tolerances& tol, std::uint64_t seed) {
  SuiteResult out{e, std::nullopt, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ScenarioInfo& info = find_scenario(e.scenario);
    ScenarioInput in;
    if (!e.domain.empty()) in.domain = catalog_domain(e.domain);
    in.anchor = e.anchor;
    in.eps = e.eps;
    in.seed = seed;
    out.report = info.run(in, tol);
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Runs the suite on up to `jobs` threads; results keep the entry order.
inline std::vector<SuiteResult> run_suite(const Tolerances& tol, std::uint64_t seed, unsigned jobs = 0) {
  const auto entries = suite_entries();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SuiteResult> results(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < entries.size(); i = next++) results[i] = run_entry(entries[i], tol, seed);
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::min<std::size_t>(jobs, entries.size()); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace iml
