#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "iml/iml.hpp"

using namespace iml;

namespace {

const Tolerances& tol() {
  static const Tolerances t = Tolerances::load();
  return t;
}

std::vector<double> geometric_ts(int n) {
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(0.1 * std::pow(0.5, k));
  return t;
}

}  // namespace

TEST(Extrapolate, GeometricTail) {
  std::vector<double> s;
  for (int k = 0; k < 20; ++k) s.push_back(0.25 + 0.3 * std::pow(2.0, -k));
  const LimitEstimate e = extrapolate(s);
  EXPECT_NEAR(e.value, 0.25, 1e-8);
  EXPECT_EQ(e.raw, s);
}

TEST(Extrapolate, ConstantSequence) {
  const LimitEstimate e = extrapolate(std::vector<double>(8, 0.7));
  EXPECT_EQ(e.value, 0.7);
  EXPECT_EQ(e.error_indicator, 0.0);
}

TEST(Extrapolate, DiscExpansion) {
  // m - 1/(2d) on the unit disc at distance t is 1 / (2 (2 - t))
  std::vector<double> s;
  for (double t : geometric_ts(25)) s.push_back(1.0 / (2.0 * (2.0 - t)));
  EXPECT_NEAR(extrapolate(s).value, 0.25, 1e-9);
}

TEST(Extrapolate, TwoTermTailNeedsBothPasses) {
  std::vector<double> s;
  for (double t : geometric_ts(12)) s.push_back(1.0 + 0.5 * t + 3.0 * t * t);
  const LimitEstimate e = extrapolate(s);
  EXPECT_NEAR(e.value, 1.0, 1e-9);
  EXPECT_FALSE(e.fallback);
}

TEST(Extrapolate, VanishingDenominatorFallsBack) {
  // arithmetic progression: every second difference is zero
  std::vector<double> s{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const LimitEstimate e = extrapolate(s);
  EXPECT_TRUE(e.fallback);
  EXPECT_EQ(e.value, 6.0);
  EXPECT_EQ(e.error_indicator, 1.0);
}

TEST(Extrapolate, OscillationDiverges) {
  std::vector<double> s;
  for (int k = 0; k < 10; ++k) s.push_back((k % 2 ? -1.0 : 1.0) * std::pow(1.5, k));
  EXPECT_THROW(extrapolate(s), DivergenceError);
}

TEST(Extrapolate, Preconditions) {
  EXPECT_THROW(extrapolate({1.0, 2.0, 3.0}), PreconditionError);
  EXPECT_THROW(extrapolate({1.0, 2.0, 3.0, 4.0, NAN}), PreconditionError);
  EXPECT_THROW(extrapolate({1.0, 2.0, 3.0, 4.0, 5.0}, {0.0, 0.0}), PreconditionError);
}

TEST(Extrapolate, NoiseBandStopsAtRounding) {
  std::vector<double> s, band;
  int k = 0;
  for (double t : geometric_ts(25)) {
    // a tail that is pure noise once the signal 0.3 t falls below 1e-10
    s.push_back(0.25 + 0.3 * t + ((k++ % 3) - 1) * 1e-10);
    band.push_back(1e-10);
  }
  const LimitEstimate e = extrapolate(s, band);
  EXPECT_NEAR(e.value, 0.25, 1e-8);
  EXPECT_LT(e.used, s.size());
  EXPECT_GE(e.error_indicator, 1e-10);
}

TEST(Schedule, DefaultLengthsAndFloors) {
  EXPECT_EQ(ScheduleConfig::for_domain(make_disc(0.0, 1.0), tol()).ts().size(), 25u);
  const auto pull = ScheduleConfig::for_domain(catalog_domain("blob"), tol()).ts();
  EXPECT_GE(pull.back(), 1e-5);
  EXPECT_LT(pull.back(), 2e-5);
  const auto num = ScheduleConfig::for_domain(catalog_domain("blob-jordan"), tol()).ts();
  EXPECT_GE(num.back(), 1e-4);
  EXPECT_LT(num.back(), 2e-4);
}

TEST(Schedule, NormalRayOnTheDisc) {
  const DomainSpec d = make_disc(0.0, 1.0);
  const Anchor a = make_anchor(d, {0, 0.125});
  EXPECT_TRUE(a.c2);
  const auto pts = normal_ray(d, a, ScheduleConfig::for_domain(d, tol()));
  for (const auto& p : pts) {
    EXPECT_TRUE(contains(d, p.z));
    EXPECT_NEAR(p.d / p.t, 1.0, 1e-6);
  }
}

TEST(Schedule, LeavingTheDomainIsAScheduleError) {
  const DomainSpec d = make_disc(0.0, 1.0);
  ScheduleConfig cfg;
  cfg.t0 = 3.0;
  EXPECT_THROW(normal_ray(d, make_anchor(d, {0, 0.0}), cfg), ScheduleError);
  // on the half-disc the corner at 1 is not C2 and the ray from the middle of the
  // diameter is fine, but a ray that meets the arc first is not
  const DomainSpec hd = make_half_disc();
  ScheduleConfig far;
  far.t0 = 0.9;
  EXPECT_THROW(normal_ray(hd, make_anchor(hd, {0, 0.95}), far), ScheduleError);
}

TEST(Schedule, AnchorsAtJoinsAreNotC2) {
  EXPECT_FALSE(make_anchor(make_half_disc(), {0, 0.0}).c2);
  EXPECT_FALSE(make_anchor(catalog_domain("example-a-0.5"), {0, 0.5}).c2);
  EXPECT_TRUE(make_anchor(catalog_domain("example-a-0.5"), {0, 0.25}).c2);
}

TEST(Schedule, ParseAnchor) {
  EXPECT_EQ(parse_anchor("0.25").piece, 0u);
  EXPECT_EQ(parse_anchor("0.25").t, 0.25);
  EXPECT_EQ(parse_anchor("1:0.5").piece, 1u);
  EXPECT_EQ(parse_anchor("1:0.5").t, 0.5);
  EXPECT_THROW(parse_anchor("x"), PreconditionError);
  EXPECT_THROW(parse_anchor("1:"), PreconditionError);
  EXPECT_THROW(parse_anchor("0.5abc"), PreconditionError);
}

TEST(Schedule, PairsKeepTheirSeparation) {
  const DomainSpec d = make_disc(0.0, 1.0);
  const Anchor a = make_anchor(d, {0, 0.0});
  for (Separation s : {Separation::linear, Separation::sqrt, Separation::square}) {
    const ApproachPair p = separated_pair(d, a, s, 1e-3);
    EXPECT_NEAR(std::abs(p.z - (1.0 - 1e-3)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.w), 1.0 - 1e-3, 1e-15);
    EXPECT_NEAR(std::arg(p.w), sigma(s, 1e-3), 1e-12);
  }
  const auto ts = pair_ts(ScheduleConfig{}, 1e-4);
  EXPECT_EQ(ts.back(), 1e-4);
  EXPECT_GT(ts[ts.size() - 2], 1e-4);
}

TEST(Tolerances, LookupAndErrors) {
  EXPECT_EQ(tol().get("prop1.closed_form"), 1e-6);
  EXPECT_EQ(tol().get_int("schedule.steps"), 24);
  EXPECT_EQ(tol().get_list("example_b.heights").size(), 3u);
  EXPECT_THROW(tol().get("prop1.nope"), SerializationError);
  EXPECT_THROW(Tolerances::load("/nonexistent/tolerances.json"), SerializationError);
  const auto p = std::filesystem::temp_directory_path() / "iml_bad_tol.json";
  std::ofstream(p) << "{ nope";
  EXPECT_THROW(Tolerances::load(p.string()), SerializationError);
  std::filesystem::remove(p);
}

TEST(Scenarios, Prop1OnTheUnitDisc) {
  ScenarioInput in;
  in.domain = catalog_domain("unit-disc");
  const ScenarioReport r = scenario_prop1(in, tol());
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(r.binding().estimate, 0.25, 1e-9);
  const json j = r.to_json();
  for (const char* key : {"scenario", "inputs", "raw_trace", "estimate", "error_indicator", "target", "tolerance", "verdict"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["verdict"], "pass");
}

TEST(Scenarios, Prop1NeedsADomain) {
  EXPECT_THROW(scenario_prop1(ScenarioInput{}, tol()), PreconditionError);
}

TEST(Scenarios, Prop3OnTheDiscIsBounded) {
  ScenarioInput in;
  in.domain = catalog_domain("unit-disc");
  in.eps = 0.5;
  EXPECT_TRUE(scenario_prop3(in, tol()).pass());
}

TEST(Scenarios, HalfPlanePairsAreExact) {
  ScenarioInput in;
  in.domain = catalog_domain("half-plane");
  in.anchor = BoundaryParam{0, 0.5};
  const ScenarioReport r = scenario_prop5(in, tol());
  EXPECT_TRUE(r.pass());
  for (const auto& c : r.checks) EXPECT_LE(std::abs(c.estimate), 1e-12);
}

TEST(Scenarios, RegistryCoversTheSuite) {
  for (const auto& e : suite_entries()) EXPECT_NO_THROW(find_scenario(e.scenario)) << e.scenario;
  std::set<int> criteria;
  for (const auto& e : suite_entries()) criteria.insert(e.criterion);
  EXPECT_EQ(criteria.size(), 11u);
  EXPECT_THROW(find_scenario("prop9"), PreconditionError);
}

TEST(Scenarios, ExampleANames) {
  EXPECT_EQ(example_a_name(0.5), "example-a-0.5");
  EXPECT_EQ(catalog_domain(example_a_name(0.25)).name, "example-a-0.25");
}

TEST(Catalog, NamesResolve) {
  for (const char* name : {"unit-disc", "disc-1", "half-plane", "half-disc", "disc-complement", "blob", "blob-jordan",
                           "ellipse", "example-a-0.5", "example-b-H2", "annulus-0.5", "model-chi-1", "disc-0.5"})
    EXPECT_EQ(catalog_domain(name).name, name);
  EXPECT_THROW(catalog_domain("teapot"), PreconditionError);
  EXPECT_THROW(catalog_domain("annulus-x"), PreconditionError);
}
