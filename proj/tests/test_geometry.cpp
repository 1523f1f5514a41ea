#include <random>

#include <gtest/gtest.h>

#include "iml/iml.hpp"

using namespace iml;

namespace {

double curvature_of(const std::function<cplx(double)>& g, double t, double h = 1e-4) {
  const cplx d1 = (g(t + h) - g(t - h)) / (2.0 * h);
  const cplx d2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
  return (std::conj(d1) * d2).imag() / std::pow(std::abs(d1), 3);
}

}  // namespace

TEST(Contains, DiscAndExampleB) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  EXPECT_TRUE(contains(disc, 0.5));
  EXPECT_FALSE(contains(disc, 2.0));
  EXPECT_TRUE(contains(example_b_domain(2.0), cplx(0.5, 0.7)));
  EXPECT_TRUE(contains(example_b_domain(2.0), cplx(0.9, 1.9)));
  EXPECT_FALSE(contains(example_b_domain(2.0), cplx(0.9, 2.1)));
  EXPECT_FALSE(contains(example_b_domain(2.0), cplx(0.8, -0.8)));
}

TEST(Contains, ConformalImageUsesInverse) {
  const DomainSpec blob = catalog_domain("blob");
  // f(0.99) and f(-0.99) on the real axis, then just outside f(1) = 1.1
  EXPECT_TRUE(contains(blob, 0.99 + 0.1 * 0.99 * 0.99));
  EXPECT_TRUE(contains(blob, -0.99 + 0.1 * 0.99 * 0.99));
  EXPECT_FALSE(contains(blob, 1.1 + 1e-6));
}

TEST(Foot, DiscRadial) {
  const BoundaryFoot f = dist_to_boundary(make_disc(0.0, 1.0), 0.3);
  EXPECT_NEAR(f.foot.real(), 1.0, 1e-15);
  EXPECT_NEAR(f.foot.imag(), 0.0, 1e-15);
  EXPECT_NEAR(f.distance, 0.7, 1e-15);
  EXPECT_NEAR(std::abs(f.inner_normal - cplx(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(f.curvature, 1.0, 1e-12);
  EXPECT_TRUE(f.unique);
}

TEST(Foot, HalfPlane) {
  const BoundaryFoot f = dist_to_boundary(make_half_plane(0.0, I), cplx(2.0, 0.25));
  EXPECT_DOUBLE_EQ(f.distance, 0.25);
  EXPECT_DOUBLE_EQ(f.curvature, 0.0);
  EXPECT_NEAR(std::abs(f.foot - cplx(2.0)), 0.0, 1e-15);
}

TEST(Foot, ExampleAIsTangentAtTheOrigin) {
  const DomainSpec d = catalog_domain("example-a-0.5");
  const double u = 0.01;
  // independent oracle: dense sampling of f(1 + e^{i theta}) near theta = pi
  double brute = 1e300;
  for (int k = -200000; k <= 200000; ++k) {
    const double th = pi + 0.2 * k / 200000.0;
    const cplx x = 1.0 + std::polar(1.0, th);
    const cplx fx = x - std::pow(x, 1.5) / 4.0;
    brute = std::min(brute, std::abs(u - fx));
  }
  const double dd = dist_to_boundary(d, u).distance;
  EXPECT_NEAR(dd, brute, 1e-9);
  EXPECT_LE(std::abs(u - dd), std::pow(u, 1.4));
}

TEST(Foot, OutsidePointIsRejected) {
  EXPECT_THROW(dist_to_boundary(make_disc(0.0, 1.0), 1.5), PreconditionError);
}

TEST(Curvature, CirclesAndBlob) {
  for (double t : {0.0, 0.25, 0.7}) {
    EXPECT_NEAR(signed_curvature(make_disc(0.0, 1.0), {0, t}), 1.0, 1e-12);
    EXPECT_NEAR(signed_curvature(make_disc_complement(0.0, 1.0), {0, t}), -1.0, 1e-12);
    EXPECT_NEAR(signed_curvature(make_disc(0.0, 2.0 / 3.0), {0, t}), 1.5, 1e-12);
  }
  // gamma(th) = f(e^{ith}) with f = z + 0.1 z^2: gamma'(0) = 1.2i, gamma''(0) = -1.4
  const double expected = 1.68 / (1.2 * 1.2 * 1.2);
  EXPECT_NEAR(signed_curvature(catalog_domain("blob"), {0, 0.0}), expected, 1e-12);
  auto g = [](double t) {
    const cplx e = std::polar(1.0, 2.0 * pi * t);
    return e + 0.1 * e * e;
  };
  EXPECT_NEAR(curvature_of(g, 0.3), signed_curvature(catalog_domain("blob"), {0, 0.3}), 1e-6);
}

TEST(Curvature, DegenerateParametrization) {
  const CurvePiece flat(Analytic{[](double t) { return cplx(t * t * t, 0.0); },
                                 [](double t) { return cplx(3.0 * t * t, 0.0); },
                                 [](double t) { return cplx(6.0 * t, 0.0); }});
  EXPECT_THROW(curve_curvature(flat, 0.0), DegenerateParametrizationError);
}

TEST(Model, Classification) {
  const DomainSpec a = classify_model(2.0);
  ASSERT_TRUE(a.is<Disc>());
  EXPECT_DOUBLE_EQ(a.get_if<Disc>()->center.real(), 0.5);
  EXPECT_DOUBLE_EQ(a.get_if<Disc>()->radius, 0.5);
  const DomainSpec b = classify_model(0.0);
  ASSERT_TRUE(b.is<HalfPlane>());
  EXPECT_TRUE(contains(b, 0.1));
  EXPECT_FALSE(contains(b, -0.1));
  const DomainSpec c = classify_model(-1.0);
  ASSERT_TRUE(c.is<DiscComplement>());
  EXPECT_DOUBLE_EQ(c.get_if<DiscComplement>()->center.real(), -1.0);
  EXPECT_DOUBLE_EQ(c.get_if<DiscComplement>()->radius, 1.0);
}

TEST(Model, DistanceAlongTheAxis) {
  for (double chi : {-3.0, -1.0, 0.0, 0.25, 1.0, 4.0}) {
    const DomainSpec d = classify_model(chi);
    const double top = std::min(1.0, chi == 0.0 ? 1.0 : 1.0 / std::abs(chi));
    for (double f : {0.01, 0.3, 0.99}) EXPECT_NEAR(dist_to_boundary(d, f * top).distance, f * top, 1e-12) << chi;
  }
}

TEST(Sampling, DiscFourPoints) {
  const auto s = boundary_sample(make_disc(0.0, 1.0), 4);
  ASSERT_EQ(s.size(), 4u);
  const cplx pts[] = {1.0, I, -1.0, -I};
  const cplx tans[] = {I, -1.0, -I, 1.0};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(std::abs(s[k].point - pts[k]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s[k].tangent - tans[k]), 0.0, 1e-15);
  }
}

TEST(Sampling, SegmentMidpoints) {
  const DomainSpec tri = make_jordan({CurvePiece(Segment{0.0, 1.0}), CurvePiece(Segment{1.0, I}), CurvePiece(Segment{I, 0.0})},
                                     "C0", "triangle");
  const auto s = boundary_sample(tri, 2);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_NEAR(std::abs(s[0].point - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1].point - 0.75), 0.0, 1e-15);
}

TEST(Sampling, HalfDiscCoversBothPiecesGraded) {
  const auto s = boundary_sample(make_half_disc(), 16, true);
  int on_axis = 0, on_arc = 0;
  for (const auto& p : s) {
    if (std::abs(p.point.imag()) < 1e-15) ++on_axis;
    if (std::abs(std::abs(p.point) - 1.0) < 1e-12) ++on_arc;
  }
  EXPECT_EQ(on_axis, 16);
  EXPECT_EQ(on_arc, 16);
  // graded nodes cluster at the corners: the first gap is smaller than the middle one
  EXPECT_LT(std::abs(s[1].point - s[0].point), std::abs(s[8].point - s[7].point));
}

TEST(Maps, CayleySquareAtHalfI) {
  const MapSpec f = CayleySquare{};
  const cplx w = map_eval(f, 0.5 * I);
  EXPECT_NEAR(w.real(), -0.28, 1e-15);
  EXPECT_NEAR(w.imag(), 0.96, 1e-15);
  EXPECT_NEAR(std::abs(map_deriv(f, 0.5 * I)), 3.2, 1e-14);
}

TEST(Maps, IdentityAndPowerPerturb) {
  const MapSpec id = Moebius{1.0, 0.0, 0.0, 1.0};
  EXPECT_EQ(map_eval(id, cplx(0.3, -0.2)), cplx(0.3, -0.2));
  EXPECT_EQ(map_deriv(id, cplx(0.3, -0.2)), cplx(1.0));
  const MapSpec p = PowerPerturb{0.5};
  EXPECT_NEAR(std::abs(map_eval(p, 0.09) - (0.09 - 0.027 / 4.0)), 0.0, 1e-16);
  EXPECT_THROW(map_eval(p, -1.0), DomainError);
}

TEST(Maps, InvertRoundTrips) {
  EXPECT_NEAR(std::abs(map_invert(Moebius{}, 0.3, 0.0) - 0.3), 0.0, 1e-15);
  const MapSpec c = CayleySquare{};
  EXPECT_NEAR(std::abs(map_invert(c, map_eval(c, 0.5 * I), 0.4 * I) - 0.5 * I), 0.0, 1e-10);
  const MapSpec p = PowerPerturb{0.5};
  EXPECT_NEAR(std::abs(map_invert(p, map_eval(p, 0.09), 0.1) - 0.09), 0.0, 1e-10);
}

TEST(Maps, InvertFailureCarriesIterate) {
  // exp never reaches 0
  try {
    map_invert(Exp{}, 0.0, 1.0, 10);
    FAIL() << "expected InversionError";
  } catch (const InversionError& e) {
    EXPECT_GT(e.residual(), 0.0);
    EXPECT_TRUE(std::isfinite(e.last_iterate().real()));
  }
}

TEST(Maps, ChainRuleAgainstStencil) {
  const MapSpec comp = Composition{{Affine{cplx(0.5, 0.1), 0.2}, Polynomial{{0.0, 1.0, 0.3}}, Exp{}}};
  const cplx z(0.1, 0.2);
  const double h = 1e-3;
  const cplx fd = (-map_eval(comp, z + 2.0 * h) + 8.0 * map_eval(comp, z + h) - 8.0 * map_eval(comp, z - h) +
                   map_eval(comp, z - 2.0 * h)) /
                  (12.0 * h);
  EXPECT_NEAR(std::abs(map_deriv(comp, z) - fd) / std::abs(fd), 0.0, 1e-10);
}

TEST(Maps, DegenerateConstructionRejected) {
  EXPECT_THROW(MapSpec(Moebius{1.0, 2.0, 1.0, 2.0}), PreconditionError);
  EXPECT_THROW(MapSpec(PowerPerturb{1.5}), PreconditionError);
  EXPECT_THROW(MapSpec(Affine{0.0, 1.0}), PreconditionError);
}

TEST(Properties, FootFlipsOnCatalogDomains) {
  std::mt19937_64 rng(3);
  for (const char* name : {"unit-disc", "half-disc", "annulus-0.3", "model-chi--1", "example-a-0.25", "ellipse"}) {
    const DomainSpec d = catalog_domain(name);
    for (int k = 0; k < 200; ++k) {
      const cplx z = detail::random_interior(d, rng);
      const BoundaryFoot f = dist_to_boundary(d, z);
      EXPECT_TRUE(contains(d, f.foot + 1e-6 * f.inner_normal)) << name << " " << z;
      EXPECT_FALSE(contains(d, f.foot - 1e-6 * f.inner_normal)) << name << " " << z;
      EXPECT_LE(f.distance, std::abs(z - f.foot) + 1e-15);
    }
  }
}

TEST(Properties, CurvatureReparametrisation) {
  const CurvePiece arc(Arc{cplx(0.5, 0.5), 2.0, 0.1, 3.0});
  const CurvePiece sq(Analytic{[&](double s) { return arc.point(s * s); },
                               [&](double s) { return arc.jet(s * s).d1 * (2.0 * s); },
                               [&](double s) { return arc.jet(s * s).d2 * (4.0 * s * s) + arc.jet(s * s).d1 * 2.0; }});
  for (double s : {0.1, 0.5, 0.9}) EXPECT_NEAR(curve_curvature(sq, s), curve_curvature(arc, s * s), 1e-9);
}

TEST(Serialize, RoundTrip) {
  const std::pair<const char*, cplx> cases[] = {{"unit-disc", {0.1, 0.2}},    {"half-plane", {0.1, 0.7}},
                                                {"annulus-0.5", {0.7, 0.1}}, {"blob", {0.1, 0.2}},
                                                {"example-b-H4", {0.2, 1.0}}, {"example-a-0.25", {0.8, 0.1}}};
  for (const auto& [name, z] : cases) {
    const DomainSpec d = catalog_domain(name);
    const DomainSpec back = parse_domain(dump_domain(d));
    EXPECT_EQ(dump_domain(back), dump_domain(d)) << name;
    ASSERT_TRUE(contains(d, z)) << name;
    EXPECT_EQ(dist_to_boundary(back, z).distance, dist_to_boundary(d, z).distance) << name;
  }
}

TEST(Serialize, MalformedInput) {
  EXPECT_THROW(parse_domain("{not json"), SerializationError);
  EXPECT_THROW(parse_domain(R"({"variant": "Disc"})"), SerializationError);
  EXPECT_THROW(parse_domain(R"({"variant": "Teapot", "name": "x"})"), SerializationError);
}
