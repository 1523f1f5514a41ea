#include <random>

#include <gtest/gtest.h>

#include "iml/iml.hpp"

using namespace iml;

namespace {

double disc_rho(cplx z, cplx w) { return std::atanh(std::abs((z - w) / (1.0 - std::conj(w) * z))); }

}  // namespace

TEST(SDist, Examples) {
  const DomainSpec hp = make_half_plane(0.0, I);
  EXPECT_EQ(s_dist(hp, I, I), 0.0);
  EXPECT_NEAR(s_dist(hp, I, 2.0 * I), 0.5 * std::log(2.0), 1e-15);
  // d = 1 at both points, |z - w| = 2
  EXPECT_NEAR(s_dist(hp, cplx(-1.0, 1.0), cplx(1.0, 1.0)), std::log(1.0 + std::sqrt(2.0)), 1e-15);
}

TEST(SDist, SinhContract) {
  const DomainSpec d = catalog_domain("blob");
  for (auto [z, w] : {std::pair{cplx(0.1, 0.2), cplx(-0.3, 0.5)}, std::pair{cplx(0.9, 0.0), cplx(0.95, 0.01)},
                      std::pair{cplx(0.0, 0.0), cplx(0.0, 1e-9)}}) {
    const double s = s_dist(d, z, w);
    const double dz = dist_to_boundary(d, z).distance, dw = dist_to_boundary(d, w).distance;
    EXPECT_NEAR(std::sinh(s) * 2.0 * std::sqrt(dz * dw) / std::abs(z - w), 1.0, 1e-12);
  }
}

TEST(Poincare, DiscAndHalfPlane) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  EXPECT_NEAR(poincare_dist(disc, 0.0, 0.5).value, std::atanh(0.5), 1e-15);
  EXPECT_NEAR(poincare_dist(disc, 0.9, 0.99).value, std::atanh(0.09 / 0.109), 1e-13);
  EXPECT_NEAR(poincare_dist(make_half_plane(0.0, I), I, 2.0 * I).value, 0.5 * std::log(2.0), 1e-15);
  EXPECT_EQ(poincare_dist(disc, 0.3, 0.3).value, 0.0);
}

TEST(Poincare, ConformalImagePullsBack) {
  const DomainSpec blob = catalog_domain("blob");
  const cplx x(0.2, -0.3), y(-0.6, 0.4);
  const auto r = poincare_dist(blob, x + 0.1 * x * x, y + 0.1 * y * y);
  EXPECT_NEAR(r.value, disc_rho(x, y), 1e-12);
  EXPECT_EQ(r.method, "pullback");
}

TEST(Poincare, AnnulusKobayashiOnly) {
  const DomainSpec an = make_annulus(0.0, 0.5, 1.0);
  EXPECT_THROW(poincare_dist(an, 0.7, -0.7, QuantityId::caratheodory_gamma), UnsupportedQuantityError);
  const auto r = poincare_dist(an, 0.7, 0.7 * I);
  EXPECT_GT(r.value, poincare_dist(make_disc(0.0, 1.0), 0.7, 0.7 * I).value);
  EXPECT_EQ(r.method, "covering_min");
}

TEST(Poincare, MoebiusInvariance) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const cplx a = std::polar(0.9 * U(rng), 2.0 * pi * U(rng)), e = std::polar(1.0, 2.0 * pi * U(rng));
    const MapSpec phi = Moebius{e, -e * a, -std::conj(a), 1.0};
    const cplx z = std::polar(0.9 * U(rng), 2.0 * pi * U(rng)), w = std::polar(0.9 * U(rng), 2.0 * pi * U(rng));
    EXPECT_NEAR(poincare_dist(disc, map_eval(phi, z), map_eval(phi, w)).value, poincare_dist(disc, z, w).value, 1e-10);
  }
}

TEST(Poincare, TriangleInequality) {
  std::mt19937_64 rng(8);
  for (const char* name : {"unit-disc", "half-plane", "blob", "annulus-0.4", "disc-complement"}) {
    const DomainSpec d = catalog_domain(name);
    for (int k = 0; k < 200; ++k) {
      const cplx a = detail::random_interior(d, rng), b = detail::random_interior(d, rng),
                 c = detail::random_interior(d, rng);
      EXPECT_LE(poincare_dist(d, a, c).value, poincare_dist(d, a, b).value + poincare_dist(d, b, c).value + 1e-9)
          << name;
    }
  }
}

TEST(QuasiHyperbolic, RadialValue) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  const auto r = quasi_hyperbolic_dist(disc, 0.0, 0.5);
  EXPECT_NEAR(r.value, std::log(2.0), 1e-3);
  EXPECT_GE(r.value, std::log(2.0) - 1e-9);
  EXPECT_TRUE(r.upper_bound);
  EXPECT_EQ(r.method, "path_opt");
  EXPECT_EQ(quasi_hyperbolic_dist(disc, 0.2, 0.2).value, 0.0);
  EXPECT_GE(quasi_hyperbolic_dist(disc, 0.9, 0.99).value, std::log(10.0) - 1e-9);
}

TEST(QuasiHyperbolic, ReturnsThePath) {
  PathPolyline path;
  const auto r = quasi_hyperbolic_dist(make_half_disc(), cplx(-0.5, 0.3), cplx(0.5, 0.3), {}, &path);
  EXPECT_EQ(path.integrand_id, "quasi_hyperbolic_inv_d");
  ASSERT_GE(path.nodes.size(), 2u);
  EXPECT_EQ(path.nodes.front(), cplx(-0.5, 0.3));
  EXPECT_EQ(path.nodes.back(), cplx(0.5, 0.3));
  for (cplx p : path.nodes) EXPECT_TRUE(contains(make_half_disc(), p));
  EXPECT_NEAR(path.length_value, r.value, 1e-12);
}

TEST(Bergman, DiscDistanceIsScaledPoincare) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  const auto r = bergman_dist(disc, 0.0, 0.5);
  EXPECT_NEAR(r.value, std::sqrt(2.0) * std::atanh(0.5), 1e-3);
  EXPECT_GE(r.value, poincare_dist(disc, 0.0, 0.5).value);
  EXPECT_EQ(bergman_dist(disc, 0.4, 0.4).value, 0.0);
}

TEST(Bergman, AnnulusMeanCircle) {
  const DomainSpec an = make_annulus(0.0, 0.5, 1.0);
  const double r = std::sqrt(0.5);
  const auto b = bergman_dist(an, r, r * I);
  EXPECT_GT(b.value, 0.0);
  EXPECT_GE(b.value + 1e-3, poincare_dist(make_disc(0.0, 1.0), r, r * I).value);
}

TEST(PathKinds, HVersusKOnTheDisc) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  for (auto [z, w] : {std::pair{cplx(0.0), cplx(0.7)}, std::pair{cplx(0.5, 0.5), cplx(-0.2, 0.6)},
                      std::pair{cplx(0.9), cplx(0.9, 0.05)}}) {
    const double h = quasi_hyperbolic_dist(disc, z, w).value, k = poincare_dist(disc, z, w).value;
    EXPECT_GE(h + 1e-9, 2.0 * k - 4.0 * std::abs(z - w));
    EXPECT_GE(h + 1e-9, k);
  }
}

TEST(PathKinds, PointsOutsideAreRejected) {
  EXPECT_THROW(quasi_hyperbolic_dist(make_disc(0.0, 1.0), 0.0, 1.5), PreconditionError);
  EXPECT_THROW(poincare_dist(make_disc(0.0, 1.0), 0.0, 1.5), PreconditionError);
}

TEST(PathKinds, CoarseGridCannotConnect) {
  PathOptions o;
  o.grid = 4;
  // every inner node of a 4x4 grid over the bounding box falls in the hole
  EXPECT_THROW(quasi_hyperbolic_dist(catalog_domain("annulus-0.5"), 0.75, -0.75, o), ResolutionError);
  o.grid = 3;
  EXPECT_THROW(quasi_hyperbolic_dist(catalog_domain("annulus-0.5"), 0.75, -0.75, o), PreconditionError);
}
