#include <random>

#include <gtest/gtest.h>

#include "iml/iml.hpp"

using namespace iml;

namespace {

// Laurent-series kernel of {q < |z| < 1}, summed independently of the library
double annulus_kernel_oracle(double q, double rho) {
  double s = 1.0 / (2.0 * std::log(1.0 / q) * rho * rho);
  for (int n = -400; n <= 400; ++n) {
    if (n == -1) continue;
    const double term = (n + 1) * std::pow(rho, 2 * n) / (1.0 - std::pow(q, 2 * n + 2));
    if (std::isfinite(term)) s += term;
  }
  return s / pi;
}

double disc_kernel(cplx z) { return 1.0 / (pi * std::pow(1.0 - std::norm(z), 2)); }

}  // namespace

TEST(Density, UnitDiscAllQuantities) {
  for (QuantityId q : all_quantities) {
    const MetricSample m = density(make_disc(0.0, 1.0), 0.9, q);
    EXPECT_NEAR(m.value, 1.0 / 0.19, 1e-13);
    EXPECT_EQ(m.method, "closed_form");
  }
}

TEST(Density, HalfPlaneAndHalfDisc) {
  EXPECT_NEAR(density_value(make_half_plane(0.0, I), 0.5 * I), 1.0, 1e-15);
  EXPECT_NEAR(density_value(make_half_plane(0.0, I), cplx(3.0, 0.25)), 2.0, 1e-15);
  EXPECT_NEAR(density_value(make_half_disc(), 0.5 * I), 5.0 / 3.0, 1e-14);
}

TEST(Density, OutsideAndUnsupported) {
  EXPECT_THROW(density(make_disc(0.0, 1.0), 1.2, QuantityId::kobayashi_kappa), PreconditionError);
  EXPECT_THROW(density(make_annulus(0.0, 0.5, 1.0), 0.7, QuantityId::caratheodory_gamma), UnsupportedQuantityError);
}

TEST(Density, AnnulusCoveringMatchesStripFormula) {
  // kappa = pi / (2 W |z| sin(pi log(|z|/q) / W)), W = log(1/q)
  const double q = 0.5, W = std::log(2.0);
  for (double r : {0.55, 0.7, 0.95}) {
    const double expect = pi / (2.0 * W * r * std::sin(pi * std::log(r / q) / W));
    EXPECT_NEAR(density_value(make_annulus(0.0, q, 1.0), std::polar(r, 0.3)) / expect, 1.0, 1e-13);
  }
}

TEST(Density, ModelLimitAlongTheAxis) {
  for (double chi : {-2.0, -1.0, 0.5, 2.0}) {
    const DomainSpec d = classify_model(chi);
    const double tau = 1e-4;
    EXPECT_NEAR(density_value(d, tau) - 0.5 / tau, chi / 4.0, 1e-3) << chi;
  }
}

TEST(Density, PullbackExactness) {
  const DomainSpec img = catalog_domain("ellipse");
  const DomainSpec img2 =
      make_conformal_image(make_disc(0.0, 3.0), Composition{{Affine{1.0 / 3.0, 0.0}, Polynomial{{0.0, 1.0, 0.0, 0.1}}}});
  for (cplx x : {cplx(0.1, 0.2), cplx(-0.6, 0.3), cplx(0.0, -0.85)}) {
    const cplx z = x + 0.1 * x * x * x;
    const double base = 1.0 / (1.0 - std::norm(x));
    EXPECT_NEAR(density_value(img, z) * std::abs(1.0 + 0.3 * x * x) / base, 1.0, 1e-10);
    EXPECT_NEAR(density_value(img2, z) / density_value(img, z), 1.0, 1e-10);
  }
}

TEST(Density, KobayashiShrinksWithInclusion) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const cplx z = std::polar(std::sqrt(U(rng)) * 0.99, pi * U(rng));
    if (z.imag() <= 0.0) continue;
    EXPECT_LE(density_value(make_disc(0.0, 1.0), z), density_value(make_half_disc(), z));
  }
}

TEST(LemmaL, ExplicitValues) {
  const LemmaGap g = lemma_l_gap(0.5 * I);
  EXPECT_NEAR(g.gap, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.bound, 2.0 / 3.0, 1e-15);
  EXPECT_LE(lemma_l_gap(0.5e-3 * I).gap, 5.1e-4);
  const LemmaGap h = lemma_l_gap(cplx(0.3, 0.4));
  EXPECT_GE(h.gap, 0.0);
  EXPECT_LE(h.gap, 0.5 / 0.75);
  EXPECT_THROW(lemma_l_gap(cplx(0.3, -0.1)), PreconditionError);
  EXPECT_THROW(lemma_l_gap(cplx(0.9, 0.9)), PreconditionError);
}

TEST(LemmaL, GapIsTheDensityDifference) {
  for (cplx z : {cplx(0.3, 0.4), cplx(-0.7, 0.05), cplx(0.01, 0.99)}) {
    const double diff = density_value(make_half_disc(), z) - density_value(make_half_plane(0.0, I), z);
    EXPECT_NEAR(lemma_l_gap(z).gap / diff, 1.0, 1e-9);
  }
}

TEST(Bergman, DiscBasisIsScaledMonomials) {
  const BergmanBasis b = bergman_basis(make_disc(0.0, 1.0), 6);
  Eigen::VectorXcd phi, dphi;
  const cplx z(0.3, -0.2);
  detail::basis_values(b, z, phi, dphi);
  ASSERT_EQ(phi.size(), 7);
  for (int k = 0; k <= 6; ++k) {
    const int j = static_cast<int>(std::find(b.powers.begin(), b.powers.end(), k) - b.powers.begin());
    const double expect = std::abs(std::pow(z, k)) * std::sqrt((k + 1) / pi);
    EXPECT_NEAR(std::abs(phi(j)), expect, 1e-12) << k;
  }
  EXPECT_LT(b.residual, 1e-12);
}

TEST(Bergman, DiscKernelAndMetric) {
  const BergmanBasis b = bergman_basis(make_disc(0.0, 1.0));
  EXPECT_NEAR(kernel_diag(b, 0.0).value, 1.0 / pi, 1e-12);
  EXPECT_NEAR(kernel_diag(b, 0.5).value, disc_kernel(0.5), 1e-8);
  EXPECT_NEAR(metric_M(b, 0.0).value, std::sqrt(2.0 / pi), 1e-12);
  EXPECT_NEAR(metric_M(b, 0.5).value, std::sqrt(2.0) / 0.75 * std::sqrt(disc_kernel(0.5)), 1e-7);
  EXPECT_NEAR(bergman_metric_gram(b, 0.0), std::sqrt(2.0), 1e-10);
}

TEST(Bergman, AnnulusQuadratureNorm) {
  const BergmanBasis b = bergman_basis(make_annulus(0.0, 0.5, 1.0), 8);
  double n2 = 0.0;
  for (std::size_t i = 0; i < b.nodes.size(); ++i) n2 += b.weights[i] / std::norm(b.nodes[i]);
  EXPECT_NEAR(n2, 2.0 * pi * std::log(2.0), 1e-12);
}

TEST(Bergman, AnnulusSeriesAgainstOracleAndVariational) {
  const double q = 0.5;
  for (double r : {0.6, 0.7, 0.85}) EXPECT_NEAR(annulus_kernel(q, r) / annulus_kernel_oracle(q, r), 1.0, 1e-12);
  const BergmanBasis b = bergman_basis(make_annulus(0.0, q, 1.0), 64);
  EXPECT_NEAR(kernel_diag(b, 0.7).value / annulus_kernel(q, 0.7), 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(annulus_kernel(q, 0.7), annulus_kernel(q, 0.7 * I));
  // as q -> 0 only the z^-1 term survives on top of the disc kernel, decaying like 1 / ln(1/q)
  EXPECT_NEAR(annulus_kernel(1e-6, 0.5) - disc_kernel(0.5), 1.0 / (2.0 * pi * std::log(1e6) * 0.25), 1e-9);
  EXPECT_THROW(annulus_kernel(q, 0.3), PreconditionError);
}

TEST(Bergman, AnnulusMetricOnTheMeanCircle) {
  // M^2 |z|^2 = P2 - P1^2/P0 from the termwise differentiated series
  const double q = 0.5, rho = std::sqrt(q);
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  const double L = std::log(1.0 / q);
  p0 += 1.0 / (2.0 * L * rho * rho);
  p1 += -1.0 / (2.0 * L * rho * rho);
  p2 += 1.0 / (2.0 * L * rho * rho);
  for (int n = -400; n <= 400; ++n) {
    if (n == -1) continue;
    const double t = (n + 1) * std::pow(rho, 2 * n) / (1.0 - std::pow(q, 2 * n + 2));
    if (!std::isfinite(t)) continue;
    p0 += t;
    p1 += n * t;
    p2 += double(n) * n * t;
  }
  const double M = std::sqrt((p2 - p1 * p1 / p0) / pi) / rho;
  EXPECT_NEAR(annulus_M(q, rho) / M, 1.0, 1e-6);
  EXPECT_NEAR(annulus_M(q, std::polar(rho, 2.0)) / M, 1.0, 1e-6);
}

TEST(Bergman, KernelMonotoneUnderInclusion) {
  for (double r : {0.55, 0.7, 0.9})
    for (double th : {0.0, 1.0, 2.5}) EXPECT_LE(disc_kernel(r), annulus_kernel(0.5, std::polar(r, th)));
}

TEST(Bergman, DegreeReductionReportsStableDegree) {
  try {
    bergman_basis(make_disc(0.0, 1.0), 400, 16, 32);
    SUCCEED() << "no reduction needed at this size";
  } catch (const DegreeReductionError& e) {
    EXPECT_GE(e.largest_stable_degree(), 0);
    EXPECT_LT(e.largest_stable_degree(), 400);
  }
}

TEST(Family, SimplyConnectedMembersCoincide) {
  std::mt19937_64 rng(9);
  for (const char* name : {"unit-disc", "half-disc", "blob", "example-a-0.25"}) {
    const DomainSpec d = catalog_domain(name);
    for (int k = 0; k < 50; ++k) {
      const cplx z = detail::random_interior(d, rng);
      const double ref = density_value(d, z, QuantityId::kobayashi_kappa);
      for (QuantityId q : all_quantities) EXPECT_NEAR(density_value(d, z, q) / ref, 1.0, 1e-6) << name;
    }
  }
}
