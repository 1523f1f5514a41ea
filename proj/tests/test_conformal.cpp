#include <cstdlib>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "iml/iml.hpp"

using namespace iml;

namespace {

DomainSpec disc_as_jordan() { return make_jordan({CurvePiece(Arc{0.0, 1.0, 0.0, 2.0 * pi})}, "Cinf", "disc-jordan", 0.0); }

DomainSpec half_disc_as_jordan() {
  return make_jordan({CurvePiece(Segment{-1.0, 1.0}), CurvePiece(Arc{0.0, 1.0, 0.0, pi})}, "C11", "half-disc-jordan",
                     0.5 * I);
}

// upper half-disc -> disc with a -> 0 and positive derivative at a, written out by hand
cplx half_disc_to_disc(cplx z, cplx a) {
  auto F = [](cplx x) {
    const cplx c = (1.0 + x) / (1.0 - x);
    return c * c;
  };
  const cplx fa = F(a);
  auto G = [&](cplx x) { return (F(x) - fa) / (F(x) - std::conj(fa)); };
  const double h = 1e-6;
  const cplx g1 = (G(a + h) - G(a - h)) / (2.0 * h);
  return G(z) * std::conj(g1) / std::abs(g1);
}

}  // namespace

TEST(Riemann, DiscIsIdentity) {
  const auto f = riemann_map(disc_as_jordan(), 0.0, 1024);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const cplx z = std::polar(0.95 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
    worst = std::max(worst, std::abs(f->value(z) - z));
  }
  EXPECT_LT(worst, 3e-9);
  EXPECT_NEAR(std::abs(f->deriv(0.3) - 1.0), 0.0, 3e-9);
  EXPECT_TRUE(f->warnings().empty());
}

TEST(Riemann, HalfDiscMatchesExplicitMap) {
  const auto f = riemann_map(half_disc_as_jordan(), 0.5 * I, 1024);
  double worst = 0.0;
  for (cplx z : {cplx(0.0, 0.5), cplx(0.3, 0.3), cplx(-0.6, 0.2), cplx(0.1, 0.8), cplx(0.7, 0.1)})
    worst = std::max(worst, std::abs(f->value(z) - half_disc_to_disc(z, 0.5 * I)));
  EXPECT_LT(worst, 1e-6);
}

TEST(Riemann, BlobInvertsThePolynomial) {
  const auto F = riemann_map(catalog_domain("blob-jordan"), 0.0, 1024);
  for (cplx x : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.0, -0.7), cplx(0.6, 0.0)}) {
    const cplx z = x + 0.1 * x * x;
    EXPECT_NEAR(std::abs(F->value(z) - x), 0.0, 1e-6) << x;
  }
  EXPECT_LT(F->error_estimate(), 1e-6);
}

TEST(Riemann, NodeDoublingWithinEstimate) {
  const DomainSpec d = catalog_domain("ellipse");
  const DomainSpec j = make_jordan({CurvePiece(Mapped{std::get<ConformalImage>(d.variant).map,
                                                      std::make_shared<const CurvePiece>(Arc{0.0, 1.0, 0.0, 2.0 * pi})})},
                                   "Cinf", "ellipse-jordan", 0.0);
  const auto a = riemann_map(j, 0.0, 256), b = riemann_map(j, 0.0, 512);
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.7, 0.1), cplx(0.3, -0.6)})
    EXPECT_LE(std::abs(a->value(z) - b->value(z)), a->error_estimate() + 1e-14);
}

TEST(Riemann, SaveLoadRoundTrip) {
  const auto f = riemann_map(catalog_domain("blob-jordan"), 0.0, 256);
  const auto path = (std::filesystem::temp_directory_path() / "iml_riemann_test.bin").string();
  f->save(path);
  const auto g = RiemannSolve::load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(g->value(cplx(0.3, 0.2)), f->value(cplx(0.3, 0.2)));
  EXPECT_EQ(g->n_nodes(), f->n_nodes());
  EXPECT_THROW(RiemannSolve::load(path), SerializationError);
}

TEST(Riemann, CacheDirectoryIsUsed) {
  const auto dir = std::filesystem::temp_directory_path() / "iml_cache_test";
  std::filesystem::remove_all(dir);
  ::setenv("IML_CACHE_DIR", dir.c_str(), 1);
  const auto f = cached_riemann_map(catalog_domain("example-b-H3"), 512);
  ::unsetenv("IML_CACHE_DIR");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.path().extension() == ".bin";
  EXPECT_EQ(files, 1u);
  EXPECT_EQ(cached_riemann_map(catalog_domain("example-b-H3"), 512), f);
  std::filesystem::remove_all(dir);
}

TEST(Riemann, OrbitInvarianceOfTheDiscDensity) {
  const DomainSpec disc = make_disc(0.0, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const cplx a = std::polar(0.9 * U(rng), 2.0 * pi * U(rng));
    const cplx e = std::polar(1.0, 2.0 * pi * U(rng));
    const MapSpec phi = Moebius{e, -e * a, -std::conj(a), 1.0};
    const cplx z = std::polar(0.9 * U(rng), 2.0 * pi * U(rng));
    const double lhs = density_value(disc, map_eval(phi, z)) * std::abs(map_deriv(phi, z));
    EXPECT_NEAR(lhs / density_value(disc, z), 1.0, 1e-10);
  }
}
