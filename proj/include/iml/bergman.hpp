#pragma once

// Variational Bergman kernel: monomials orthonormalised in L^2(D) under an area
// quadrature, then K = sum |phi_k|^2 and M from the derivative sums.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "iml/core.hpp"
#include "iml/domain.hpp"
#include "iml/map.hpp"

namespace iml {

struct BergmanBasis {
  DomainSpec domain;
  int degree{0};
  std::vector<int> powers;  // exponent of each monomial, in orthonormalisation order
  cplx center{0.0};
  double scale{1.0};        // monomials are in u = (z - center) / scale
  std::vector<cplx> nodes;
  std::vector<double> weights;
  Eigen::MatrixXcd coeff;   // phi = coeff * v(u), lower triangular
  double residual{0.0};     // max |Gram(phi) - I|
  double area{0.0};         // quadrature of 1
};

struct BergmanValue {
  double value;
  double truncation;  // share of the highest-degree terms
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<int> monomial_powers(int degree, bool laurent) {
  std::vector<int> p{0};
  for (int k = 1; k <= degree; ++k) {
    p.push_back(k);
    if (laurent) p.push_back(-k);
  }
  return p;
}

/// Tensor rule: Gauss-Legendre in r on [r0, r1] times the trapezoid rule in angle.
inline void polar_rule(cplx c, double r0, double r1, int nr, int na, std::vector<cplx>& x, std::vector<double>& w) {
  const GaussRule g = gauss_legendre(nr);
  for (int i = 0; i < nr; ++i) {
    const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * g.nodes[i];
    const double wr = 0.5 * (r1 - r0) * g.weights[i] * r;
    for (int j = 0; j < na; ++j) {
      x.push_back(c + std::polar(r, 2.0 * pi * j / na));
      w.push_back(wr * 2.0 * pi / na);
    }
  }
}

}  // namespace detail

/// Orthonormal basis of monomials z^0..z^N (Laurent z^-N..z^N on the annulus).
inline BergmanBasis bergman_basis(const DomainSpec& d, int degree = 24, int radial = 64, int angular = 256) {
  if (degree < 0) throw PreconditionError("bergman_basis: degree must be non-negative");
  BergmanBasis b{d, degree, {}, 0.0, 1.0, {}, {}, {}, 0.0, 0.0};
  bool laurent = false;
  if (const auto* disc = d.get_if<Disc>()) {
    b.center = disc->center;
    b.scale = disc->radius;
    detail::polar_rule(disc->center, 0.0, disc->radius, radial, angular, b.nodes, b.weights);
  } else if (const auto* an = d.get_if<Annulus>()) {
    laurent = true;
    b.center = an->center;
    b.scale = an->r_outer;
    detail::polar_rule(an->center, an->r_inner, an->r_outer, radial, angular, b.nodes, b.weights);
  } else if (const auto* ci = d.get_if<ConformalImage>(); ci && ci->base->is<Disc>()) {
    const auto& disc = std::get<Disc>(ci->base->variant);
    std::vector<cplx> x;
    std::vector<double> w;
    detail::polar_rule(disc.center, 0.0, disc.radius, radial, angular, x, w);
    double extent = 0.0;
    b.center = map_eval(ci->map, disc.center);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const Jet j = map_jet(ci->map, x[k]);
      b.nodes.push_back(j.value);
      b.weights.push_back(w[k] * std::norm(j.d1));
      extent = std::max(extent, std::abs(j.value - b.center));
    }
    b.scale = extent > 0.0 ? extent : 1.0;
  } else {
    throw PreconditionError("bergman_basis: no area quadrature for this domain (needs a Disc, Annulus or image of a Disc)");
  }
  b.powers = detail::monomial_powers(degree, laurent);
  const std::size_t m = b.powers.size();
  const std::size_t nq = b.nodes.size();
  for (double w : b.weights) b.area += w;

  Eigen::MatrixXcd V(nq, m);
  for (std::size_t k = 0; k < nq; ++k) {
    const cplx u = (b.nodes[k] - b.center) / b.scale;
    for (std::size_t j = 0; j < m; ++j) V(k, j) = std::pow(u, b.powers[j]);
  }
  Eigen::VectorXd W = Eigen::Map<const Eigen::VectorXd>(b.weights.data(), nq);
  // G_jk = sum_q w_q v_j conj(v_k)
  const Eigen::MatrixXcd G = (V.transpose() * W.asDiagonal() * V.conjugate()).eval();
  Eigen::VectorXd dscale(m);
  for (std::size_t j = 0; j < m; ++j) dscale(j) = 1.0 / std::sqrt(G(j, j).real());
  const Eigen::MatrixXcd Gs = dscale.asDiagonal() * G * dscale.asDiagonal();

  // manual Cholesky to locate the first unstable pivot
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(m, m);
  std::size_t stable = m;
  for (std::size_t j = 0; j < m && stable == m; ++j) {
    cplx s = Gs(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= L(j, k) * std::conj(L(j, k));
    if (!(s.real() > 1e-13)) {
      stable = j;
      break;
    }
    L(j, j) = std::sqrt(s.real());
    for (std::size_t i = j + 1; i < m; ++i) {
      cplx t = Gs(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= L(i, k) * std::conj(L(j, k));
      L(i, j) = t / L(j, j).real();
    }
  }
  if (stable < m) {
    // largest degree whose full monomial block precedes the failed pivot
    int ok = laurent ? static_cast<int>(stable - 1) / 2 : static_cast<int>(stable) - 1;
    throw DegreeReductionError("bergman_basis: Gram matrix singular at degree " + std::to_string(degree) +
                                   "; largest stable degree " + std::to_string(ok),
                               ok);
  }
  const Eigen::MatrixXcd Linv =
      L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(m, m));
  b.coeff = Linv * dscale.asDiagonal();
  // Gram of phi = C G C^T with the same orientation as G
  const Eigen::MatrixXcd Gphi = b.coeff * G * b.coeff.adjoint();
  b.residual = (Gphi - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
  return b;
}

namespace detail {

inline void basis_values(const BergmanBasis& b, cplx z, Eigen::VectorXcd& phi, Eigen::VectorXcd& dphi) {
  const std::size_t m = b.powers.size();
  const cplx u = (z - b.center) / b.scale;
  Eigen::VectorXcd v(m), dv(m);
  for (std::size_t j = 0; j < m; ++j) {
    const int p = b.powers[j];
    v(j) = std::pow(u, p);
    dv(j) = p == 0 ? cplx{0.0} : double(p) * std::pow(u, p - 1) / b.scale;
  }
  phi = b.coeff * v;
  dphi = b.coeff * dv;
}

inline double tail_share(const BergmanBasis& b, const Eigen::VectorXcd& phi, double total) {
  const bool laurent = b.powers.size() > 1 && b.powers.back() < 0;
  const std::size_t m = phi.size();
  double last = std::norm(phi(m - 1));
  if (laurent && m >= 2) last += std::norm(phi(m - 2));
  return total > 0.0 ? last / total : 0.0;
}

}  // namespace detail

/// K(z) = sum |phi_k(z)|^2 with the share of the top-degree terms as a truncation check.
inline BergmanValue kernel_diag(const BergmanBasis& b, cplx z) {
  if (!contains(b.domain, z)) throw PreconditionError("kernel_diag: point is not inside the domain");
  Eigen::VectorXcd phi, dphi;
  detail::basis_values(b, z, phi, dphi);
  const double K = phi.squaredNorm();
  BergmanValue out{K, detail::tail_share(b, phi, K), {}};
  if (out.truncation >= 1e-8) out.warnings.push_back("kernel_diag: truncation ratio above 1e-8");
  return out;
}

/// M(z; 1) with M^2 = S11 - |S10|^2 / S00.
inline BergmanValue metric_M(const BergmanBasis& b, cplx z) {
  if (!contains(b.domain, z)) throw PreconditionError("metric_M: point is not inside the domain");
  Eigen::VectorXcd phi, dphi;
  detail::basis_values(b, z, phi, dphi);
  const double s00 = phi.squaredNorm();
  const cplx s10 = dphi.dot(phi);  // conj(phi) . dphi
  const double s11 = dphi.squaredNorm();
  const double m2 = s11 - std::norm(s10) / s00;
  BergmanValue out{std::sqrt(std::max(0.0, m2)), detail::tail_share(b, phi, s00), {}};
  const double dtail = detail::tail_share(b, dphi, s11);
  out.truncation = std::max(out.truncation, dtail);
  if (out.truncation >= 1e-8) out.warnings.push_back("metric_M: truncation ratio above 1e-8");
  return out;
}

/// beta = M / sqrt(K).
inline double bergman_metric_gram(const BergmanBasis& b, cplx z) {
  return metric_M(b, z).value / std::sqrt(kernel_diag(b, z).value);
}

}  // namespace iml
