#pragma once

// Pointwise densities of the family {gamma, kappa, beta/sqrt2, sqrt(pi K)}, normalised
// so the unit-disc density at 0 is 1 and the upper half-plane density at iy is 1/(2y).

#include <string>

#include "iml/core.hpp"
#include "iml/domain.hpp"
#include "iml/map.hpp"
#include "iml/riemann_cache.hpp"

namespace iml {

enum class QuantityId { caratheodory_gamma, kobayashi_kappa, bergman_beta_scaled, kernel_sqrt_scaled };

inline const char* quantity_name(QuantityId q) {
  switch (q) {
    case QuantityId::caratheodory_gamma: return "caratheodory_gamma";
    case QuantityId::kobayashi_kappa: return "kobayashi_kappa";
    case QuantityId::bergman_beta_scaled: return "bergman_beta_scaled";
    case QuantityId::kernel_sqrt_scaled: return "kernel_sqrt_scaled";
  }
  return "?";
}

inline QuantityId parse_quantity(const std::string& s) {
  for (auto q : {QuantityId::caratheodory_gamma, QuantityId::kobayashi_kappa, QuantityId::bergman_beta_scaled,
                 QuantityId::kernel_sqrt_scaled})
    if (s == quantity_name(q)) return q;
  throw PreconditionError("unknown quantity '" + s + "'");
}

inline constexpr QuantityId all_quantities[] = {QuantityId::caratheodory_gamma, QuantityId::kobayashi_kappa,
                                                QuantityId::bergman_beta_scaled, QuantityId::kernel_sqrt_scaled};

struct MetricSample {
  cplx z;
  QuantityId quantity;
  double value;
  double uncertainty;
  std::string method;  // closed_form | pullback | covering | gram | series
};

struct DensityOptions {
  int riemann_nodes = 1024;
};

// ---------------------------------------------------------------------------
// Annulus {q < |z| < 1}: Bergman series
// ---------------------------------------------------------------------------

/// Moment sums P_j = sum_n n^j |z|^{2n} / ||z^n||^2, j = 0, 1, 2, over n in Z.
struct AnnulusMoments {
  double p0, p1, p2;
};

namespace detail {

/// One-minus-x for x = |z|^2 with |z| = rho, computed as (1 - rho)(1 + rho).
inline double one_minus_sq(double rho) { return (1.0 - rho) * (1.0 + rho); }

inline AnnulusMoments annulus_moments(double q, double rho) {
  const double x = rho * rho;
  const double omx = one_minus_sq(rho);
  const double q2 = q * q;
  // n >= 0: weight (n+1)/(pi (1 - q^{2n+2})) = (n+1)/pi * (1 + r_n), r_n = q^{2n+2}/(1 - q^{2n+2})
  double a0 = 1.0 / (omx * omx);
  double a1 = 2.0 * x / (omx * omx * omx);
  double a2 = 2.0 * x * (1.0 + 2.0 * x) / (omx * omx * omx * omx);
  {
    double xn = 1.0;
    double qn = q2;
    for (int n = 0; n < 100000; ++n) {
      const double r = qn / (1.0 - qn);
      const double t = (n + 1.0) * xn * r;
      a0 += t;
      a1 += n * t;
      a2 += double(n) * n * t;
      if (t * (1.0 + double(n) * n) < 1e-18 * a0) break;
      xn *= x;
      qn *= q2;
    }
  }
  // n = -1: 1 / (x * 2 pi log(1/q)), the pi is restored below
  const double w = 1.0 / (2.0 * x * std::log(1.0 / q));
  // n = -(k+1), k >= 1: (1/x) k y^k (1 + s_k), y = q^2/x, s_k = q^{2k}/(1 - q^{2k})
  const double y = q2 / x;
  const double omy = (1.0 - q / rho) * (1.0 + q / rho);
  double b1 = y / (omy * omy);                                        // sum k y^k
  double b2 = y * (1.0 + y) / (omy * omy * omy);                      // sum k^2 y^k
  double b3 = y * (1.0 + 4.0 * y + y * y) / (omy * omy * omy * omy);  // sum k^3 y^k
  {
    double yk = y;
    double qk = q2;
    for (int k = 1; k < 100000; ++k) {
      const double s = qk / (1.0 - qk);
      const double t = k * yk * s;
      b1 += t;
      b2 += k * t;
      b3 += double(k) * k * t;
      if (t * (1.0 + double(k) * k) < 1e-18 * b1) break;
      yk *= y;
      qk *= q2;
    }
  }
  // n = -(k+1): n k = -(k^2 + k), n^2 k = k^3 + 2k^2 + k
  const double n0 = b1 / x;
  const double n1 = -(b2 + b1) / x;
  const double n2 = (b3 + 2.0 * b2 + b1) / x;
  return {(a0 + w + n0) / pi, (a1 - w + n1) / pi, (a2 + w + n2) / pi};
}

}  // namespace detail

/// Bergman kernel on the diagonal of {q < |z| < 1}.
inline double annulus_kernel(double q, cplx z) {
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("annulus_kernel: need 0 < q < 1");
  const double rho = std::abs(z);
  if (!(rho > q && rho < 1.0)) throw PreconditionError("annulus_kernel: z outside the annulus");
  return detail::annulus_moments(q, rho).p0;
}

/// M(z; 1) on {q < |z| < 1}: M^2 = (P2 - P1^2 / P0) / |z|^2.
inline double annulus_M(double q, cplx z) {
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("annulus_M: need 0 < q < 1");
  const double rho = std::abs(z);
  if (!(rho > q && rho < 1.0)) throw PreconditionError("annulus_M: z outside the annulus");
  const auto m = detail::annulus_moments(q, rho);
  return std::sqrt(std::max(0.0, m.p2 - m.p1 * m.p1 / m.p0)) / rho;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

namespace detail {

inline double disc_density(const Disc& d, cplx z) {
  const double rho = std::abs(z - d.center);
  return d.radius / ((d.radius - rho) * (d.radius + rho));
}

inline double half_plane_density(const HalfPlane& h, cplx z) {
  return 0.5 / ((z - h.boundary_point) * std::conj(h.inner_normal)).real();
}

/// Upper half-disc: (1 / 2y) |1 - z^2| / (1 - |z|^2).
inline double half_disc_density(cplx z) {
  return std::abs(1.0 - z * z) / (2.0 * z.imag() * one_minus_sq(std::abs(z)));
}

/// Strip {0 < x < W}: pi / (2 W sin(pi x / W)).
inline double strip_density(double x, double width) { return pi / (2.0 * width * std::sin(pi * x / width)); }

inline double model_density(const DomainSpec& d, cplx z) {
  if (const auto* disc = d.get_if<Disc>()) return disc_density(*disc, z);
  if (const auto* hp = d.get_if<HalfPlane>()) return half_plane_density(*hp, z);
  throw PreconditionError("base of a conformal image must be a Disc or a HalfPlane");
}

}  // namespace detail

/// Density of one family member at an interior point.
inline MetricSample density(const DomainSpec& d, cplx z, QuantityId q, const DensityOptions& opts = {}) {
  if (!contains(d, z)) throw PreconditionError("density: point is not inside the domain");
  const double tiny = 4.0 * std::numeric_limits<double>::epsilon();
  if (const auto* disc = d.get_if<Disc>()) {
    const double v = detail::disc_density(*disc, z);
    return {z, q, v, tiny * v, "closed_form"};
  }
  if (const auto* hp = d.get_if<HalfPlane>()) {
    const double v = detail::half_plane_density(*hp, z);
    return {z, q, v, tiny * v, "closed_form"};
  }
  if (d.is<HalfDisc>()) {
    const double v = detail::half_disc_density(z);
    return {z, q, v, tiny * v, "closed_form"};
  }
  if (const auto* dc = d.get_if<DiscComplement>()) {
    const double rho = std::abs(z - dc->center);
    const double r = dc->radius;
    double v;
    if (q == QuantityId::kobayashi_kappa) {
      // punctured-disc metric through w = r / (z - c)
      v = 1.0 / (2.0 * rho * std::log1p((rho - r) / r));
    } else {
      // the puncture is removable for bounded and L^2 holomorphic functions
      v = r / ((rho - r) * (rho + r));
    }
    return {z, q, v, tiny * v, "closed_form"};
  }
  if (const auto* an = d.get_if<Annulus>()) {
    const double R = an->r_outer;
    const double qq = an->r_inner / R;
    const cplx u = (z - an->center) / R;
    if (q == QuantityId::caratheodory_gamma)
      throw UnsupportedQuantityError("caratheodory_gamma is not available on the annulus");
    if (q == QuantityId::kobayashi_kappa) {
      // exp covers the annulus by the strip log q < Re < 0
      const double W = std::log(1.0 / qq);
      const double x = std::log(std::abs(u) / qq);
      const double v = detail::strip_density(x, W) / (std::abs(u) * R);
      return {z, q, v, tiny * v, "covering"};
    }
    const auto m = detail::annulus_moments(qq, std::abs(u));
    const double K = m.p0 / (R * R);
    if (q == QuantityId::kernel_sqrt_scaled) {
      const double v = std::sqrt(pi * K);
      return {z, q, v, 1e-14 * v, "series"};
    }
    const double M = std::sqrt(std::max(0.0, m.p2 - m.p1 * m.p1 / m.p0)) / std::abs(u) / (R * R);
    const double v = M / std::sqrt(K) / std::sqrt(2.0);
    return {z, q, v, 1e-13 * v, "series"};
  }
  if (const auto* ci = d.get_if<ConformalImage>()) {
    cplx x;
    try {
      x = detail::invert_into_base(*ci, z);
    } catch (const InversionError& e) {
      throw IndeterminateError(std::string("density: inverse map failed: ") + e.what());
    }
    const double v = detail::model_density(*ci->base, x) / std::abs(map_deriv(ci->map, x));
    return {z, q, v, 1e-13 * v, "pullback"};
  }
  const auto rs = cached_riemann_map(d, opts.riemann_nodes);
  const cplx f = rs->value(z);
  const cplx fp = rs->deriv(z);
  const double omf = 1.0 - std::norm(f);
  if (!(omf > 0.0)) throw SolverError("density: numerical Riemann map left the unit disc");
  const double v = std::abs(fp) / omf;
  const double e = rs->error_estimate();
  const double unc = e / omf + v * 2.0 * std::abs(f) * e / omf;
  return {z, q, v, unc, "pullback"};
}

inline double density_value(const DomainSpec& d, cplx z, QuantityId q = QuantityId::kobayashi_kappa) {
  return density(d, z, q).value;
}

/// Bergman metric beta = M / sqrt(K) (unscaled), as consumed by the Bergman distance.
inline double bergman_beta(const DomainSpec& d, cplx z) {
  return std::sqrt(2.0) * density(d, z, QuantityId::bergman_beta_scaled).value;
}

/// Half-disc minus half-plane density and the bound |z| / (1 - |z|^2).
struct LemmaGap {
  double gap;
  double bound;
};

inline LemmaGap lemma_l_gap(cplx z) {
  if (!(z.imag() > 0.0 && std::abs(z) < 1.0)) throw PreconditionError("lemma_l_gap: z outside the upper half-disc");
  const double y = z.imag();
  const double omx = detail::one_minus_sq(std::abs(z));
  // |1 - z^2| - (1 - |z|^2) = 4 y^2 / (|1 - z^2| + 1 - |z|^2)
  const double gap = 2.0 * y / ((std::abs(1.0 - z * z) + omx) * omx);
  return {gap, std::abs(z) / omx};
}

}  // namespace iml
