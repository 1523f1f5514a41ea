#pragma once

// Explicit conformal maps: value, first and second derivative, composition and
// Newton inversion.

#include <memory>
#include <sstream>
#include <variant>
#include <vector>

#include "iml/core.hpp"

namespace iml {

struct DomainSpec;

/// Value and derivatives of a holomorphic map at a point.
struct Jet {
  cplx value;
  cplx d1;
  cplx d2;
};

/// Holomorphic map realised numerically (e.g. a solved Riemann map).
class AnalyticMap {
 public:
  virtual ~AnalyticMap() = default;
  virtual cplx value(cplx z) const = 0;
  virtual cplx deriv(cplx z) const = 0;
  /// Second derivative; default is a central difference of deriv().
  virtual cplx deriv2(cplx z) const {
    const double h = 1e-5;
    return (deriv(z + h) - deriv(z - h)) / (2.0 * h);
  }
};

/// z -> (a z + b) / (c z + d), ad - bc != 0.
struct Moebius {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
};

/// z -> ((z + 1) / (z - 1))^2; maps the upper half-disc onto the upper half-plane.
struct CayleySquare {};

/// z -> z - z^(1+eps) / 4 with the principal branch; univalent on |z - 1| < 1.
struct PowerPerturb {
  double eps{0.5};
};

/// z -> a z + b.
struct Affine {
  cplx a{1.0}, b{0.0};
};

/// z -> exp(z).
struct Exp {};

/// z -> sum_k coeffs[k] z^k.
struct Polynomial {
  std::vector<cplx> coeffs;
};

class MapSpec;

/// maps[0] is applied first: f = maps[n-1] o ... o maps[0].
struct Composition {
  std::vector<MapSpec> maps;
};

/// Riemann map of a Jordan domain onto the unit disc, solved numerically.
struct NumericalRiemann {
  std::shared_ptr<const DomainSpec> domain;
  cplx base_point{0.0};
  int n_nodes{1024};
  std::shared_ptr<const AnalyticMap> solved;
};

class MapSpec {
 public:
  using Variant = std::variant<Moebius, CayleySquare, PowerPerturb, Affine, Exp, Polynomial,
                               Composition, NumericalRiemann>;

  MapSpec() : v_(Moebius{}) {}
  template <typename T,
            typename = std::enable_if_t<std::is_constructible_v<Variant, T&&> &&
                                        !std::is_same_v<std::decay_t<T>, MapSpec>>>
  MapSpec(T&& alt) : v_(std::forward<T>(alt)) {
    validate();
  }

  const Variant& variant() const { return v_; }

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

 private:
  void validate() const {
    if (const auto* m = std::get_if<Moebius>(&v_)) {
      if (std::abs(m->a * m->d - m->b * m->c) == 0.0)
        throw PreconditionError("Moebius map is degenerate: ad - bc = 0");
    } else if (const auto* p = std::get_if<PowerPerturb>(&v_)) {
      if (!(p->eps > 0.0 && p->eps < 1.0))
        throw PreconditionError("PowerPerturb requires eps in (0, 1)");
    } else if (const auto* a = std::get_if<Affine>(&v_)) {
      if (a->a == cplx{0.0}) throw PreconditionError("Affine map with a = 0");
    } else if (const auto* n = std::get_if<NumericalRiemann>(&v_)) {
      if (!n->solved) throw PreconditionError("NumericalRiemann map has no solved kernel");
    }
  }

  Variant v_;
};

namespace detail {

inline Jet jet_impl(const MapSpec& map, cplx z);

struct JetVisitor {
  cplx z;

  Jet operator()(const Moebius& m) const {
    const cplx den = m.c * z + m.d;
    const cplx det = m.a * m.d - m.b * m.c;
    if (den == cplx{0.0}) throw DomainError("Moebius map evaluated at its pole");
    return {(m.a * z + m.b) / den, det / (den * den), -2.0 * m.c * det / (den * den * den)};
  }

  Jet operator()(const CayleySquare&) const {
    const cplx zm = z - 1.0;
    if (zm == cplx{0.0}) throw DomainError("CayleySquare evaluated at its pole z = 1");
    const cplx q = (z + 1.0) / zm;
    return {q * q, -4.0 * (z + 1.0) / (zm * zm * zm), 8.0 * (z + 2.0) / (zm * zm * zm * zm)};
  }

  Jet operator()(const PowerPerturb& p) const {
    if (z.imag() == 0.0 && z.real() < 0.0)
      throw DomainError("PowerPerturb evaluated on its branch cut (negative real axis)");
    if (z == cplx{0.0}) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {cplx{0.0}, cplx{1.0}, cplx{nan, nan}};
    }
    const cplx logz = std::log(z);
    const cplx zeps = std::exp(p.eps * logz);
    return {z - z * zeps / 4.0, 1.0 - (1.0 + p.eps) * zeps / 4.0,
            -(1.0 + p.eps) * p.eps * zeps / (4.0 * z)};
  }

  Jet operator()(const Affine& a) const { return {a.a * z + a.b, a.a, cplx{0.0}}; }

  Jet operator()(const Exp&) const {
    const cplx e = std::exp(z);
    return {e, e, e};
  }

  Jet operator()(const Polynomial& p) const {
    // Horner for value and the two derivatives
    cplx v{0.0}, d1{0.0}, d2{0.0};
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
      d2 = d2 * z + 2.0 * d1;
      d1 = d1 * z + v;
      v = v * z + *it;
    }
    return {v, d1, d2};
  }

  Jet operator()(const Composition& c) const {
    Jet acc{z, cplx{1.0}, cplx{0.0}};
    for (const auto& m : c.maps) {
      const Jet g = jet_impl(m, acc.value);
      acc = {g.value, g.d1 * acc.d1, g.d2 * acc.d1 * acc.d1 + g.d1 * acc.d2};
    }
    return acc;
  }

  Jet operator()(const NumericalRiemann& n) const {
    return {n.solved->value(z), n.solved->deriv(z), n.solved->deriv2(z)};
  }
};

inline Jet jet_impl(const MapSpec& map, cplx z) { return std::visit(JetVisitor{z}, map.variant()); }

}  // namespace detail

inline Jet map_jet(const MapSpec& map, cplx z) { return detail::jet_impl(map, z); }
inline cplx map_eval(const MapSpec& map, cplx z) { return map_jet(map, z).value; }
inline cplx map_deriv(const MapSpec& map, cplx z) { return map_jet(map, z).d1; }
inline cplx map_deriv2(const MapSpec& map, cplx z) { return map_jet(map, z).d2; }

/// Newton inversion with residual backtracking. Converges to |f(z) - w| <= 1e-12
/// (relative to max(1, |w|)) and then polishes to working precision.
inline cplx map_invert(const MapSpec& map, cplx w, cplx seed, int max_iter = 100) {
  const double target = 1e-12 * std::max(1.0, std::abs(w));
  cplx z = seed;
  double res = std::numeric_limits<double>::infinity();
  auto residual_at = [&](cplx x, cplx& fx) -> double {
    try {
      fx = map_eval(map, x);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
    return std::abs(fx - w);
  };
  cplx fz;
  res = residual_at(z, fz);
  if (!std::isfinite(res)) throw InversionError("map_invert: seed outside the map's domain", z, res);
  int polish = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (res <= target) {
      if (polish >= 2 || res == 0.0) return z;
      ++polish;
    }
    cplx dz;
    try {
      dz = (fz - w) / map_deriv(map, z);
    } catch (const DomainError&) {
      break;
    }
    if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) break;
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const cplx cand = z - lambda * dz;
      cplx fc;
      const double rc = residual_at(cand, fc);
      if (rc < res || (res <= target && rc <= res * 2.0)) {
        z = cand;
        fz = fc;
        const bool stalled = rc >= res;
        res = rc;
        improved = !stalled;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      if (res <= target) return z;
      break;
    }
  }
  if (res <= target) return z;
  std::ostringstream os;
  os << "map_invert: Newton did not converge (residual " << res << ")";
  throw InversionError(os.str(), z, res);
}

}  // namespace iml
