#pragma once

// Boundary curve pieces parametrised over t in [0, 1].

#include <functional>
#include <memory>
#include <variant>

#include "iml/core.hpp"
#include "iml/map.hpp"

namespace iml {

struct Segment {
  cplx from;
  cplx to;
};

/// c + r exp(i (theta0 + t (theta1 - theta0))); counter-clockwise when theta1 > theta0.
struct Arc {
  cplx center;
  double radius;
  double theta0;
  double theta1;
};

/// Full straight line p + tan(pi (t - 1/2)) * direction; unbounded.
struct Line {
  cplx point;
  cplx direction;
};

class CurvePiece;

/// Image of a segment, arc or line under a conformal map.
struct Mapped {
  MapSpec map;
  std::shared_ptr<const CurvePiece> base;
};

/// User-supplied analytic parametrisation with first and second derivatives.
struct Analytic {
  std::function<cplx(double)> gamma;
  std::function<cplx(double)> d1;
  std::function<cplx(double)> d2;
};

/// Position and derivatives of a curve at a parameter.
struct CurveJet {
  cplx p;
  cplx d1;
  cplx d2;
};

class CurvePiece {
 public:
  using Variant = std::variant<Segment, Arc, Line, Mapped, Analytic>;

  template <typename T,
            typename = std::enable_if_t<std::is_constructible_v<Variant, T&&> &&
                                        !std::is_same_v<std::decay_t<T>, CurvePiece>>>
  CurvePiece(T&& alt) : v_(std::forward<T>(alt)) {
    validate();
  }

  const Variant& variant() const { return v_; }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  CurveJet jet(double t) const {
    return std::visit(
        [t](const auto& k) -> CurveJet {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Segment>) {
            return {k.from + t * (k.to - k.from), k.to - k.from, cplx{0.0}};
          } else if constexpr (std::is_same_v<K, Arc>) {
            const double dth = k.theta1 - k.theta0;
            const cplx e = std::polar(k.radius, k.theta0 + t * dth);
            return {k.center + e, I * dth * e, -dth * dth * e};
          } else if constexpr (std::is_same_v<K, Line>) {
            const double a = pi * (t - 0.5);
            const double s = std::tan(a);
            const double sec2 = 1.0 + s * s;
            return {k.point + s * k.direction, pi * sec2 * k.direction,
                    2.0 * pi * pi * s * sec2 * k.direction};
          } else if constexpr (std::is_same_v<K, Mapped>) {
            const CurveJet b = k.base->jet(t);
            const Jet f = map_jet(k.map, b.p);
            return {f.value, f.d1 * b.d1, f.d2 * b.d1 * b.d1 + f.d1 * b.d2};
          } else {
            return {k.gamma(t), k.d1(t), k.d2(t)};
          }
        },
        v_);
  }

  cplx point(double t) const { return jet(t).p; }

  /// True when the piece extends to infinity.
  bool unbounded() const {
    if (std::holds_alternative<Line>(v_)) return true;
    if (const auto* m = std::get_if<Mapped>(&v_)) return m->base->unbounded();
    return false;
  }

  /// True when the curve's endpoints coincide (a full closed loop on its own).
  bool closed() const {
    if (unbounded()) return false;
    if (const auto* a = std::get_if<Arc>(&v_))
      return std::abs(std::abs(a->theta1 - a->theta0) - 2.0 * pi) < 1e-14;
    if (const auto* m = std::get_if<Mapped>(&v_)) return m->base->closed();
    return std::abs(point(0.0) - point(1.0)) < 1e-12;
  }

 private:
  void validate() const {
    if (const auto* a = std::get_if<Arc>(&v_)) {
      if (!(a->radius > 0.0)) throw PreconditionError("arc radius must be positive");
      if (a->theta0 == a->theta1) throw PreconditionError("arc has empty angle range");
    } else if (const auto* s = std::get_if<Segment>(&v_)) {
      if (s->from == s->to) throw PreconditionError("segment has coincident endpoints");
    } else if (const auto* l = std::get_if<Line>(&v_)) {
      if (l->direction == cplx{0.0}) throw PreconditionError("line direction is zero");
    } else if (const auto* m = std::get_if<Mapped>(&v_)) {
      if (!m->base) throw PreconditionError("mapped piece has no base curve");
      if (m->base->get_if<Mapped>() || m->base->get_if<Analytic>())
        throw PreconditionError("mapped piece base must be a segment, arc or line");
    } else if (const auto* an = std::get_if<Analytic>(&v_)) {
      if (!an->gamma || !an->d1 || !an->d2)
        throw PreconditionError("analytic piece needs gamma, gamma' and gamma''");
    }
  }

  Variant v_;
};

/// Signed curvature Im(g'' conj g') / |g'|^3 at parameter t. Positive when the curve
/// turns left, i.e. towards a domain lying on its left.
inline double curve_curvature(const CurvePiece& piece, double t) {
  const CurveJet j = piece.jet(t);
  const double speed = std::abs(j.d1);
  if (speed < 1e-10)
    throw DegenerateParametrizationError("curvature: |gamma'| below 1e-10 at the parameter");
  return (j.d2 * std::conj(j.d1)).imag() / (speed * speed * speed);
}

}  // namespace iml
