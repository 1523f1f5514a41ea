#pragma once

// Boundary approach schedules: normal rays t_k = t0 rho^k and point pairs with a
// prescribed separation law.

#include <string>
#include <vector>

#include "iml/core.hpp"
#include "iml/domain.hpp"
#include "iml/tolerances.hpp"

namespace iml {

/// How densities of a domain are evaluated; decides the schedule floor.
enum class EvalPath { closed_form, pullback, numerical };

inline EvalPath eval_path(const DomainSpec& d) {
  if (d.is<JordanDomain>()) return EvalPath::numerical;
  if (d.is<ConformalImage>()) return EvalPath::pullback;
  return EvalPath::closed_form;
}

inline const char* eval_path_name(EvalPath p) {
  switch (p) {
    case EvalPath::closed_form: return "closed_form";
    case EvalPath::pullback: return "pullback";
    case EvalPath::numerical: return "numerical";
  }
  return "?";
}

struct ScheduleConfig {
  double t0{0.1};
  double ratio{0.5};
  int steps{24};
  double floor{0.0};
  double normal_check{5e-3};

  static ScheduleConfig for_domain(const DomainSpec& d, const Tolerances& tol) {
    ScheduleConfig c;
    c.t0 = tol.get("schedule.t0");
    c.ratio = tol.get("schedule.ratio");
    c.steps = tol.get_int("schedule.steps");
    c.normal_check = tol.get("schedule.normal_ray_check");
    switch (eval_path(d)) {
      case EvalPath::closed_form: c.floor = 0.0; break;
      case EvalPath::pullback: c.floor = tol.get("schedule.floor_pullback"); break;
      case EvalPath::numerical: c.floor = tol.get("schedule.floor_numerical"); break;
    }
    return c;
  }

  std::vector<double> ts() const {
    std::vector<double> out;
    for (int k = 0; k <= steps; ++k) {
      const double t = t0 * std::pow(ratio, k);
      if (t < floor * (1.0 - 1e-12)) break;
      out.push_back(t);
    }
    return out;
  }
};

struct Anchor {
  BoundaryParam param;
  cplx point;
  cplx tangent;
  cplx normal;
  double curvature;
  double speed;  // |gamma'(t)|
  bool c2;       // smooth enough for the d/t check
};

namespace detail {

/// True where a map loses C^2 regularity (the branch point of z^{1+eps}).
inline bool map_singular_at(const MapSpec& m, cplx x) {
  if (m.get_if<PowerPerturb>()) return std::abs(x) < 1e-8;
  if (const auto* c = m.get_if<Composition>()) {
    for (const auto& inner : c->maps) {
      if (map_singular_at(inner, x)) return true;
      x = map_eval(inner, x);
    }
  }
  return false;
}

}  // namespace detail

inline Anchor make_anchor(const DomainSpec& d, BoundaryParam at) {
  const auto pieces = boundary_pieces(d);
  const BoundaryPoint bp = boundary_point(d, at);
  const double kappa = signed_curvature(d, at);
  const auto& piece = pieces[at.piece];
  const bool interior_param = piece.closed() || (at.t > 0.0 && at.t < 1.0);
  const bool at_join = pieces.size() > 1 && !interior_param;
  bool singular = false;
  if (const auto* m = piece.get_if<Mapped>()) singular = detail::map_singular_at(m->map, m->base->point(at.t));
  return {at, bp.point, bp.tangent, bp.inner_normal, kappa, std::abs(piece.jet(at.t).d1),
          std::isfinite(kappa) && !at_join && !singular};
}

/// "<t>" on piece 0, or "<piece>:<t>".
inline BoundaryParam parse_anchor(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
      const double t = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {0, t};
    }
    const unsigned long piece = std::stoul(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    const double t = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    return {piece, t};
  } catch (const std::logic_error&) {
    throw PreconditionError("malformed anchor '" + s + "' (expected <t> or <piece>:<t>)");
  }
}

struct ApproachPoint {
  double t;
  cplx z;
  double d;  // distance to the boundary
};

namespace detail {

inline double foot_radius(const Anchor& a, double t) {
  return a.c2 ? 1e-9 * (1.0 + std::abs(a.point)) + 1e-6 * t : t;
}

inline ApproachPoint approach_point(const DomainSpec& d, const Anchor& a, double t) {
  const cplx z = a.point + t * a.normal;
  if (!contains(d, z))
    throw ScheduleError("schedule: point at t=" + std::to_string(t) + " is not inside the domain");
  const BoundaryFoot f = dist_to_boundary(d, z);
  if ((a.c2 && !f.unique) || std::abs(f.foot - a.point) > foot_radius(a, t))
    throw ScheduleError("schedule: nearest boundary point at t=" + std::to_string(t) + " is not the anchor");
  return {t, z, f.distance};
}

}  // namespace detail

/// z_k = a + t_k n for the configured t_k.
inline std::vector<ApproachPoint> normal_ray(const DomainSpec& d, const Anchor& a, const ScheduleConfig& cfg) {
  std::vector<ApproachPoint> out;
  for (double t : cfg.ts()) out.push_back(detail::approach_point(d, a, t));
  if (out.empty()) throw ScheduleError("schedule: no points above the floor");
  if (a.c2) {
    const auto& last = out.back();
    if (std::abs(last.d / last.t - 1.0) > cfg.normal_check)
      throw ScheduleError("schedule: d/t = " + std::to_string(last.d / last.t) + " at the last step");
  }
  return out;
}

/// Separation laws |z - w| ~ sigma(t).
enum class Separation { linear, sqrt, square };

inline const char* separation_name(Separation s) {
  switch (s) {
    case Separation::linear: return "t";
    case Separation::sqrt: return "sqrt(t)";
    case Separation::square: return "t^2";
  }
  return "?";
}

inline double sigma(Separation s, double t) {
  switch (s) {
    case Separation::linear: return t;
    case Separation::sqrt: return std::sqrt(t);
    case Separation::square: return t * t;
  }
  return t;
}

struct ApproachPair {
  double t;
  cplx z;
  cplx w;
};

/// t_k from t0 down to t_end (appended exactly when the geometric steps skip it).
inline std::vector<double> pair_ts(const ScheduleConfig& cfg, double t_end) {
  std::vector<double> out;
  for (int k = 0; k < 200; ++k) {
    const double t = cfg.t0 * std::pow(cfg.ratio, k);
    if (t <= t_end * (1.0 + 1e-12)) break;
    out.push_back(t);
  }
  out.push_back(t_end);
  return out;
}

/// z = a + t n(a); w = b + t n(b) with b the boundary point an arclength of about sigma(t)
/// further along the anchor's piece.
inline ApproachPair separated_pair(const DomainSpec& d, const Anchor& a, Separation s, double t) {
  const auto pieces = boundary_pieces(d);
  const auto& piece = pieces[a.param.piece];
  double tb = a.param.t + sigma(s, t) / a.speed;
  if (piece.closed()) tb -= std::floor(tb);
  if (!(tb >= 0.0 && tb <= 1.0)) throw ScheduleError("pair schedule: separation leaves the anchor's piece");
  const BoundaryPoint b = boundary_point(d, {a.param.piece, tb});
  const ApproachPair p{t, a.point + t * a.normal, b.point + t * b.inner_normal};
  if (!contains(d, p.z) || !contains(d, p.w))
    throw ScheduleError("pair schedule: point at t=" + std::to_string(t) + " is not inside the domain");
  return p;
}

/// Radial pair z = a + t^2 n, w = a + t n.
inline ApproachPair radial_pair(const DomainSpec& d, const Anchor& a, double t) {
  const ApproachPair p{t, a.point + t * t * a.normal, a.point + t * a.normal};
  if (!contains(d, p.z) || !contains(d, p.w))
    throw ScheduleError("pair schedule: point at t=" + std::to_string(t) + " is not inside the domain");
  return p;
}

}  // namespace iml
