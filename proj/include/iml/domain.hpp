#pragma once

// Planar domain catalog: membership, boundary parametrisation, nearest boundary
// foot and signed curvature.

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iml/core.hpp"
#include "iml/curve.hpp"
#include "iml/map.hpp"

namespace iml {

struct Disc {
  cplx center{0.0};
  double radius{1.0};
};

struct HalfPlane {
  cplx boundary_point{0.0};
  cplx inner_normal{0.0, 1.0};
};

/// Complement of the closed disc |z - center| <= radius.
struct DiscComplement {
  cplx center{0.0};
  double radius{1.0};
};

struct Annulus {
  cplx center{0.0};
  double r_inner{0.5};
  double r_outer{1.0};
};

/// Upper half of the unit disc.
struct HalfDisc {};

/// Forward samples of a map used to seed Newton inversion.
struct InversionSeeds {
  std::vector<cplx> base;
  std::vector<cplx> image;
};

/// f(base) for a map f declared univalent on base (a Disc or a HalfPlane).
struct ConformalImage {
  std::shared_ptr<const struct DomainSpec> base;
  MapSpec map;
  std::shared_ptr<const InversionSeeds> seeds;
};

/// Sampled polyline of a Jordan boundary used for crossing-number membership.
struct JordanPolyline {
  std::vector<cplx> points;  // closed: last point repeats the first
  double max_sag{0.0};
  // segment indices bucketed by the horizontal bands their y-range meets
  double ymin{0.0}, band_height{1.0};
  std::vector<std::vector<std::uint32_t>> bands;

  int band_of(double y) const {
    return std::clamp(int(std::floor((y - ymin) / band_height)), 0, int(bands.size()) - 1);
  }

  void build_bands(int n) {
    ymin = points[0].imag();
    double ymax = ymin;
    for (const auto& q : points) {
      ymin = std::min(ymin, q.imag());
      ymax = std::max(ymax, q.imag());
    }
    bands.assign(n, {});
    band_height = (ymax - ymin) / n + 1e-300;
    for (std::size_t s = 0; s + 1 < points.size(); ++s) {
      const int b0 = band_of(std::min(points[s].imag(), points[s + 1].imag()));
      const int b1 = band_of(std::max(points[s].imag(), points[s + 1].imag()));
      for (int b = b0; b <= b1; ++b) bands[b].push_back(std::uint32_t(s));
    }
  }
};

/// Interior of a closed, positively oriented curve made of pieces.
struct JordanDomain {
  std::vector<CurvePiece> pieces;
  std::string regularity_tag;
  std::optional<cplx> interior_point;
  std::shared_ptr<const JordanPolyline> polyline;
};

struct DomainSpec {
  using Variant =
      std::variant<Disc, HalfPlane, DiscComplement, Annulus, HalfDisc, ConformalImage, JordanDomain>;
  std::string name;
  Variant variant;

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&variant);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(variant);
  }
};

/// Boundary location: piece index plus parameter t in [0, 1].
struct BoundaryParam {
  std::size_t piece{0};
  double t{0.0};
};

/// Nearest boundary point of an interior point.
struct BoundaryFoot {
  cplx foot;
  double distance;
  cplx inner_normal;
  double curvature;
  bool unique;
  BoundaryParam param;
};

/// Tunables for the grid + golden-section foot search.
struct FootSearchConfig {
  int grid_per_piece = 2048;
  double param_tol = 1e-12;
};

// ---------------------------------------------------------------------------
// Boundary pieces
// ---------------------------------------------------------------------------

inline std::vector<CurvePiece> boundary_pieces(const DomainSpec& d) {
  return std::visit(
      [](const auto& k) -> std::vector<CurvePiece> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Disc>) {
          return {CurvePiece(Arc{k.center, k.radius, 0.0, 2.0 * pi})};
        } else if constexpr (std::is_same_v<K, HalfPlane>) {
          return {CurvePiece(Line{k.boundary_point, -I * k.inner_normal})};
        } else if constexpr (std::is_same_v<K, DiscComplement>) {
          return {CurvePiece(Arc{k.center, k.radius, 2.0 * pi, 0.0})};
        } else if constexpr (std::is_same_v<K, Annulus>) {
          return {CurvePiece(Arc{k.center, k.r_outer, 0.0, 2.0 * pi}),
                  CurvePiece(Arc{k.center, k.r_inner, 2.0 * pi, 0.0})};
        } else if constexpr (std::is_same_v<K, HalfDisc>) {
          return {CurvePiece(Segment{cplx{-1.0}, cplx{1.0}}), CurvePiece(Arc{cplx{0.0}, 1.0, 0.0, pi})};
        } else if constexpr (std::is_same_v<K, ConformalImage>) {
          std::vector<CurvePiece> out;
          for (auto& b : boundary_pieces(*k.base))
            out.emplace_back(Mapped{k.map, std::make_shared<const CurvePiece>(b)});
          return out;
        } else {
          return k.pieces;
        }
      },
      d.variant);
}

inline bool is_bounded(const DomainSpec& d) {
  if (d.is<HalfPlane>() || d.is<DiscComplement>()) return false;
  if (const auto* c = d.get_if<ConformalImage>()) return !c->base->is<HalfPlane>();
  return true;
}

inline bool is_simply_connected(const DomainSpec& d) {
  return !(d.is<DiscComplement>() || d.is<Annulus>());
}

// ---------------------------------------------------------------------------
// Nearest point on a single piece
// ---------------------------------------------------------------------------

namespace detail {

struct FootCandidate {
  std::size_t piece;
  double t;
  cplx point;
  double dist;
};

inline double wrap_angle_into(double ang, double lo, double hi) {
  // shift ang by multiples of 2 pi into [lo, hi] if possible
  const double two_pi = 2.0 * pi;
  double a = lo + std::fmod(ang - lo, two_pi);
  if (a < lo) a += two_pi;
  (void)hi;
  return a;
}

inline void arc_candidates(const Arc& arc, std::size_t idx, cplx z, std::vector<FootCandidate>& out) {
  const double lo = std::min(arc.theta0, arc.theta1);
  const double hi = std::max(arc.theta0, arc.theta1);
  const double span = arc.theta1 - arc.theta0;
  auto push_t = [&](double t) {
    t = std::clamp(t, 0.0, 1.0);
    const cplx p = arc.center + std::polar(arc.radius, arc.theta0 + t * span);
    out.push_back({idx, t, p, std::abs(z - p)});
  };
  const cplx rel = z - arc.center;
  if (std::abs(rel) > 0.0) {
    const double ang = wrap_angle_into(std::arg(rel), lo, hi);
    if (ang <= hi) {
      const double t = (ang - arc.theta0) / span;
      const cplx p = arc.center + arc.radius * rel / std::abs(rel);
      out.push_back({idx, std::clamp(t, 0.0, 1.0), p, std::abs(arc.radius - std::abs(rel))});
      return;
    }
  }
  push_t(0.0);
  push_t(1.0);
}

inline void segment_candidates(const Segment& s, std::size_t idx, cplx z, std::vector<FootCandidate>& out) {
  const cplx d = s.to - s.from;
  const double t = std::clamp(((z - s.from) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
  const cplx p = s.from + t * d;
  out.push_back({idx, t, p, std::abs(z - p)});
}

inline void line_candidates(const Line& l, std::size_t idx, cplx z, std::vector<FootCandidate>& out) {
  const cplx u = unit(l.direction);
  const double s = ((z - l.point) * std::conj(u)).real();
  const cplx p = l.point + s * u;
  const double t = 0.5 + std::atan(s / std::abs(l.direction)) / pi;
  out.push_back({idx, t, p, std::abs(z - p)});
}

/// Grid + golden-section search with a Newton polish confined to the bracket.
inline void generic_candidates(const CurvePiece& piece, std::size_t idx, cplx z,
                               const FootSearchConfig& cfg, std::vector<FootCandidate>& out) {
  const bool periodic = piece.closed();
  const bool unbounded = piece.unbounded();
  const int n = std::max(cfg.grid_per_piece, 16);
  // unbounded (line-based) pieces are sampled on the open interval only
  const double t_lo = unbounded ? 1e-9 : 0.0;
  const double t_hi = unbounded ? 1.0 - 1e-9 : 1.0;
  const int count = periodic ? n : n + 1;
  std::vector<double> ts(count), fs(count);
  std::vector<cplx> ps(count);
  for (int j = 0; j < count; ++j) {
    ts[j] = periodic ? double(j) / n : t_lo + (t_hi - t_lo) * double(j) / n;
    ps[j] = piece.point(ts[j]);
    fs[j] = std::norm(ps[j] - z);
  }
  double fmin = *std::min_element(fs.begin(), fs.end());
  // any local minimum whose sample is close to the best may hide the global minimum
  double max_chord = 0.0;
  for (int j = 0; j + 1 < count; ++j)
    max_chord = std::max(max_chord, std::abs(ps[j + 1] - ps[j]));
  const double accept = sqr(std::sqrt(fmin) + 2.0 * max_chord);

  auto f = [&](double t) { return std::norm(piece.point(t) - z); };
  auto polish = [&](double t, double lo, double hi) {
    for (int it = 0; it < 8; ++it) {
      const CurveJet j = piece.jet(t);
      const cplx r = j.p - z;
      const double g = (r * std::conj(j.d1)).real();
      const double gp = std::norm(j.d1) + (r * std::conj(j.d2)).real();
      if (!(gp > 0.0)) break;
      const double tn = t - g / gp;
      if (!(tn >= lo && tn <= hi)) break;
      if (f(tn) > f(t)) break;
      if (tn == t) break;
      t = tn;
    }
    return t;
  };

  for (int j = 0; j < count; ++j) {
    const int jm = periodic ? (j - 1 + count) % count : j - 1;
    const int jp = periodic ? (j + 1) % count : j + 1;
    const bool left_ok = jm < 0 || fs[j] <= fs[jm];
    const bool right_ok = jp >= count || fs[j] <= fs[jp];
    if (!(left_ok && right_ok) || fs[j] > accept) continue;
    double lo, hi;
    if (periodic) {
      lo = ts[j] - 1.0 / n;
      hi = ts[j] + 1.0 / n;
    } else {
      lo = jm >= 0 ? ts[jm] : ts[j];
      hi = jp < count ? ts[jp] : ts[j];
    }
    double t = ts[j];
    double ft = fs[j];
    if (hi > lo) {
      const Minimum m = golden_section(f, lo, hi, cfg.param_tol);
      if (m.f < ft) {
        t = m.x;
        ft = m.f;
      }
      t = polish(t, lo, hi);
    }
    if (periodic) {
      t = std::fmod(t, 1.0);
      if (t < 0.0) t += 1.0;
    }
    const cplx p = piece.point(t);
    out.push_back({idx, t, p, std::abs(p - z)});
  }
}

inline void piece_candidates(const CurvePiece& piece, std::size_t idx, cplx z, const FootSearchConfig& cfg,
                             std::vector<FootCandidate>& out) {
  if (const auto* s = piece.get_if<Segment>()) return segment_candidates(*s, idx, z, out);
  if (const auto* a = piece.get_if<Arc>()) return arc_candidates(*a, idx, z, out);
  if (const auto* l = piece.get_if<Line>()) return line_candidates(*l, idx, z, out);
  generic_candidates(piece, idx, z, cfg, out);
}

inline BoundaryFoot make_foot(const std::vector<CurvePiece>& pieces, const FootCandidate& c, bool unique) {
  const CurveJet j = pieces[c.piece].jet(c.t);
  const cplx normal = I * unit(j.d1);
  double kappa = 0.0;
  if (std::abs(j.d1) >= 1e-10) kappa = curve_curvature(pieces[c.piece], c.t);
  return {c.point, c.dist, normal, kappa, unique, {c.piece, c.t}};
}

}  // namespace detail

/// Signed curvature of the boundary at a parameter (domain-on-left orientation).
inline double signed_curvature(const DomainSpec& d, BoundaryParam at) {
  const auto pieces = boundary_pieces(d);
  if (at.piece >= pieces.size()) throw PreconditionError("signed_curvature: piece index out of range");
  if (!(at.t >= 0.0 && at.t <= 1.0)) throw PreconditionError("signed_curvature: t outside [0, 1]");
  return curve_curvature(pieces[at.piece], at.t);
}

/// Point, unit tangent and inner normal at a boundary parameter.
struct BoundaryPoint {
  cplx point;
  cplx tangent;
  cplx inner_normal;
};

inline BoundaryPoint boundary_point(const DomainSpec& d, BoundaryParam at) {
  const auto pieces = boundary_pieces(d);
  if (at.piece >= pieces.size()) throw PreconditionError("boundary_point: piece index out of range");
  const CurveJet j = pieces[at.piece].jet(at.t);
  if (std::abs(j.d1) < 1e-10)
    throw DegenerateParametrizationError("boundary_point: |gamma'| below 1e-10");
  const cplx tan = unit(j.d1);
  return {j.p, tan, I * tan};
}

inline bool contains(const DomainSpec& d, cplx z);

namespace detail {

/// Foot search ignoring the membership precondition.
inline BoundaryFoot nearest_foot(const DomainSpec& d, cplx z, const FootSearchConfig& cfg) {
  // closed forms for the model domains
  if (const auto* disc = d.get_if<Disc>()) {
    const cplx rel = z - disc->center;
    const double rho = std::abs(rel);
    const cplx dir = rho > 0.0 ? rel / rho : cplx{1.0};
    const double t = std::fmod(std::arg(dir) / (2.0 * pi) + 1.0, 1.0);
    return {disc->center + disc->radius * dir, disc->radius - rho, -dir, 1.0 / disc->radius, rho > 0.0,
            {0, t}};
  }
  if (const auto* hp = d.get_if<HalfPlane>()) {
    const cplx n = unit(hp->inner_normal);
    const double dist = ((z - hp->boundary_point) * std::conj(n)).real();
    const cplx foot = z - dist * n;
    const double s = ((foot - hp->boundary_point) * std::conj(-I * n)).real();
    return {foot, dist, n, 0.0, true, {0, 0.5 + std::atan(s / std::abs(hp->inner_normal)) / pi}};
  }
  if (const auto* dc = d.get_if<DiscComplement>()) {
    const cplx rel = z - dc->center;
    const double rho = std::abs(rel);
    const cplx dir = rel / rho;
    const double t = 1.0 - std::fmod(std::arg(dir) / (2.0 * pi) + 1.0, 1.0);
    return {dc->center + dc->radius * dir, rho - dc->radius, dir, -1.0 / dc->radius, true, {0, t}};
  }
  if (const auto* an = d.get_if<Annulus>()) {
    const cplx rel = z - an->center;
    const double rho = std::abs(rel);
    const cplx dir = rho > 0.0 ? rel / rho : cplx{1.0};
    const double to_outer = an->r_outer - rho;
    const double to_inner = rho - an->r_inner;
    const double ang = std::fmod(std::arg(dir) / (2.0 * pi) + 1.0, 1.0);
    if (to_outer <= to_inner)
      return {an->center + an->r_outer * dir, to_outer, -dir, 1.0 / an->r_outer,
              std::abs(to_outer - to_inner) > 1e-9, {0, ang}};
    return {an->center + an->r_inner * dir, to_inner, dir, -1.0 / an->r_inner,
            std::abs(to_outer - to_inner) > 1e-9, {1, 1.0 - ang}};
  }
  if (d.is<HalfDisc>()) {
    const double rho = std::abs(z);
    const double to_arc = 1.0 - rho;
    const double to_diam = z.imag();
    const bool unique = std::abs(to_arc - to_diam) > 1e-9;
    if (to_diam < to_arc) return {cplx{z.real(), 0.0}, to_diam, I, 0.0, unique, {0, (z.real() + 1.0) / 2.0}};
    const cplx dir = rho > 0.0 ? z / rho : I;
    return {dir, to_arc, -dir, 1.0, unique, {1, std::arg(dir) / pi}};
  }

  const auto pieces = boundary_pieces(d);
  std::vector<FootCandidate> cands;
  for (std::size_t i = 0; i < pieces.size(); ++i) piece_candidates(pieces[i], i, z, cfg, cands);
  if (cands.empty()) throw SolverError("dist_to_boundary: no boundary candidates");
  const auto best = std::min_element(cands.begin(), cands.end(),
                                     [](const auto& a, const auto& b) { return a.dist < b.dist; });
  bool unique = true;
  for (const auto& c : cands) {
    if (&c == &*best) continue;
    if (std::abs(c.dist - best->dist) < 1e-9 && std::abs(c.point - best->point) > 1e-8) unique = false;
  }
  return make_foot(pieces, *best, unique);
}

}  // namespace detail

/// Global nearest boundary point of an interior point.
inline BoundaryFoot dist_to_boundary(const DomainSpec& d, cplx z, const FootSearchConfig& cfg = {}) {
  if (!contains(d, z)) throw PreconditionError("dist_to_boundary: point is not inside the domain");
  return detail::nearest_foot(d, z, cfg);
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

namespace detail {

inline cplx invert_into_base(const ConformalImage& ci, cplx w) {
  const auto& seeds = *ci.seeds;
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seeds.image.size(); ++i) {
    const double dd = std::abs(seeds.image[i] - w);
    if (dd < bd) {
      bd = dd;
      best = i;
    }
  }
  try {
    return map_invert(ci.map, w, seeds.base[best]);
  } catch (const InversionError&) {
  }
  // continuation along the straight path from the seed's image
  cplx x = seeds.base[best];
  const cplx w0 = seeds.image[best];
  constexpr int steps = 16;
  for (int k = 1; k <= steps; ++k) {
    const cplx wk = w0 + (w - w0) * (double(k) / steps);
    x = map_invert(ci.map, wk, x);
  }
  return x;
}

/// Crossing-number membership; `near` is set when a polyline segment lies within `margin`.
inline bool polyline_inside(const JordanPolyline& poly, cplx z, double margin, bool& near) {
  const auto& p = poly.points;
  const double y = z.imag();
  near = false;
  const double top = poly.ymin + poly.band_height * poly.bands.size();
  if (y < poly.ymin - margin || y > top + margin) return false;
  for (int b = poly.band_of(y - margin), e = poly.band_of(y + margin); b <= e && !near; ++b)
    for (std::uint32_t j : poly.bands[b]) {
      const cplx a = p[j], d = p[j + 1] - p[j];
      const double nd = std::norm(d);
      const double t = nd > 0.0 ? std::clamp(((z - a) * std::conj(d)).real() / nd, 0.0, 1.0) : 0.0;
      if (std::abs(z - (a + t * d)) <= margin) {
        near = true;
        break;
      }
    }
  if (near || y < poly.ymin || y > top) return false;
  bool inside = false;
  for (std::uint32_t j : poly.bands[poly.band_of(y)]) {
    const cplx a = p[j], b = p[j + 1];
    if ((a.imag() > y) != (b.imag() > y)) {
      const double x = a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (z.real() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

/// True iff z is an interior point of the domain.
inline bool contains(const DomainSpec& d, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return std::visit(
      [&](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Disc>) {
          return std::abs(z - k.center) < k.radius;
        } else if constexpr (std::is_same_v<K, HalfPlane>) {
          return ((z - k.boundary_point) * std::conj(k.inner_normal)).real() > 0.0;
        } else if constexpr (std::is_same_v<K, DiscComplement>) {
          return std::abs(z - k.center) > k.radius;
        } else if constexpr (std::is_same_v<K, Annulus>) {
          const double r = std::abs(z - k.center);
          return r > k.r_inner && r < k.r_outer;
        } else if constexpr (std::is_same_v<K, HalfDisc>) {
          return z.imag() > 0.0 && std::abs(z) < 1.0;
        } else if constexpr (std::is_same_v<K, ConformalImage>) {
          cplx x;
          try {
            x = detail::invert_into_base(k, z);
          } catch (const InversionError& e) {
            throw IndeterminateError(std::string("contains: inverse map failed: ") + e.what());
          }
          return contains(*k.base, x);
        } else {
          bool near = false;
          const bool inside = detail::polyline_inside(*k.polyline, z, 4.0 * k.polyline->max_sag + 1e-12, near);
          if (!near) return inside;
          // near the boundary the polyline is not trusted: use the exact foot
          const BoundaryFoot f = detail::nearest_foot(d, z, FootSearchConfig{});
          if (f.distance < 1e-15) return false;
          return ((z - f.foot) * std::conj(f.inner_normal)).real() > 0.0;
        }
      },
      d.variant);
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

inline DomainSpec make_disc(cplx center, double radius, std::string name = "disc") {
  if (!(radius > 0.0)) throw PreconditionError("Disc radius must be positive");
  return {std::move(name), Disc{center, radius}};
}

inline DomainSpec make_half_plane(cplx boundary_point, cplx inner_normal, std::string name = "half-plane") {
  if (std::abs(std::abs(inner_normal) - 1.0) > 1e-12)
    throw PreconditionError("HalfPlane inner normal must be a unit vector");
  return {std::move(name), HalfPlane{boundary_point, inner_normal}};
}

inline DomainSpec make_disc_complement(cplx center, double radius, std::string name = "disc-complement") {
  if (!(radius > 0.0)) throw PreconditionError("DiscComplement radius must be positive");
  return {std::move(name), DiscComplement{center, radius}};
}

inline DomainSpec make_annulus(cplx center, double r_inner, double r_outer, std::string name = "annulus") {
  if (!(r_inner > 0.0 && r_inner < r_outer)) throw PreconditionError("Annulus requires 0 < r_inner < r_outer");
  return {std::move(name), Annulus{center, r_inner, r_outer}};
}

inline DomainSpec make_half_disc(std::string name = "half-disc") { return {std::move(name), HalfDisc{}}; }

namespace detail {

inline InversionSeeds build_seeds(const DomainSpec& base, const MapSpec& map) {
  InversionSeeds s;
  if (const auto* disc = base.get_if<Disc>()) {
    s.base.push_back(disc->center);
    const std::array<double, 4> radii{0.3, 0.6, 0.85, 0.97};
    for (double r : radii)
      for (int k = 0; k < 16; ++k) {
        if (s.base.size() >= 64) break;
        s.base.push_back(disc->center + std::polar(r * disc->radius, 2.0 * pi * (k + 0.5 * (r > 0.5)) / 16.0));
      }
  } else {
    const auto& hp = std::get<HalfPlane>(base.variant);
    const cplx n = hp.inner_normal;
    const cplx tan = -I * n;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const double x = -2.0 + 4.0 * i / 7.0;
        const double y = 0.05 * std::pow(80.0, j / 7.0);
        s.base.push_back(hp.boundary_point + x * tan + y * n);
      }
  }
  s.image.reserve(s.base.size());
  for (const auto& b : s.base) s.image.push_back(map_eval(map, b));
  return s;
}

}  // namespace detail

/// Image of a Disc or HalfPlane under a map. Univalence is declared, and checked on a
/// sample of base points (no two images within 1e-10 unless preimages within 1e-8).
inline DomainSpec make_conformal_image(const DomainSpec& base, MapSpec map, std::string name = "conformal-image",
                                       int univalence_samples = 10000) {
  if (!(base.is<Disc>() || base.is<HalfPlane>()))
    throw PreconditionError("ConformalImage base must be a Disc or a HalfPlane");
  auto seeds = std::make_shared<const InversionSeeds>(detail::build_seeds(base, map));
  if (univalence_samples > 0) {
    // spiral sample of the base, images sorted by real part for a sweep check
    std::vector<std::pair<cplx, cplx>> pts;
    pts.reserve(univalence_samples);
    const double golden_angle = pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < univalence_samples; ++k) {
      cplx b;
      if (const auto* disc = base.get_if<Disc>()) {
        const double r = disc->radius * std::sqrt((k + 0.5) / univalence_samples);
        b = disc->center + std::polar(r, k * golden_angle);
      } else {
        const auto& hp = std::get<HalfPlane>(base.variant);
        const double y = 0.01 + 4.0 * (k + 0.5) / univalence_samples;
        const double x = 4.0 * std::sin(k * golden_angle);
        b = hp.boundary_point + x * (-I * hp.inner_normal) + y * hp.inner_normal;
      }
      pts.emplace_back(map_eval(map, b), b);
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first.real() < b.first.real(); });
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size() && pts[j].first.real() - pts[i].first.real() < 1e-10; ++j)
        if (std::abs(pts[j].first - pts[i].first) < 1e-10 && std::abs(pts[j].second - pts[i].second) >= 1e-8)
          throw PreconditionError("ConformalImage: map is not univalent on the sampled base");
  }
  return {std::move(name),
          ConformalImage{std::make_shared<const DomainSpec>(base), std::move(map), std::move(seeds)}};
}

/// Closed, positively oriented Jordan domain from consecutive pieces.
inline DomainSpec make_jordan(std::vector<CurvePiece> pieces, std::string regularity_tag,
                              std::string name = "jordan", std::optional<cplx> interior_point = std::nullopt) {
  if (pieces.empty()) throw PreconditionError("JordanDomain needs at least one boundary piece");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].unbounded()) throw PreconditionError("JordanDomain pieces must be bounded");
    const cplx end = pieces[i].point(1.0);
    const cplx next = pieces[(i + 1) % pieces.size()].point(0.0);
    if (std::abs(end - next) > 1e-12)
      throw PreconditionError("JordanDomain: piece " + std::to_string(i) + " does not end where the next begins");
    for (int k = 0; k <= 1000; ++k)
      if (std::abs(pieces[i].jet(k / 1000.0).d1) <= 1e-10)
        throw DegenerateParametrizationError("JordanDomain: |gamma'| <= 1e-10 on piece " + std::to_string(i));
  }
  auto poly = std::make_shared<JordanPolyline>();
  constexpr int per_piece = 2048;
  double signed_area = 0.0;
  for (const auto& piece : pieces) {
    for (int k = 0; k < per_piece; ++k) {
      const double t0 = double(k) / per_piece;
      const double t1 = double(k + 1) / per_piece;
      const cplx a = piece.point(t0);
      const cplx b = piece.point(t1);
      const cplx mid = piece.point(0.5 * (t0 + t1));
      poly->max_sag = std::max(poly->max_sag, std::abs(mid - 0.5 * (a + b)));
      poly->points.push_back(a);
      signed_area += 0.5 * (std::conj(a) * b).imag();
    }
  }
  poly->points.push_back(poly->points.front());
  poly->build_bands(256);
  if (!(signed_area > 0.0)) throw PreconditionError("JordanDomain boundary must be positively oriented");
  // simple-curve check on the polyline: non-adjacent segments must not cross
  {
    const auto& p = poly->points;
    const std::size_t m = p.size() - 1;
    auto cross = [](cplx a, cplx b) { return (std::conj(a) * b).imag(); };
    // bucket segments on a coarse grid to keep the check near-linear
    double xmin = p[0].real(), xmax = xmin, ymin = p[0].imag(), ymax = ymin;
    for (const auto& q : p) {
      xmin = std::min(xmin, q.real());
      xmax = std::max(xmax, q.real());
      ymin = std::min(ymin, q.imag());
      ymax = std::max(ymax, q.imag());
    }
    const int g = 64;
    const double sx = (xmax - xmin) / g + 1e-300, sy = (ymax - ymin) / g + 1e-300;
    std::vector<std::vector<std::size_t>> cells(g * g);
    for (std::size_t s = 0; s < m; ++s) {
      const int x0 = std::clamp(int((std::min(p[s].real(), p[s + 1].real()) - xmin) / sx), 0, g - 1);
      const int x1 = std::clamp(int((std::max(p[s].real(), p[s + 1].real()) - xmin) / sx), 0, g - 1);
      const int y0 = std::clamp(int((std::min(p[s].imag(), p[s + 1].imag()) - ymin) / sy), 0, g - 1);
      const int y1 = std::clamp(int((std::max(p[s].imag(), p[s + 1].imag()) - ymin) / sy), 0, g - 1);
      for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) cells[x * g + y].push_back(s);
    }
    for (const auto& cell : cells)
      for (std::size_t i = 0; i < cell.size(); ++i)
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
          const std::size_t a = cell[i], b = cell[j];
          const std::size_t gap = a > b ? a - b : b - a;
          if (gap <= 1 || gap == m - 1) continue;
          const cplx p1 = p[a], p2 = p[a + 1], q1 = p[b], q2 = p[b + 1];
          const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
          const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
          if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0)
            throw PreconditionError("JordanDomain boundary self-intersects");
        }
  }
  return {std::move(name), JordanDomain{std::move(pieces), std::move(regularity_tag), interior_point,
                                        std::move(poly)}};
}

/// Model domain {2 Re tau > chi |tau|^2}: 0 is a boundary point with inner normal +1
/// and curvature chi.
inline DomainSpec classify_model(double chi) {
  if (!std::isfinite(chi)) throw PreconditionError("classify_model: chi must be finite");
  if (chi > 0.0) return make_disc(cplx{1.0 / chi}, 1.0 / chi, "model-disc");
  if (chi == 0.0) return make_half_plane(cplx{0.0}, cplx{1.0}, "model-half-plane");
  return make_disc_complement(cplx{1.0 / chi}, -1.0 / chi, "model-disc-complement");
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct BoundarySample {
  cplx point;
  cplx tangent;
  BoundaryParam param;
};

/// Polynomial grading t^p / (t^p + (1-t)^p): clusters nodes at both ends.
inline double graded(double t, int p) {
  const double a = std::pow(t, p);
  const double b = std::pow(1.0 - t, p);
  return a / (a + b);
}

inline double graded_deriv(double t, int p) {
  const double a = std::pow(t, p);
  const double b = std::pow(1.0 - t, p);
  return p * std::pow(t, p - 1) * std::pow(1.0 - t, p - 1) / sqr(a + b);
}

/// n points per piece, positively oriented, unit tangents. Closed pieces use t = j/n,
/// open pieces the midpoint rule (j + 1/2)/n, optionally graded towards the ends.
inline std::vector<BoundarySample> boundary_sample(const DomainSpec& d, int n, bool corner_graded = false) {
  if (n < 1) throw PreconditionError("boundary_sample: n must be positive");
  const auto pieces = boundary_pieces(d);
  std::vector<BoundarySample> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& piece = pieces[i];
    if (piece.unbounded()) throw PreconditionError("boundary_sample: unbounded boundary piece");
    const bool closed = piece.closed();
    for (int j = 0; j < n; ++j) {
      double t = closed ? double(j) / n : (j + 0.5) / n;
      if (!closed && corner_graded) t = graded(t, 3);
      const CurveJet jt = piece.jet(t);
      out.push_back({jt.p, unit(jt.d1), {i, t}});
    }
  }
  return out;
}

/// Axis-aligned bounding box {xmin, xmax, ymin, ymax}; nullopt for unbounded domains.
inline std::optional<std::array<double, 4>> bounding_box(const DomainSpec& d) {
  if (!is_bounded(d)) return std::nullopt;
  if (const auto* disc = d.get_if<Disc>())
    return std::array<double, 4>{disc->center.real() - disc->radius, disc->center.real() + disc->radius,
                                 disc->center.imag() - disc->radius, disc->center.imag() + disc->radius};
  if (const auto* an = d.get_if<Annulus>())
    return std::array<double, 4>{an->center.real() - an->r_outer, an->center.real() + an->r_outer,
                                 an->center.imag() - an->r_outer, an->center.imag() + an->r_outer};
  if (d.is<HalfDisc>()) return std::array<double, 4>{-1.0, 1.0, 0.0, 1.0};
  std::array<double, 4> box{1e300, -1e300, 1e300, -1e300};
  for (const auto& piece : boundary_pieces(d))
    for (int k = 0; k <= 4096; ++k) {
      const cplx p = piece.point(k / 4096.0);
      box[0] = std::min(box[0], p.real());
      box[1] = std::max(box[1], p.real());
      box[2] = std::min(box[2], p.imag());
      box[3] = std::max(box[3], p.imag());
    }
  return box;
}

}  // namespace iml
