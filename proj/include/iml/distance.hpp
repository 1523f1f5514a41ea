#pragma once

// Invariant distances: closed forms and pullbacks for the Poincaré distance, deck
// minimisation on the annulus, the comparison distance s, and a two-stage path
// optimiser (grid Dijkstra, then coordinate descent on a polyline) for b and h.

#include <algorithm>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "iml/core.hpp"
#include "iml/domain.hpp"
#include "iml/metrics.hpp"

namespace iml {

struct DistanceResult {
  double value{0.0};
  std::string method;        // closed_form | pullback | covering_min | path_opt
  bool upper_bound{false};
  int iterations{0};
  double tolerance{0.0};
};

namespace detail {

/// asinh(x) through log1p; exact for small x and free of overflow for large x.
inline double asinh_log(double x) {
  if (x > 1e150) return std::log(2.0) + std::log(x);
  return std::log1p(x + x * x / (std::sqrt(x * x + 1.0) + 1.0));
}

/// Poincaré distance in the unit disc from |u - v| and the two factors 1 - |.|^2.
inline double disc_poincare(double diff, double omu, double omv) { return asinh_log(diff / std::sqrt(omu * omv)); }

/// Poincaré distance in a half-plane from |z - w| and the two boundary distances.
inline double half_plane_poincare(double diff, double y1, double y2) {
  return asinh_log(diff / (2.0 * std::sqrt(y1 * y2)));
}

inline double disc_poincare_at(const Disc& d, cplx z, cplx w) {
  const double rz = std::abs(z - d.center), rw = std::abs(w - d.center);
  const double r = d.radius;
  const double omz = (r - rz) * (r + rz) / (r * r);
  const double omw = (r - rw) * (r + rw) / (r * r);
  return disc_poincare(std::abs(z - w) / r, omz, omw);
}

/// Lifted distance on the strip {0 < Re < pi} between a1 + i b1 and a2 + i b2, given
/// sin a1 and sin a2 directly.
inline double strip_poincare(double sa1, double sa2, double da, double db) {
  const double num = sqr(std::sinh(0.5 * db)) + sqr(std::sin(0.5 * da));
  return asinh_log(std::sqrt(num / (sa1 * sa2)));
}

constexpr int deck_window = 20;

}  // namespace detail

/// Comparison distance asinh(|z - w| / (2 sqrt(d(z) d(w)))) in its log form.
inline double s_dist(const DomainSpec& d, cplx z, cplx w) {
  const double dz = dist_to_boundary(d, z).distance;
  const double dw = z == w ? dz : dist_to_boundary(d, w).distance;
  if (z == w) return 0.0;
  const double delta = std::abs(z - w);
  const double sp = std::sqrt(dz * dw);
  return std::log1p((delta + delta * delta / (std::sqrt(delta * delta + 4.0 * dz * dw) + 2.0 * sp)) / (2.0 * sp));
}

/// Poincaré-type distance p_D. `kind` selects Carathéodory or Kobayashi; both agree on
/// simply connected domains.
inline DistanceResult poincare_dist(const DomainSpec& d, cplx z, cplx w,
                                    QuantityId kind = QuantityId::kobayashi_kappa, const DensityOptions& opts = {}) {
  if (kind != QuantityId::caratheodory_gamma && kind != QuantityId::kobayashi_kappa)
    throw UnsupportedQuantityError("poincare_dist: kind must be caratheodory_gamma or kobayashi_kappa");
  if (!contains(d, z) || !contains(d, w)) throw PreconditionError("poincare_dist: points must be interior");
  DistanceResult out;
  out.method = "closed_form";
  if (z == w) return out;
  if (const auto* disc = d.get_if<Disc>()) {
    out.value = detail::disc_poincare_at(*disc, z, w);
  } else if (const auto* hp = d.get_if<HalfPlane>()) {
    const cplx n = hp->inner_normal;
    const double y1 = ((z - hp->boundary_point) * std::conj(n)).real();
    const double y2 = ((w - hp->boundary_point) * std::conj(n)).real();
    out.value = detail::half_plane_poincare(std::abs(z - w), y1, y2);
  } else if (d.is<HalfDisc>()) {
    // ((z+1)/(z-1))^2 onto the upper half-plane, with Im F written without cancellation
    auto im_f = [](cplx x) {
      const double rho = std::abs(x);
      return 4.0 * x.imag() * (1.0 - rho) * (1.0 + rho) / sqr(std::norm(x - 1.0));
    };
    const cplx fz = map_eval(CayleySquare{}, z), fw = map_eval(CayleySquare{}, w);
    out.value = detail::half_plane_poincare(std::abs(fz - fw), im_f(z), im_f(w));
  } else if (const auto* dc = d.get_if<DiscComplement>()) {
    const double r = dc->radius;
    const cplx uz = z - dc->center, uw = w - dc->center;
    const double rz = std::abs(uz), rw = std::abs(uw);
    if (kind == QuantityId::caratheodory_gamma) {
      // inversion w = r / (z - c) onto the unit disc
      const cplx iz = r / uz, iw = r / uw;
      const double omz = (rz - r) * (rz + r) / (rz * rz), omw = (rw - r) * (rw + r) / (rw * rw);
      out.value = detail::disc_poincare(std::abs(iz - iw), omz, omw);
    } else {
      // log covers the punctured disc by a half-plane; minimise over deck translates
      const double az = std::log1p((rz - r) / r), aw = std::log1p((rw - r) / r);
      const double bz = std::arg(uz), bw = std::arg(uw);
      double best = std::numeric_limits<double>::infinity();
      for (int k = -detail::deck_window; k <= detail::deck_window; ++k) {
        const double db = bz - bw + 2.0 * pi * k;
        best = std::min(best, detail::half_plane_poincare(std::hypot(az - aw, db), az, aw));
      }
      out.value = best;
      out.method = "covering_min";
    }
  } else if (const auto* an = d.get_if<Annulus>()) {
    if (kind == QuantityId::caratheodory_gamma)
      throw UnsupportedQuantityError("caratheodory distance is not available on the annulus");
    const double R = an->r_outer;
    const double W = std::log(R / an->r_inner);
    const double s = pi / W;
    auto lift = [&](cplx x, double& a, double& sin_a, double& b) {
      const cplx u = x - an->center;
      const double rho = std::abs(u);
      const double to_inner = std::log(rho / an->r_inner);
      const double to_outer = -std::log1p((rho - R) / R);
      a = s * to_inner;
      sin_a = std::sin(s * std::min(to_inner, to_outer));
      b = s * std::arg(u);
    };
    double az, sz, bz, aw, sw, bw;
    lift(z, az, sz, bz);
    lift(w, aw, sw, bw);
    double best = std::numeric_limits<double>::infinity();
    for (int k = -detail::deck_window; k <= detail::deck_window; ++k)
      best = std::min(best, detail::strip_poincare(sz, sw, az - aw, bz - bw + 2.0 * pi * s * k));
    out.value = best;
    out.method = "covering_min";
  } else if (const auto* ci = d.get_if<ConformalImage>()) {
    cplx xz, xw;
    try {
      xz = detail::invert_into_base(*ci, z);
      xw = detail::invert_into_base(*ci, w);
    } catch (const InversionError& e) {
      throw IndeterminateError(std::string("poincare_dist: inverse map failed: ") + e.what());
    }
    out = poincare_dist(*ci->base, xz, xw, kind);
    out.method = "pullback";
  } else {
    const auto rs = cached_riemann_map(d, opts.riemann_nodes);
    const cplx fz = rs->value(z), fw = rs->value(w);
    out.value = detail::disc_poincare(std::abs(fz - fw), 1.0 - std::norm(fz), 1.0 - std::norm(fw));
    out.method = "pullback";
    out.tolerance = rs->error_estimate();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Path optimiser
// ---------------------------------------------------------------------------

struct PathOptions {
  int grid = 256;
  double rel_tol = 1e-8;
  int max_sweeps = 60;
  std::vector<int> levels{9, 17, 33, 65};
};

/// Integrated length of a polyline under a density.
struct PathPolyline {
  std::vector<cplx> nodes;
  std::string integrand_id;  // bergman_beta | quasi_hyperbolic_inv_d
  double length_value{0.0};
};

namespace detail {

using Density = std::function<double(cplx)>;

/// Adaptive composite Gauss-Legendre-8 along the segment a -> b.
inline double segment_integral(const Density& rho, cplx a, cplx b, double whole = -1.0, int depth = 0) {
  const GaussRule& g = gauss8();
  auto gl = [&](cplx p, cplx q) {
    double s = 0.0;
    const cplx m = 0.5 * (p + q), h = 0.5 * (q - p);
    for (int i = 0; i < 8; ++i) {
      const double v = rho(m + g.nodes[i] * h);
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      s += g.weights[i] * v;
    }
    return s * std::abs(h);
  };
  if (whole < 0.0) whole = gl(a, b);
  if (!std::isfinite(whole)) return whole;
  const cplx mid = 0.5 * (a + b);
  const double left = gl(a, mid), right = gl(mid, b);
  const double halves = left + right;
  if (!std::isfinite(halves)) return halves;
  if (std::abs(halves - whole) <= 1e-11 * halves || depth >= 40) return halves;
  return segment_integral(rho, a, mid, left, depth + 1) + segment_integral(rho, mid, b, right, depth + 1);
}

inline double polyline_length(const Density& rho, const std::vector<cplx>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) s += segment_integral(rho, p[i], p[i + 1]);
  return s;
}

/// Resample a polyline to n nodes equally spaced in integrated density, so each
/// segment carries a similar share of the length and its quadrature stays cheap.
inline std::vector<cplx> resample(const Density& rho, const std::vector<cplx>& p, int n) {
  std::vector<double> acc{0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    double m = rho(0.5 * (p[i] + p[i - 1]));
    if (!std::isfinite(m)) m = 0.0;
    acc.push_back(acc.back() + std::abs(p[i] - p[i - 1]) * m);
  }
  std::vector<cplx> out;
  const double total = acc.back();
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double s = total * k / (n - 1);
    while (seg + 2 < acc.size() && acc[seg + 1] < s) ++seg;
    const double len = acc[seg + 1] - acc[seg];
    const double t = len > 0.0 ? std::clamp((s - acc[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(p[seg] + t * (p[seg + 1] - p[seg]));
  }
  out.front() = p.front();
  out.back() = p.back();
  return out;
}

/// Grid shortest path between z and w; returns the vertex sequence including z and w.
inline std::vector<cplx> grid_path(const DomainSpec& d, const Density& rho, cplx z, cplx w, int n) {
  const cplx c = 0.5 * (z + w);
  const double dz = detail::nearest_foot(d, z, {}).distance, dw = detail::nearest_foot(d, w, {}).distance;
  const double hw = 1.5 * std::max({std::abs(z - w), dz, dw});
  double x0 = c.real() - hw, x1 = c.real() + hw, y0 = c.imag() - hw, y1 = c.imag() + hw;
  if (auto box = bounding_box(d)) {
    x0 = std::max(x0, (*box)[0]);
    x1 = std::min(x1, (*box)[1]);
    y0 = std::max(y0, (*box)[2]);
    y1 = std::min(y1, (*box)[3]);
  }
  const double hx = (x1 - x0) / (n - 1), hy = (y1 - y0) / (n - 1);
  auto node = [&](int i, int j) { return cplx{x0 + i * hx, y0 + j * hy}; };
  const int N = n * n;
  std::vector<double> val(N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) val[i * n + j] = rho(node(i, j));

  // vertices: grid nodes, then z (N) and w (N + 1)
  std::vector<double> dist(N + 2, std::numeric_limits<double>::infinity());
  std::vector<int> prev(N + 2, -1);
  auto edge = [&](cplx a, cplx b) {
    const double m = rho(0.5 * (a + b));
    return std::isfinite(m) ? std::abs(b - a) * m : std::numeric_limits<double>::infinity();
  };
  auto cell_of = [&](cplx p, int& ci, int& cj) {
    ci = std::clamp(static_cast<int>((p.real() - x0) / hx), 0, n - 2);
    cj = std::clamp(static_cast<int>((p.imag() - y0) / hy), 0, n - 2);
  };
  int wi, wj;
  cell_of(w, wi, wj);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[N] = 0.0;
  pq.push({0.0, N});
  const int di[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    if (u == N + 1) break;
    auto relax = [&](int v, double wgt) {
      if (!std::isfinite(wgt)) return;
      if (du + wgt < dist[v]) {
        dist[v] = du + wgt;
        prev[v] = u;
        pq.push({dist[v], v});
      }
    };
    if (u == N) {
      int ci, cj;
      cell_of(z, ci, cj);
      for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
          const int v = (ci + a) * n + (cj + b);
          if (std::isfinite(val[v])) relax(v, edge(z, node(ci + a, cj + b)));
        }
      if (std::abs(z - w) <= 2.0 * std::hypot(hx, hy)) relax(N + 1, segment_integral(rho, z, w));
      continue;
    }
    const int ui = u / n, uj = u % n;
    const cplx pu = node(ui, uj);
    for (int k = 0; k < 8; ++k) {
      const int vi = ui + di[k], vj = uj + dj[k];
      if (vi < 0 || vj < 0 || vi >= n || vj >= n) continue;
      const int v = vi * n + vj;
      if (!std::isfinite(val[v])) continue;
      relax(v, edge(pu, node(vi, vj)));
    }
    if ((ui == wi || ui == wi + 1) && (uj == wj || uj == wj + 1)) relax(N + 1, edge(pu, w));
  }
  if (!std::isfinite(dist[N + 1]))
    throw ResolutionError("path optimiser: points are not connected on the grid; increase the resolution");
  std::vector<cplx> path;
  for (int v = N + 1; v != -1; v = prev[v]) path.push_back(v == N ? z : v == N + 1 ? w : node(v / n, v % n));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

/// Two-stage minimisation of the integrated density between z and w. The result is
/// the length of an explicit polyline, hence an upper bound for the infimum.
inline DistanceResult path_distance(const DomainSpec& d, cplx z, cplx w, const detail::Density& density_fn,
                                    const PathOptions& opts = {}, PathPolyline* out_path = nullptr) {
  if (!contains(d, z) || !contains(d, w)) throw PreconditionError("path distance: points must be interior");
  DistanceResult res;
  res.method = "path_opt";
  res.upper_bound = true;
  if (z == w) return res;
  if (opts.grid < 4) throw PreconditionError("path distance: grid resolution must be at least 4");
  // canonical order so that d(z, w) and d(w, z) run the same computation
  if (w.real() < z.real() || (w.real() == z.real() && w.imag() < z.imag())) std::swap(z, w);
  const detail::Density rho = [&](cplx p) -> double {
    try {
      if (!contains(d, p)) return std::numeric_limits<double>::infinity();
      return density_fn(p);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const auto coarse = detail::grid_path(d, rho, z, w, opts.grid);
  std::vector<cplx> p = detail::resample(rho, coarse, opts.levels.front());
  double L = detail::polyline_length(rho, p);
  if (!std::isfinite(L)) {
    // resampling cut a corner of the domain; fall back to the raw grid path
    p = coarse;
    L = detail::polyline_length(rho, p);
  }
  double prev_level = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  for (std::size_t lvl = 0; lvl < opts.levels.size(); ++lvl) {
    if (lvl > 0) {
      std::vector<cplx> q;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        q.push_back(p[i]);
        q.push_back(0.5 * (p[i] + p[i + 1]));
      }
      q.push_back(p.back());
      p = std::move(q);
      L = detail::polyline_length(rho, p);
    }
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      ++iterations;
      const double before = L;
      for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        // local coordinates: across and along the chord joining the neighbours
        const cplx chord = p[i + 1] - p[i - 1];
        const cplx tdir = unit(chord);
        if (tdir == cplx{0.0}) continue;
        for (cplx dir : {I * tdir, tdir}) {
          const cplx a = p[i - 1], b = p[i + 1], c = p[i];
          const double h = dir == tdir ? 0.5 * std::min(std::abs(c - a), std::abs(b - c)) : 0.5 * std::abs(chord);
          if (!(h > 0.0)) continue;
          auto local = [&](double s) {
            const cplx x = c + s * dir;
            return detail::segment_integral(rho, a, x) + detail::segment_integral(rho, x, b);
          };
          const double f0 = local(0.0);
          const Minimum m = golden_section(local, -h, h, 1e-6 * h, 60);
          if (m.f < f0) p[i] = c + m.x * dir;
        }
      }
      L = detail::polyline_length(rho, p);
      if (before - L <= opts.rel_tol * L) break;
    }
    if (lvl > 0) res.tolerance = std::abs(prev_level - L);
    prev_level = L;
  }
  res.value = L;
  res.iterations = iterations;
  res.tolerance += 1e-8 * L;
  if (out_path) *out_path = PathPolyline{p, "", L};
  return res;
}

/// Quasi-hyperbolic distance: integrated 1/d_D.
inline DistanceResult quasi_hyperbolic_dist(const DomainSpec& d, cplx z, cplx w, const PathOptions& opts = {},
                                            PathPolyline* path = nullptr) {
  auto r = path_distance(
      d, z, w, [&](cplx p) { return 1.0 / detail::nearest_foot(d, p, {}).distance; }, opts, path);
  if (path) path->integrand_id = "quasi_hyperbolic_inv_d";
  return r;
}

/// Bergman distance: integrated beta = M / sqrt(K).
inline DistanceResult bergman_dist(const DomainSpec& d, cplx z, cplx w, const PathOptions& opts = {},
                                   PathPolyline* path = nullptr) {
  auto r = path_distance(d, z, w, [&](cplx p) { return bergman_beta(d, p); }, opts, path);
  if (path) path->integrand_id = "bergman_beta";
  return r;
}

}  // namespace iml
