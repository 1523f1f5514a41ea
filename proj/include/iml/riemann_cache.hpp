#pragma once

// Solved Riemann maps shared per (domain, base point, node count). A binary sidecar
// is kept in $IML_CACHE_DIR when that variable is set.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>

#include "iml/riemann.hpp"
#include "iml/serialize.hpp"

namespace iml {

namespace detail {

inline std::string bits_hex(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(u));
  return buf;
}

/// Content key: domain JSON when serializable, otherwise a dense boundary fingerprint.
inline std::string riemann_key(const DomainSpec& d, cplx base, const RiemannOptions& opts) {
  std::string body;
  try {
    body = dump_domain(d);
  } catch (const SerializationError&) {
    for (const auto& piece : boundary_pieces(d))
      for (int k = 0; k <= 256; ++k) {
        const cplx p = piece.point(k / 256.0);
        body += bits_hex(p.real()) + bits_hex(p.imag());
      }
  }
  body += "|n=" + std::to_string(opts.n_nodes) + "|a=" + bits_hex(base.real()) + bits_hex(base.imag());
  body += "|g=" + std::string(opts.graded ? (*opts.graded ? "1" : "0") : "auto") + std::to_string(opts.grading_exponent);
  return body;
}

}  // namespace detail

/// Default base point of a Jordan domain: declared interior point, else the area centroid.
inline cplx default_base_point(const DomainSpec& d) {
  const auto* jd = d.get_if<JordanDomain>();
  if (!jd) throw PreconditionError("default_base_point: not a JordanDomain");
  if (jd->interior_point) return *jd->interior_point;
  const auto& p = jd->polyline->points;
  double area = 0.0;
  cplx c{0.0};
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    const double cr = (std::conj(p[j]) * p[j + 1]).imag();
    area += 0.5 * cr;
    c += (p[j] + p[j + 1]) * cr / 6.0;
  }
  c /= area;
  if (!contains(d, c)) throw PreconditionError("default_base_point: centroid is outside; declare an interior point");
  return c;
}

inline std::shared_ptr<const RiemannSolve> cached_riemann_map(const DomainSpec& d, cplx base,
                                                              const RiemannOptions& opts = {}) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const RiemannSolve>> memo;
  const std::uint64_t key = fnv1a(detail::riemann_key(d, base, opts));
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  std::shared_ptr<const RiemannSolve> solved;
  std::filesystem::path file;
  if (const char* dir = std::getenv("IML_CACHE_DIR"); dir && *dir) {
    char name[40];
    std::snprintf(name, sizeof name, "riemann-%016llx.bin", static_cast<unsigned long long>(key));
    file = std::filesystem::path(dir) / name;
    if (std::filesystem::exists(file)) {
      try {
        auto loaded = RiemannSolve::load(file.string());
        if (loaded->base_point() == base) solved = loaded;
      } catch (const SerializationError&) {
      }
    }
  }
  if (!solved) {
    solved = RiemannSolve::solve(d, base, opts);
    if (!file.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(file.parent_path(), ec);
      const auto tmp = file.string() + ".tmp" + std::to_string(key % 100000);
      try {
        solved->save(tmp);
        std::filesystem::rename(tmp, file, ec);
      } catch (const SerializationError&) {
      }
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  return memo.emplace(key, solved).first->second;
}

inline std::shared_ptr<const RiemannSolve> cached_riemann_map(const DomainSpec& d, int n_nodes = 1024) {
  RiemannOptions opts;
  opts.n_nodes = n_nodes;
  return cached_riemann_map(d, default_base_point(d), opts);
}

}  // namespace iml
