#pragma once

// Shared numeric types, error hierarchy and small 1-D numerical helpers.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iml {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Argument lies on a branch cut or outside the declared domain of a map.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Newton inversion of a map did not converge.
class InversionError : public Error {
 public:
  InversionError(const std::string& what, cplx last_iterate, double residual)
      : Error(what), last_iterate_(last_iterate), residual_(residual) {}
  cplx last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  cplx last_iterate_;
  double residual_;
};

/// Membership could not be decided (e.g. the inverse map failed).
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

class UnsupportedQuantityError : public Error {
 public:
  using Error::Error;
};

class DegenerateParametrizationError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse to connect the requested points.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Gram matrix singular at the requested degree.
class DegreeReductionError : public Error {
 public:
  DegreeReductionError(const std::string& what, int largest_stable)
      : Error(what), largest_stable_(largest_stable) {}
  int largest_stable_degree() const { return largest_stable_; }

 private:
  int largest_stable_;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

inline double sqr(double x) { return x * x; }

/// Unit vector in the direction of z; zero maps to zero.
inline cplx unit(cplx z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : cplx{0.0, 0.0};
}

/// Result of a bracketed 1-D minimization.
struct Minimum {
  double x;
  double f;
};

/// Golden-section search on [a, b]. Stops when the bracket is below `tol`.
inline Minimum golden_section(const std::function<double(double)>& f, double a, double b,
                              double tol, int max_iter = 200) {
  constexpr double invphi = 0.6180339887498948482;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? Minimum{c, fc} : Minimum{d, fd};
}

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("gauss_legendre: n must be positive");
  GaussRule rule;
  if (n == 1) return GaussRule{{0.0}, {2.0}};
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Cached 8-point rule used for path integrals.
inline const GaussRule& gauss8() {
  static const GaussRule rule = gauss_legendre(8);
  return rule;
}

/// 64-bit FNV-1a hash; stable across platforms, used for cache keys.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace iml
