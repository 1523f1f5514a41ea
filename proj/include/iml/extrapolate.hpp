#pragma once

// Limit estimation for sequences sampled on a geometric approach schedule:
// two guarded passes of Aitken's delta-squared process.

#include <algorithm>
#include <vector>

#include "iml/core.hpp"

namespace iml {

struct LimitEstimate {
  double value{0.0};
  double error_indicator{0.0};
  std::vector<double> raw;
  bool fallback{false};  // a pass hit a vanishing denominator
  std::size_t used{0};   // leading terms behind the reported value
};

namespace detail {

/// One Aitken pass; false when some denominator is below 1e-14 * scale.
inline bool aitken_pass(const std::vector<double>& x, double scale, std::vector<double>& out) {
  out.clear();
  for (std::size_t k = 0; k + 2 < x.size(); ++k) {
    const double d1 = x[k + 1] - x[k];
    const double d2 = x[k + 2] - x[k + 1];
    const double den = d2 - d1;
    if (std::abs(den) < 1e-14 * scale) return false;
    out.push_back(x[k + 2] - d2 * d2 / den);
  }
  return true;
}

inline double last_increment(const std::vector<double>& x) {
  return x.size() >= 2 ? std::abs(x.back() - x[x.size() - 2]) : 0.0;
}

}  // namespace detail

/// Two guarded Aitken passes. A pass with a vanishing denominator is dropped and the
/// last term of its input is reported, with the last increment as error indicator.
/// With per-term noise bands the sequence is cut before the first increment that
/// falls inside the bands, and the indicator is at least the last kept band. The
/// reported value is the second-pass entry with the smallest local increments.
inline LimitEstimate extrapolate(const std::vector<double>& seq, const std::vector<double>& noise = {}) {
  if (seq.size() < 5) throw PreconditionError("extrapolate: need at least 5 terms");
  if (!noise.empty() && noise.size() != seq.size()) throw PreconditionError("extrapolate: noise size mismatch");
  for (double v : seq)
    if (!std::isfinite(v)) throw PreconditionError("extrapolate: non-finite term");
  std::size_t n = seq.size();
  if (!noise.empty())
    for (std::size_t k = 1; k < seq.size(); ++k)
      if (std::abs(seq[k] - seq[k - 1]) <= 10.0 * (noise[k] + noise[k - 1])) {
        n = std::max<std::size_t>(k, 5);
        break;
      }
  const std::vector<double> x(seq.begin(), seq.begin() + n);
  {
    int alternating = 0;
    for (std::size_t k = n - 4; k + 2 < n; ++k) {
      const double a = x[k + 1] - x[k], b = x[k + 2] - x[k + 1];
      if (a * b < 0.0 && std::abs(b) > std::abs(a)) ++alternating;
    }
    if (alternating == 2) throw DivergenceError("extrapolate: increments alternate in sign with growing magnitude");
  }
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));

  LimitEstimate est;
  est.raw = seq;
  est.used = n;
  std::vector<double> a1, a2;
  if (scale == 0.0 || !detail::aitken_pass(x, scale, a1)) {
    est.value = x.back();
    est.error_indicator = detail::last_increment(x);
    est.fallback = true;
  } else if (!detail::aitken_pass(a1, scale, a2)) {
    est.value = a1.back();
    est.error_indicator = detail::last_increment(a1);
    est.fallback = true;
  } else {
    // a2[k] is built from x[k..k+4]; keep the entry whose increments are smallest, so
    // terms deep in the rounding regime cannot displace an earlier converged value
    std::size_t best = a2.size() - 1;
    auto err = [&](std::size_t k) {
      const double inc = k > 0 ? std::abs(a2[k] - a2[k - 1]) : std::abs(a1[k + 1] - a2[k]);
      double e = std::max(std::abs(a1[k + 2] - a2[k]), inc);
      if (!noise.empty()) e = std::max(e, noise[k + 4]);
      return e;
    };
    for (std::size_t k = a2.size() - 1; k-- > 0;)
      if (err(k) < err(best)) best = k;
    est.value = a2[best];
    est.error_indicator = err(best);
    est.used = best + 5;
  }
  if (!noise.empty()) est.error_indicator = std::max(est.error_indicator, noise[est.used - 1]);
  return est;
}

}  // namespace iml
