#pragma once

#include <doctest.h>

#include <cmath>

#include "engelgrad/poly.hpp"
#include "engelgrad/rng.hpp"

namespace testing {

using namespace engelgrad;

inline Poly4 P(const char* text) { return parse_poly(text); }

// Random polynomial with dyadic coefficients k/8, |k| <= 16, so sums and
// products stay exact in double precision.
inline Poly4 dyadic_poly(int d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x64796164));
  std::vector<Monomial> terms;
  for (const auto& e : exponents_up_to(d)) {
    int k = static_cast<int>(rng.next_u64() % 33) - 16;
    if (rng.uniform() < 0.5) terms.push_back({e, k / 8.0});
  }
  return Poly4::from_terms(std::move(terms));
}

inline Point4 random_point(Rng& rng, double lo = -2.0, double hi = 2.0) {
  return Point4(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
}

// Central difference of p along the ambient vector v at x.
inline double fd_directional(const Poly4& p, const Point4& x, const Vec4& v, double h = 1e-5) {
  return (p.eval(x + h * v) - p.eval(x - h * v)) / (2.0 * h);
}

// Ambient vector of the frame field X_i at x.
inline Vec4 frame_vector(int i, const Point4& x) {
  switch (i) {
    case 1:
      return Vec4(1, 0, 0, 0);
    case 2:
      return Vec4(0, 1, x[0], x[2]);
    case 3:
      return Vec4(0, 0, 1, 0);
    default:
      return Vec4(0, 0, 0, 1);
  }
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace testing
