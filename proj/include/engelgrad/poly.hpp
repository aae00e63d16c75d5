#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "engelgrad/types.hpp"

namespace engelgrad {

using Exponents = std::array<int, 4>;

inline int total_degree(const Exponents& e) { return e[0] + e[1] + e[2] + e[3]; }

// Graded lexicographic order, leading term first: higher total degree wins,
// ties broken lexicographically with x1 > x2 > x3 > x4.
struct GradedLexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

struct Monomial {
  Exponents exps{};
  double coef = 0.0;
  bool operator==(const Monomial&) const = default;
};

/// Sparse real polynomial in x1..x4.
///
/// Terms are kept sorted in graded-lex order with unique exponents and no
/// zero coefficients, so two polynomials are equal iff their term lists are.
/// Values are immutable once built; every operation returns a new polynomial.
class Poly4 {
 public:
  Poly4() = default;

  static Poly4 constant(double c);
  /// The coordinate function x_i, i in 1..4.
  static Poly4 variable(int i);
  static Poly4 monomial(const Exponents& e, double coef);
  /// Builds from arbitrary terms; duplicates are summed and zeros dropped.
  static Poly4 from_terms(std::vector<Monomial> terms);

  std::span<const Monomial> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  int degree() const { return degree_; }
  double coeff(const Exponents& e) const;

  double eval(const Point4& x) const;
  /// d/dx_i for i in 1..4; throws std::out_of_range otherwise.
  Poly4 partial(int i) const;

  Poly4 operator-() const { return scaled(-1.0); }
  Poly4 scaled(double s) const;
  friend Poly4 operator+(const Poly4& p, const Poly4& q);
  friend Poly4 operator-(const Poly4& p, const Poly4& q);
  friend Poly4 operator*(const Poly4& p, const Poly4& q);
  friend Poly4 operator*(double s, const Poly4& p) { return p.scaled(s); }
  friend Poly4 operator*(const Poly4& p, double s) { return p.scaled(s); }

  bool operator==(const Poly4& other) const { return terms_ == other.terms_; }

  /// Euclidean norm of the coefficient vector.
  double coeff_norm() const;

  /// Largest |coefficient| of p - q.
  double max_coeff_diff(const Poly4& other) const;
  bool approx_equal(const Poly4& other, double tol = 1e-12) const {
    return max_coeff_diff(other) <= tol;
  }

 private:
  std::vector<Monomial> terms_;
  int degree_ = 0;

  void normalize();
};

/// Random polynomial with every coefficient of total degree <= d drawn
/// uniformly from [-scale, scale]. Deterministic in (d, seed, scale).
Poly4 random_poly(int d, std::uint64_t seed, double scale = 1.0);

/// Number of monomials in four variables of total degree <= d.
std::size_t monomial_count(int d);

/// All exponent tuples with total degree <= d in graded-lex order.
std::vector<Exponents> exponents_up_to(int d);

Poly4 parse_poly(std::string_view text);
std::string format_poly(const Poly4& p);

}  // namespace engelgrad
