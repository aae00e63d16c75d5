#include "engelgrad/poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "engelgrad/rng.hpp"

namespace engelgrad {

Poly4 Poly4::constant(double c) { return monomial({0, 0, 0, 0}, c); }

Poly4 Poly4::variable(int i) {
  if (i < 1 || i > 4) throw std::out_of_range("variable index must be in 1..4");
  Exponents e{0, 0, 0, 0};
  e[i - 1] = 1;
  return monomial(e, 1.0);
}

Poly4 Poly4::monomial(const Exponents& e, double coef) {
  for (int k : e)
    if (k < 0) throw std::invalid_argument("negative exponent");
  Poly4 p;
  if (coef != 0.0) {
    p.terms_.push_back({e, coef});
    p.degree_ = total_degree(e);
  }
  return p;
}

Poly4 Poly4::from_terms(std::vector<Monomial> terms) {
  for (const auto& t : terms)
    for (int k : t.exps)
      if (k < 0) throw std::invalid_argument("negative exponent");
  Poly4 p;
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

void Poly4::normalize() {
  GradedLexGreater less;
  std::stable_sort(terms_.begin(), terms_.end(),
                   [&](const Monomial& a, const Monomial& b) { return less(a.exps, b.exps); });
  std::vector<Monomial> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().exps == t.exps)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Monomial& m) { return m.coef == 0.0; });
  terms_ = std::move(merged);
  degree_ = terms_.empty() ? 0 : total_degree(terms_.front().exps);
}

double Poly4::coeff(const Exponents& e) const {
  GradedLexGreater less;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                             [&](const Monomial& m, const Exponents& key) { return less(m.exps, key); });
  return (it != terms_.end() && it->exps == e) ? it->coef : 0.0;
}

double Poly4::eval(const Point4& x) const {
  if (terms_.empty()) return 0.0;
  // powers[k][j] = x_k^j, j <= degree
  constexpr int kStack = 16;
  const int n = degree_ + 1;
  double stack[4][kStack];
  std::vector<double> heap;
  double* powers[4];
  if (n <= kStack) {
    for (int k = 0; k < 4; ++k) powers[k] = stack[k];
  } else {
    heap.resize(4 * static_cast<std::size_t>(n));
    for (int k = 0; k < 4; ++k) powers[k] = heap.data() + k * n;
  }
  for (int k = 0; k < 4; ++k) {
    powers[k][0] = 1.0;
    for (int j = 1; j < n; ++j) powers[k][j] = powers[k][j - 1] * x[k];
  }
  double s = 0.0;
  for (const auto& t : terms_)
    s += t.coef * powers[0][t.exps[0]] * powers[1][t.exps[1]] * powers[2][t.exps[2]] *
         powers[3][t.exps[3]];
  return s;
}

Poly4 Poly4::partial(int i) const {
  if (i < 1 || i > 4) throw std::out_of_range("partial derivative index must be in 1..4");
  const int k = i - 1;
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (t.exps[k] == 0) continue;
    Monomial m = t;
    m.coef *= t.exps[k];
    m.exps[k] -= 1;
    out.push_back(m);
  }
  return from_terms(std::move(out));
}

Poly4 Poly4::scaled(double s) const {
  std::vector<Monomial> out(terms_);
  for (auto& t : out) t.coef *= s;
  return from_terms(std::move(out));
}

Poly4 operator+(const Poly4& p, const Poly4& q) {
  std::vector<Monomial> all;
  all.reserve(p.size() + q.size());
  all.insert(all.end(), p.terms_.begin(), p.terms_.end());
  all.insert(all.end(), q.terms_.begin(), q.terms_.end());
  return Poly4::from_terms(std::move(all));
}

Poly4 operator-(const Poly4& p, const Poly4& q) { return p + q.scaled(-1.0); }

Poly4 operator*(const Poly4& p, const Poly4& q) {
  std::map<Exponents, double, GradedLexGreater> acc;
  for (const auto& a : p.terms_)
    for (const auto& b : q.terms_) {
      Exponents e;
      for (int k = 0; k < 4; ++k) e[k] = a.exps[k] + b.exps[k];
      acc[e] += a.coef * b.coef;
    }
  std::vector<Monomial> out;
  out.reserve(acc.size());
  for (const auto& [e, c] : acc) out.push_back({e, c});
  return Poly4::from_terms(std::move(out));
}

double Poly4::coeff_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef * t.coef;
  return std::sqrt(s);
}

double Poly4::max_coeff_diff(const Poly4& other) const {
  double m = 0.0;
  for (const auto& t : (*this - other).terms_) m = std::max(m, std::abs(t.coef));
  return m;
}

std::size_t monomial_count(int d) {
  if (d < 0) return 0;
  // C(d + 4, 4)
  std::size_t n = static_cast<std::size_t>(d);
  return (n + 1) * (n + 2) * (n + 3) * (n + 4) / 24;
}

std::vector<Exponents> exponents_up_to(int d) {
  std::vector<Exponents> out;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; a + b <= d; ++b)
      for (int c = 0; a + b + c <= d; ++c)
        for (int e = 0; a + b + c + e <= d; ++e) out.push_back({a, b, c, e});
  std::sort(out.begin(), out.end(), GradedLexGreater{});
  return out;
}

Poly4 random_poly(int d, std::uint64_t seed, double scale) {
  if (d < 0) throw std::invalid_argument("degree bound must be non-negative");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  Rng rng(derive_seed(seed, 0x706f6c79 /* "poly" */));
  std::vector<Monomial> terms;
  for (const auto& e : exponents_up_to(d)) terms.push_back({e, rng.uniform(-scale, scale)});
  return Poly4::from_terms(std::move(terms));
}

}  // namespace engelgrad
