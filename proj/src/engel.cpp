#include "engelgrad/engel.hpp"

#include <cmath>
#include <stdexcept>

namespace engelgrad {

Vec4 frame_to_ambient(const std::array<double, 4>& a, const Point4& x) {
  return Vec4(a[0], a[1], a[2] + x[0] * a[1], a[3] + x[2] * a[1]);
}

Vec4 FrameVector::ambient() const { return frame_to_ambient(a, base); }

double FrameVector::norm() const {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

Poly4 apply_x(int i, const Poly4& p) {
  static const Poly4 x1 = Poly4::variable(1);
  static const Poly4 x3 = Poly4::variable(3);
  switch (i) {
    case 1:
      return p.partial(1);
    case 2:
      return p.partial(2) + x1 * p.partial(3) + x3 * p.partial(4);
    case 3:
      return p.partial(3);
    case 4:
      return p.partial(4);
    default:
      throw std::out_of_range("frame index must be in 1..4");
  }
}

Poly4 apply_word(std::span<const int> word, const Poly4& p) {
  if (word.empty()) throw std::invalid_argument("word must be non-empty");
  Poly4 q = p;
  for (auto it = word.rbegin(); it != word.rend(); ++it) q = apply_x(*it, q);
  return q;
}

HorizontalField horizontal_gradient(const Poly4& f) { return {apply_x(1, f), apply_x(2, f), f}; }

std::array<Poly4, 4> riemannian_gradient(const Poly4& f) {
  return {apply_x(1, f), apply_x(2, f), apply_x(3, f), apply_x(4, f)};
}

SecondOrder second_order(const Poly4& f) {
  Poly4 h1 = apply_x(1, f), h2 = apply_x(2, f);
  return {apply_x(1, h1), apply_x(2, h1), apply_x(1, h2), apply_x(2, h2)};
}

Poly4 g_poly(const Poly4& f) {
  auto s = second_order(f);
  return s.x11 * s.x22 - s.x21 * s.x12;
}

FrameVector xi_field(const Poly4& f, const Point4& x) {
  auto s = second_order(f);
  FrameVector v;
  v.base = x;
  v.a = {-s.x21.eval(x), s.x11.eval(x), 0.0, 0.0};
  return v;
}

double frame_directional(const Poly4& p, const FrameVector& v) {
  double s = 0.0;
  for (int j = 0; j < 4; ++j)
    if (v.a[j] != 0.0) s += v.a[j] * apply_x(j + 1, p).eval(v.base);
  return s;
}

Vec4 ambient_velocity(double a, double b, const Point4& x) {
  return Vec4(a, b, x[0] * b, x[2] * b);
}

Vec4 ambient_velocity(const HorizontalField& hf, const Point4& x) {
  return ambient_velocity(hf.h1.eval(x), hf.h2.eval(x), x);
}

std::pair<double, double> one_form_residual(const Point4& x, const Vec4& v) {
  return {v[2] - x[0] * v[1], v[3] - x[2] * v[1]};
}

std::array<std::array<Poly4, 4>, 2> horizontal_jacobian(const Poly4& f) {
  std::array<std::array<Poly4, 4>, 2> jac;
  Poly4 h[2] = {apply_x(1, f), apply_x(2, f)};
  for (int r = 0; r < 2; ++r)
    for (int j = 0; j < 4; ++j) jac[r][j] = apply_x(j + 1, h[r]);
  return jac;
}

}  // namespace engelgrad
