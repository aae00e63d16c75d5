#pragma once

#include <array>
#include <span>
#include <utility>

#include "engelgrad/poly.hpp"

namespace engelgrad {

// Standard Engel frame on R^4:
//   X1 = d1,  X2 = d2 + x1 d3 + x3 d4,  X3 = d3,  X4 = d4.
// Delta = span{X1, X2}; annihilated by w3 = dx3 - x1 dx2 and w4 = dx4 - x3 dx2.

/// Components of a tangent vector in the frame {X1..X4} at a base point.
struct FrameVector {
  std::array<double, 4> a{};
  Point4 base = Point4::Zero();

  Vec4 ambient() const;
  double norm() const;
};

/// Ambient coordinates of sum_j a_j X_j(x).
Vec4 frame_to_ambient(const std::array<double, 4>& a, const Point4& x);

/// The horizontal gradient (X1 f) X1 + (X2 f) X2 in symbolic form.
struct HorizontalField {
  Poly4 h1;
  Poly4 h2;
  Poly4 source;
};

Poly4 apply_x(int i, const Poly4& p);

/// X_{i1 i2 ... ik} p = X_{i1}(X_{i2}(...(X_{ik} p))). The last index acts first.
Poly4 apply_word(std::span<const int> word, const Poly4& p);
inline Poly4 apply_word(std::initializer_list<int> word, const Poly4& p) {
  return apply_word(std::span<const int>(word.begin(), word.size()), p);
}

HorizontalField horizontal_gradient(const Poly4& f);

/// Frame components (X1 f, X2 f, X3 f, X4 f) of the Riemannian gradient.
std::array<Poly4, 4> riemannian_gradient(const Poly4& f);

/// Gf = X11f * X22f - X21f * X12f.
Poly4 g_poly(const Poly4& f);

/// xi_f(x) = -X21f(x) X1 + X11f(x) X2.
FrameVector xi_field(const Poly4& f, const Point4& x);

/// [d_x p](v) = sum_j a_j (X_j p)(x), x = v.base.
double frame_directional(const Poly4& p, const FrameVector& v);

/// Ambient velocity of a X1 + b X2 with (a, b) = (X1 f(x), X2 f(x)).
Vec4 ambient_velocity(const HorizontalField& hf, const Point4& x);
Vec4 ambient_velocity(double a, double b, const Point4& x);

/// (w3(v), w4(v)) at x; both vanish iff v lies in Delta_x.
std::pair<double, double> one_form_residual(const Point4& x, const Vec4& v);

/// Symbolic 2x4 Jacobian of the horizontal gradient in the frame:
/// row r, column j holds X_j(X_{r+1} f).
std::array<std::array<Poly4, 4>, 2> horizontal_jacobian(const Poly4& f);

/// Second-order words used throughout: X11f, X21f, X12f, X22f.
struct SecondOrder {
  Poly4 x11, x21, x12, x22;
};
SecondOrder second_order(const Poly4& f);

}  // namespace engelgrad
