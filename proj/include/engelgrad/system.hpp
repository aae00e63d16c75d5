#pragma once

#include <optional>
#include <vector>

#include "engelgrad/poly.hpp"

namespace engelgrad {

using DynVec = Eigen::VectorXd;
using DynMat = Eigen::MatrixXd;

/// A square or underdetermined system F(x) = 0 of polynomials on R^4 with
/// its ambient Jacobian precomputed symbolically.
class PolySystem {
 public:
  PolySystem() = default;
  explicit PolySystem(std::vector<Poly4> equations);

  std::size_t size() const { return eqs_.size(); }
  const std::vector<Poly4>& equations() const { return eqs_; }

  DynVec value(const Point4& x) const;
  /// Rows are ambient gradients (d1..d4) of each equation.
  DynMat jacobian(const Point4& x) const;
  /// Same Jacobian expressed in the Engel frame: column j is X_j of each equation.
  DynMat frame_jacobian(const Point4& x) const;
  double residual(const Point4& x) const;  // max |F_i(x)|
  /// Hessian of equation i (ambient second partials).
  Eigen::Matrix4d hessian(std::size_t i, const Point4& x) const;

 private:
  std::vector<Poly4> eqs_;
  std::vector<std::array<Poly4, 4>> grads_;
  std::vector<std::array<Poly4, 10>> hess_;  // upper triangle, row-major
};

/// Right-multiplication by the frame matrix E(x) whose columns are X1..X4.
DynMat ambient_to_frame_jacobian(const DynMat& ambient, const Point4& x);

/// Singular values in decreasing order.
DynVec singular_values(const DynMat& m);

/// Minimum-norm solution of J dx = r (least squares when inconsistent).
DynVec min_norm_solve(const DynMat& J, const DynVec& r);

struct NewtonOptions {
  double tol = 1e-9;      // residual acceptance, max |F_i|
  int max_iter = 60;
  double step_tol = 1e-15;  // relative step below which iteration stops
  bool damped = true;
};

struct NewtonResult {
  Point4 x;
  double residual;
  int iterations;
  bool converged;
};

/// Gauss-Newton with minimum-norm steps and backtracking on ||F||. Iteration
/// count depends only on step sizes, so rescaling F by a power of two leaves
/// the iterates bit-identical.
NewtonResult gauss_newton(const PolySystem& sys, const Point4& x0, const NewtonOptions& opt = {});

/// Single min-norm Newton correction (no damping).
Point4 newton_step(const PolySystem& sys, const Point4& x);

/// Local Euclidean foot point of x on {F = 0}. After a Gauss-Newton landing
/// from `start`, Newton's method on the Lagrange conditions
/// y - x + J^T lambda = 0, F(y) = 0 refines the foot; if that fails or moves
/// away, a monotone scheme of tangential moves and Newton corrections is used.
struct Projection {
  Point4 foot;
  double distance;
  bool converged;
};
std::optional<Projection> project_onto(const PolySystem& sys, const Point4& x, const Point4& start,
                                       const NewtonOptions& opt = {});

}  // namespace engelgrad
