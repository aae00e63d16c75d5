#include "engelgrad/system.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace engelgrad {

PolySystem::PolySystem(std::vector<Poly4> equations) : eqs_(std::move(equations)) {
  grads_.reserve(eqs_.size());
  for (const auto& e : eqs_) grads_.push_back({e.partial(1), e.partial(2), e.partial(3), e.partial(4)});
  hess_.reserve(eqs_.size());
  for (const auto& g : grads_) {
    std::array<Poly4, 10> h;
    int k = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) h[k++] = g[i].partial(j + 1);
    hess_.push_back(std::move(h));
  }
}

Eigen::Matrix4d PolySystem::hessian(std::size_t i, const Point4& x) const {
  Eigen::Matrix4d H;
  int k = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c) H(r, c) = H(c, r) = hess_[i][k++].eval(x);
  return H;
}

DynVec PolySystem::value(const Point4& x) const {
  DynVec v(eqs_.size());
  for (std::size_t i = 0; i < eqs_.size(); ++i) v[static_cast<Eigen::Index>(i)] = eqs_[i].eval(x);
  return v;
}

DynMat PolySystem::jacobian(const Point4& x) const {
  DynMat J(eqs_.size(), 4);
  for (std::size_t i = 0; i < eqs_.size(); ++i)
    for (int j = 0; j < 4; ++j) J(static_cast<Eigen::Index>(i), j) = grads_[i][j].eval(x);
  return J;
}

DynMat ambient_to_frame_jacobian(const DynMat& ambient, const Point4& x) {
  // columns: X1 = e1, X2 = e2 + x1 e3 + x3 e4, X3 = e3, X4 = e4
  DynMat F = ambient;
  F.col(1) = ambient.col(1) + x[0] * ambient.col(2) + x[2] * ambient.col(3);
  return F;
}

DynMat PolySystem::frame_jacobian(const Point4& x) const {
  return ambient_to_frame_jacobian(jacobian(x), x);
}

double PolySystem::residual(const Point4& x) const {
  double r = 0.0;
  for (const auto& e : eqs_) r = std::max(r, std::abs(e.eval(x)));
  return r;
}

DynVec singular_values(const DynMat& m) {
  Eigen::JacobiSVD<DynMat> svd(m);
  return svd.singularValues();
}

DynVec min_norm_solve(const DynMat& J, const DynVec& r) {
  // dx = J^T (J J^T)^+ r, pseudo-inverse through the symmetric eigensolver.
  // Every step is exact under power-of-two rescaling of (J, r).
  DynMat JJt = J * J.transpose();
  Eigen::SelfAdjointEigenSolver<DynMat> es(JJt);
  const DynVec& lam = es.eigenvalues();
  double lmax = lam.cwiseAbs().maxCoeff();
  DynVec w = es.eigenvectors().transpose() * r;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] = (lmax > 0.0 && lam[i] > 1e-20 * lmax) ? w[i] / lam[i] : 0.0;
  return J.transpose() * (es.eigenvectors() * w);
}

Point4 newton_step(const PolySystem& sys, const Point4& x) {
  DynVec dx = min_norm_solve(sys.jacobian(x), sys.value(x));
  return x - dx.head<4>();
}

NewtonResult gauss_newton(const PolySystem& sys, const Point4& x0, const NewtonOptions& opt) {
  Point4 x = x0;
  DynVec F = sys.value(x);
  double fn = F.norm();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (fn == 0.0) break;
    DynVec dx = min_norm_solve(sys.jacobian(x), F);
    Point4 step = dx.head<4>();
    if (!step.allFinite()) break;
    double alpha = 1.0;
    Point4 xn = x - step;
    DynVec Fn = sys.value(xn);
    if (opt.damped) {
      int halvings = 0;
      while (!(Fn.norm() < fn) && halvings < 12) {
        alpha *= 0.5;
        xn = x - alpha * step;
        Fn = sys.value(xn);
        ++halvings;
      }
      if (!(Fn.norm() < fn)) break;
    }
    x = xn;
    F = Fn;
    fn = F.norm();
    if (alpha * step.norm() <= opt.step_tol * (1.0 + x.norm())) {
      ++it;
      break;
    }
    if (x.norm() > 1e8) break;
  }
  double res = F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
  return {x, res, it, res <= opt.tol && x.allFinite()};
}

namespace {

Projection tangential_projection(const PolySystem& sys, const Point4& x, Point4 y, const NewtonOptions& opt) {
  double dist = (x - y).norm();
  bool done = false;
  for (int k = 0; k < 200 && !done; ++k) {
    DynMat J = sys.jacobian(y);
    Vec4 r = x - y;
    Vec4 normal = min_norm_solve(J, J * r).head<4>();
    Vec4 tangent = r - normal;
    if (tangent.norm() <= 1e-13 * (1.0 + r.norm())) {
      done = true;
      break;
    }
    double scale = 1.0;
    bool moved = false;
    for (int h = 0; h < 20; ++h) {
      auto corr = gauss_newton(sys, y + scale * tangent, opt);
      if (corr.converged) {
        double nd = (x - corr.x).norm();
        if (nd < dist) {
          y = corr.x;
          dist = nd;
          moved = true;
          break;
        }
      }
      scale *= 0.5;
    }
    if (!moved) done = true;
  }
  return Projection{y, dist, done};
}

// Newton on the Lagrange system. The equations are rescaled by a power of two
// fixed by |J(y0)|, so multiplying F by a power of two changes nothing.
std::optional<Point4> lagrange_newton(const PolySystem& sys, const Point4& x, const Point4& y0) {
  const Eigen::Index m = static_cast<Eigen::Index>(sys.size());
  const Eigen::Index n = 4 + m;
  DynMat J0 = sys.jacobian(y0);
  int e = 0;
  std::frexp(J0.norm(), &e);
  const double s = std::ldexp(1.0, -e);

  Point4 y = y0;
  DynVec lam;
  {
    // lambda0 = argmin |J^T lambda - (x - y)|
    DynMat Js = s * J0;
    Eigen::SelfAdjointEigenSolver<DynMat> es(Js * Js.transpose());
    const DynVec& ev = es.eigenvalues();
    double lmax = ev.cwiseAbs().maxCoeff();
    DynVec w = es.eigenvectors().transpose() * (Js * (x - y));
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = (lmax > 0.0 && ev[i] > 1e-20 * lmax) ? w[i] / ev[i] : 0.0;
    lam = es.eigenvectors() * w;
  }
  const double scale = 1.0 + x.norm();
  for (int it = 0; it < 40; ++it) {
    DynVec F = s * sys.value(y);
    DynMat J = s * sys.jacobian(y);
    Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
    for (Eigen::Index i = 0; i < m; ++i) A += (lam[i] * s) * sys.hessian(static_cast<std::size_t>(i), y);
    DynMat M = DynMat::Zero(n, n);
    M.topLeftCorner(4, 4) = A;
    M.topRightCorner(4, m) = J.transpose();
    M.bottomLeftCorner(m, 4) = J;
    DynVec rhs(n);
    rhs.head(4) = -(y - x + J.transpose() * lam);
    rhs.tail(m) = -F;
    Eigen::FullPivLU<DynMat> lu(M);
    if (!lu.isInvertible()) return std::nullopt;
    DynVec d = lu.solve(rhs);
    if (!d.allFinite()) return std::nullopt;
    y += d.head<4>();
    lam += d.tail(m);
    if (d.head<4>().norm() <= 1e-14 * scale) return y;
    if (y.norm() > 1e8) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Projection> project_onto(const PolySystem& sys, const Point4& x, const Point4& start,
                                       const NewtonOptions& opt) {
  auto first = gauss_newton(sys, start, opt);
  if (!first.converged) return std::nullopt;
  const Point4 y0 = first.x;
  const double d0 = (x - y0).norm();
  if (auto y = lagrange_newton(sys, x, y0)) {
    auto polished = gauss_newton(sys, *y, opt);
    if (polished.converged) {
      double d = (x - polished.x).norm();
      if (d <= d0) return Projection{polished.x, d, true};
    }
  }
  return tangential_projection(sys, x, y0, opt);
}

}  // namespace engelgrad
