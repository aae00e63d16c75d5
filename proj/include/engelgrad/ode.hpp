#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace engelgrad {

using OdeRhs = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& y)>;

struct DopriOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 selects a starting step from the first derivative
  double h_min = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
};

/// Dormand-Prince 5(4) with error control on the 4th-order estimate and the
/// method's own 4th-order continuous extension between accepted steps.
class Dopri5 {
 public:
  Dopri5(OdeRhs rhs, double t0, Eigen::VectorXd y0, const DopriOptions& opt = {});

  enum class Status { Accepted, StepFloor };

  /// Advances by one accepted step, never past t_limit.
  Status step(double t_limit);

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const Eigen::VectorXd& y() const { return y_; }
  double last_h() const { return t_ - t_prev_; }
  int accepted() const { return accepted_; }
  int rejected() const { return rejected_; }

  /// State at t in [t_prev(), t()] from the last accepted step.
  Eigen::VectorXd dense(double t) const;

 private:
  OdeRhs rhs_;
  DopriOptions opt_;
  double t_, t_prev_, h_;
  Eigen::VectorXd y_, k1_;
  Eigen::VectorXd r1_, r2_, r3_, r4_, r5_;
  int accepted_ = 0, rejected_ = 0;
  bool last_rejected_ = false;
};

}  // namespace engelgrad
