#include "engelgrad/ode.hpp"

#include <algorithm>
#include <cmath>

namespace engelgrad {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner, DOPRI5 contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

Dopri5::Dopri5(OdeRhs rhs, double t0, Eigen::VectorXd y0, const DopriOptions& opt)
    : rhs_(std::move(rhs)), opt_(opt), t_(t0), t_prev_(t0), y_(std::move(y0)) {
  k1_ = rhs_(t_, y_);
  if (opt_.h_init > 0.0) {
    h_ = opt_.h_init;
  } else {
    Eigen::VectorXd sc = (opt_.atol + opt_.rtol * y_.array().abs()).matrix();
    double d0 = std::sqrt((y_.array() / sc.array()).square().mean());
    double d1n = std::sqrt((k1_.array() / sc.array()).square().mean());
    h_ = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  }
  h_ = std::clamp(h_, opt_.h_min, opt_.h_max);
  r1_ = r2_ = r3_ = r4_ = r5_ = Eigen::VectorXd::Zero(y_.size());
  r1_ = y_;
}

Dopri5::Status Dopri5::step(double t_limit) {
  for (;;) {
    double h = std::min(h_, t_limit - t_);
    if (h < opt_.h_min && t_limit - t_ > opt_.h_min) return Status::StepFloor;
    const Eigen::VectorXd& y = y_;
    const Eigen::VectorXd& k1 = k1_;
    Eigen::VectorXd k2 = rhs_(t_ + c2 * h, y + h * a21 * k1);
    Eigen::VectorXd k3 = rhs_(t_ + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Eigen::VectorXd k4 = rhs_(t_ + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXd k5 = rhs_(t_ + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXd k6 = rhs_(t_ + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXd y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    Eigen::VectorXd k7 = rhs_(t_ + h, y1);
    Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    Eigen::ArrayXd sc = opt_.atol + opt_.rtol * y.array().abs().max(y1.array().abs());
    double en = std::sqrt((err.array() / sc).square().mean());
    if (!std::isfinite(en)) en = 1e10;

    double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    if (en <= 1.0) {
      r1_ = y;
      r2_ = y1 - y;
      r3_ = h * k1 - r2_;
      r4_ = r2_ - h * k7 - r3_;
      r5_ = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      t_prev_ = t_;
      t_ += h;
      y_ = std::move(y1);
      k1_ = std::move(k7);
      fac = std::clamp(fac, 0.2, last_rejected_ ? 1.0 : 5.0);
      h_ = std::clamp(h * fac, opt_.h_min, opt_.h_max);
      last_rejected_ = false;
      ++accepted_;
      return Status::Accepted;
    }
    ++rejected_;
    last_rejected_ = true;
    h_ = h * std::clamp(fac, 0.2, 1.0);
    if (h_ < opt_.h_min) return Status::StepFloor;
  }
}

Eigen::VectorXd Dopri5::dense(double t) const {
  double h = t_ - t_prev_;
  if (h <= 0.0) return y_;
  double th = (t - t_prev_) / h, th1 = 1.0 - th;
  return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
}

}  // namespace engelgrad
