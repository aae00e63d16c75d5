#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace engelgrad {

using Point4 = Eigen::Vector4d;
using Vec4 = Eigen::Vector4d;

// How data-parallel kernels run. Serial is the reference path; Parallel must
// produce identical results for a fixed input.
enum class Exec { Serial, Parallel };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EmptyVariety : public Error {
 public:
  EmptyVariety() : Error("horizontal critical set is empty") {}
};

class RankDeficiency : public Error {
 public:
  RankDeficiency(const std::string& what, Point4 where) : Error(what), where_(where) {}
  const Point4& where() const { return where_; }

 private:
  Point4 where_;
};

class ComponentBoundExceeded : public Error {
 public:
  using Error::Error;
};

class NoAdmissiblePoint : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class IdentityViolation : public Error {
 public:
  using Error::Error;
};

class NoWitness : public Error {
 public:
  using Error::Error;
};

class HypothesisFailure : public Error {
 public:
  using Error::Error;
};

class Stalled : public Error {
 public:
  using Error::Error;
};

class StartOutsideBox : public Error {
 public:
  StartOutsideBox() : Error("trajectory start point lies outside the box") {}
};

// Axis-aligned compact box lower <= x <= upper.
struct Box {
  Point4 lower;
  Point4 upper;

  Box(Point4 lo, Point4 hi) : lower(lo), upper(hi) {
    for (int i = 0; i < 4; ++i)
      if (!(lower[i] < upper[i])) throw std::invalid_argument("box must have positive side lengths");
  }

  static Box cube(double lo, double hi) {
    return Box(Point4::Constant(lo), Point4::Constant(hi));
  }

  bool contains(const Point4& x, double slack = 0.0) const {
    for (int i = 0; i < 4; ++i)
      if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
    return true;
  }

  double diagonal() const { return (upper - lower).norm(); }

  // Euclidean distance from an interior point to the boundary.
  double inner_distance(const Point4& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) d = std::min({d, x[i] - lower[i], upper[i] - x[i]});
    return d;
  }
};

}  // namespace engelgrad
