#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "engelgrad/parallel.hpp"
#include "engelgrad/varieties.hpp"

namespace engelgrad {

std::string to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::FiberContained:
      return "FiberContained";
    case ComponentClass::Transverse:
      return "Transverse";
    case ComponentClass::Undetermined:
      return "Undetermined";
  }
  return "?";
}

double GammaComponent::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) s += (polyline[i] - polyline[i - 1]).norm();
  if (closed && polyline.size() > 1) s += (polyline.front() - polyline.back()).norm();
  return s;
}

long long component_bound(int d) {
  if (d <= 1) return 0;
  long long a = d - 1;
  long long b = 4 * a - 1;
  return 2 * a * b * b * b;
}

namespace {

struct TangentInfo {
  Vec4 tangent;       // unit, ambient coordinates
  double sigma_rel;   // sigma3 / sigma1 of the 3x4 frame Jacobian
};

// Unit kernel vector of the frame Jacobian, mapped to ambient coordinates.
TangentInfo kernel_tangent(const PolySystem& sys, const Point4& x) {
  DynMat Jf = sys.frame_jacobian(x);
  Eigen::JacobiSVD<DynMat> svd(Jf, Eigen::ComputeFullV);
  const DynVec& s = svd.singularValues();
  double rel = s[0] > 0.0 ? s[std::min<Eigen::Index>(2, s.size() - 1)] / s[0] : 0.0;
  Eigen::Vector4d a = svd.matrixV().col(3);
  Vec4 t = frame_to_ambient({a[0], a[1], a[2], a[3]}, x);
  return {t.normalized(), rel};
}

double point_segment_distance(const Point4& p, const Point4& a, const Point4& b) {
  Vec4 ab = b - a;
  double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

double distance_to_polyline(const Point4& p, const std::vector<Point4>& poly, bool closed) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  double d = (p - poly.front()).norm();
  for (std::size_t i = 1; i < poly.size(); ++i) d = std::min(d, point_segment_distance(p, poly[i - 1], poly[i]));
  if (closed && poly.size() > 1) d = std::min(d, point_segment_distance(p, poly.back(), poly.front()));
  return d;
}

class Tracer {
 public:
  Tracer(const PolySystem& sys, const Box& box, const VarietyOptions& opt)
      : sys_(sys), box_(box), opt_(opt), h0_(opt.step_fraction * box.diagonal()) {}

  struct Arc {
    std::vector<Point4> points;
    bool closed = false;
    bool exited = false;
  };

  double min_sigma = 1.0;

  GammaComponent trace(const Point4& start) {
    auto t0 = checked_tangent(start);
    Arc fwd = march(start, t0.tangent);
    GammaComponent c;
    if (fwd.closed) {
      c.polyline.push_back(start);
      c.polyline.insert(c.polyline.end(), fwd.points.begin(), fwd.points.end());
      c.closed = true;
      return c;
    }
    Arc bwd = march(start, -t0.tangent);
    c.polyline.assign(bwd.points.rbegin(), bwd.points.rend());
    c.polyline.push_back(start);
    c.polyline.insert(c.polyline.end(), fwd.points.begin(), fwd.points.end());
    c.exits_box = fwd.exited || bwd.exited;
    return c;
  }

  double base_step() const { return h0_; }

 private:
  const PolySystem& sys_;
  const Box& box_;
  const VarietyOptions& opt_;
  double h0_;

  TangentInfo checked_tangent(const Point4& x) {
    auto t = kernel_tangent(sys_, x);
    min_sigma = std::min(min_sigma, t.sigma_rel);
    if (!(t.sigma_rel >= opt_.tol.rank_tol)) {
      std::ostringstream os;
      os << "Gamma Jacobian drops rank (sigma3/sigma1 = " << t.sigma_rel << ") at (" << x.transpose() << ")";
      throw RankDeficiency(os.str(), x);
    }
    return t;
  }

  // Newton on [F(z); t.(z - pred)] = 0 starting at pred.
  std::optional<Point4> correct(const Point4& pred, const Vec4& t) const {
    Point4 z = pred;
    for (int it = 0; it < 12; ++it) {
      DynVec F = sys_.value(z);
      DynMat J = sys_.jacobian(z);
      DynMat A(4, 4);
      A.topRows(3) = J;
      A.row(3) = t.transpose();
      Eigen::Vector4d r;
      r.head<3>() = F;
      r[3] = t.dot(z - pred);
      Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
      if (!lu.isInvertible()) return std::nullopt;
      Eigen::Vector4d dz = lu.solve(r);
      z -= dz;
      if (!z.allFinite()) return std::nullopt;
      if (dz.norm() <= 1e-14 * (1.0 + z.norm()) ||
          (sys_.residual(z) <= 0.01 * opt_.tol.refine_tol && dz.norm() <= 1e-12 * (1.0 + z.norm()))) {
        break;
      }
    }
    if (sys_.residual(z) <= opt_.tol.refine_tol) return z;
    return std::nullopt;
  }

  Arc march(const Point4& start, Vec4 dir) {
    Arc arc;
    Point4 y = start;
    Vec4 t = dir;
    double h = h0_;
    double travelled = 0.0;
    int streak = 0;
    while (arc.points.size() < static_cast<std::size_t>(opt_.max_trace_points)) {
      Point4 pred = y + h * t;
      auto z = correct(pred, t);
      bool ok = false;
      TangentInfo tn{};
      if (z && (*z - y).norm() <= 2.0 * h) {
        tn = kernel_tangent(sys_, *z);
        if (tn.tangent.dot(t) < 0) tn.tangent = -tn.tangent;
        ok = tn.tangent.dot(t) >= std::cos(0.5);
      }
      if (!ok) {
        h *= 0.5;
        streak = 0;
        if (h < opt_.step_floor) break;
        continue;
      }
      if (!box_.contains(*z)) {
        arc.points.push_back(boundary_point(y, t, h));
        arc.exited = true;
        break;
      }
      // Loop closure: the new segment passes by the starting point.
      if (travelled > 3.0 * h0_ && point_segment_distance(start, y, *z) <= 0.5 * h0_) {
        arc.closed = true;
        break;
      }
      checked_tangent(*z);
      travelled += (*z - y).norm();
      y = *z;
      t = tn.tangent;
      arc.points.push_back(y);
      if (++streak >= 3 && h < h0_) {
        h = std::min(2.0 * h, h0_);
        streak = 0;
      }
    }
    return arc;
  }

  // Bisects the predictor length so the corrected point lands on the box boundary.
  Point4 boundary_point(const Point4& y, const Vec4& t, double h) const {
    double lo = 0.0, hi = h;
    Point4 best = y;
    while (hi - lo > 1e-12 * std::max(1.0, h0_)) {
      double mid = 0.5 * (lo + hi);
      auto z = correct(y + mid * t, t);
      if (z && box_.contains(*z)) {
        lo = mid;
        best = *z;
      } else {
        hi = mid;
      }
    }
    return best;
  }
};

}  // namespace

std::vector<GammaComponent> trace_gamma(const Poly4& f, const Box& box, const VarietyOptions& opt,
                                        TraceDiagnostics* diag) {
  const PolySystem sys = gamma_system(f);
  const long long bound = component_bound(f.degree());
  const auto seeds = lattice(box, opt.grid_res);
  NewtonOptions nopt;
  nopt.tol = opt.tol.refine_tol;

  struct Hit {
    bool ok = false;
    Point4 x = Point4::Zero();
  };
  auto hits = map_indices<Hit>(seeds.size(), opt.exec, [&](std::size_t i) {
    auto r = gauss_newton(sys, seeds[i], nopt);
    return Hit{r.converged && box.contains(r.x), r.x};
  });
  std::vector<Point4> found;
  for (const auto& h : hits)
    if (h.ok) found.push_back(h.x);
  std::vector<Point4> candidates;
  for (std::size_t k : dedupe(found, opt.tol.dedupe_radius())) candidates.push_back(found[k]);

  Tracer tracer(sys, box, opt);
  std::vector<GammaComponent> comps;
  const double cover = 0.5 * tracer.base_step();
  for (const auto& p : candidates) {
    bool covered = false;
    for (const auto& c : comps)
      if (distance_to_polyline(p, c.polyline, c.closed) <= cover) {
        covered = true;
        break;
      }
    if (covered) continue;
    comps.push_back(tracer.trace(p));
    if (static_cast<long long>(comps.size()) > bound) {
      std::ostringstream os;
      os << "traced " << comps.size() << " components of Gamma_f, more than c(" << f.degree() << ") = " << bound;
      throw ComponentBoundExceeded(os.str());
    }
  }

  // Merge open arcs whose free ends meet.
  const double r = opt.tol.dedupe_radius();
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t a = 0; a < comps.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < comps.size() && !merged; ++b) {
        auto& A = comps[a].polyline;
        auto& B = comps[b].polyline;
        if (comps[a].closed || comps[b].closed || A.empty() || B.empty()) continue;
        if ((A.back() - B.front()).norm() <= r) {
          A.insert(A.end(), B.begin() + 1, B.end());
        } else if ((A.back() - B.back()).norm() <= r) {
          A.insert(A.end(), B.rbegin() + 1, B.rend());
        } else if ((A.front() - B.back()).norm() <= r) {
          B.insert(B.end(), A.begin() + 1, A.end());
          A = B;
        } else if ((A.front() - B.front()).norm() <= r) {
          std::vector<Point4> joined(B.rbegin(), B.rend());
          joined.insert(joined.end(), A.begin() + 1, A.end());
          A = joined;
        } else {
          continue;
        }
        comps[a].exits_box = comps[a].exits_box || comps[b].exits_box;
        comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(b));
        merged = true;
      }
  }

  for (auto& c : comps) c = classify_component(f, std::move(c), opt.tol.fiber_tol, opt.tol);

  if (diag) {
    diag->seeds = seeds.size();
    diag->converged_seeds = found.size();
    diag->min_sigma3 = tracer.min_sigma;
  }
  return comps;
}

GammaComponent classify_component(const Poly4& f, GammaComponent comp, double fiber_tol, const Tolerances& tol) {
  const auto so = second_order(f);
  const Poly4 g = g_poly(f);
  const Poly4 x1g = apply_x(1, g), x2g = apply_x(2, g);
  const PolySystem sys({apply_x(1, f), apply_x(2, f), g});

  comp.tangency_scores.clear();
  comp.raw_scores.clear();
  comp.sigma3.clear();
  comp.f_min = std::numeric_limits<double>::infinity();
  comp.f_max = -std::numeric_limits<double>::infinity();
  std::size_t horizontal_pts = 0;
  for (const auto& x : comp.polyline) {
    double fx = f.eval(x);
    comp.f_min = std::min(comp.f_min, fx);
    comp.f_max = std::max(comp.f_max, fx);
    double a1 = -so.x21.eval(x), a2 = so.x11.eval(x);
    double raw = a1 * x1g.eval(x) + a2 * x2g.eval(x);
    comp.raw_scores.push_back(raw);
    comp.tangency_scores.push_back(raw / (1.0 + std::hypot(a1, a2)));

    auto tinfo = kernel_tangent(sys, x);
    comp.sigma3.push_back(tinfo.sigma_rel);
    // Angle between the tangent and Delta_x = span{(1,0,0,0), (0,1,x1,x3)}.
    Vec4 e1(1, 0, 0, 0), e2(0, 1, x[0], x[2]);
    Eigen::Matrix<double, 4, 2> D;
    D << e1, e2;
    Eigen::Vector2d c = (D.transpose() * D).ldlt().solve(D.transpose() * tinfo.tangent);
    Vec4 inplane = D * c;
    double angle = std::atan2((tinfo.tangent - inplane).norm(), inplane.norm());
    if (angle <= tol.angle_tol) ++horizontal_pts;
  }
  if (comp.polyline.empty()) {
    comp.f_min = comp.f_max = 0.0;
  }

  comp.horizontal = !comp.polyline.empty() &&
                    static_cast<double>(horizontal_pts) >= 0.95 * static_cast<double>(comp.polyline.size());

  if (comp.polyline.size() < 2 || comp.length() == 0.0) {
    comp.classification = ComponentClass::Undetermined;
    return comp;
  }
  double mid = 0.5 * (comp.f_min + comp.f_max);
  double max_score = 0.0;
  for (double s : comp.tangency_scores) max_score = std::max(max_score, std::abs(s));
  if (comp.f_max - comp.f_min <= fiber_tol * (1.0 + std::abs(mid)))
    comp.classification = ComponentClass::FiberContained;
  else if (max_score > tol.tangency_floor)
    comp.classification = ComponentClass::Transverse;
  else
    comp.classification = ComponentClass::Undetermined;
  return comp;
}

}  // namespace engelgrad
