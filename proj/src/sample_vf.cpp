#include <cmath>
#include <limits>

#include "engelgrad/parallel.hpp"
#include "engelgrad/varieties.hpp"

namespace engelgrad {

PolySystem vf_system(const Poly4& f) { return PolySystem({apply_x(1, f), apply_x(2, f)}); }

PolySystem gamma_system(const Poly4& f) {
  return PolySystem({apply_x(1, f), apply_x(2, f), g_poly(f)});
}

std::vector<Point4> lattice(const Box& box, int res) {
  if (res < 2) throw std::invalid_argument("grid resolution must be at least 2");
  std::vector<Point4> pts;
  pts.reserve(static_cast<std::size_t>(res) * res * res * res);
  Point4 step = (box.upper - box.lower) / (res - 1);
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k)
        for (int l = 0; l < res; ++l)
          pts.push_back(box.lower + Point4(i * step[0], j * step[1], k * step[2], l * step[3]));
  return pts;
}

std::vector<std::size_t> dedupe(const std::vector<Point4>& pts, double radius) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dup = false;
    for (std::size_t k : keep)
      if ((pts[k] - pts[i]).norm() <= radius) {
        dup = true;
        break;
      }
    if (!dup) keep.push_back(i);
  }
  return keep;
}

VfSample sample_vf(const Poly4& f, const Box& box, int grid_res, const VarietyOptions& opt) {
  const PolySystem sys = vf_system(f);
  const auto seeds = lattice(box, grid_res);
  NewtonOptions nopt;
  nopt.tol = opt.tol.refine_tol;

  struct Hit {
    bool ok = false;
    Point4 x = Point4::Zero();
    double res = 0.0;
  };
  auto hits = map_indices<Hit>(seeds.size(), opt.exec, [&](std::size_t i) {
    auto r = gauss_newton(sys, seeds[i], nopt);
    Hit h;
    h.ok = r.converged && box.contains(r.x);
    h.x = r.x;
    h.res = r.residual;
    return h;
  });

  std::vector<Point4> pts;
  std::vector<double> res;
  for (const auto& h : hits)
    if (h.ok) {
      pts.push_back(h.x);
      res.push_back(h.res);
    }
  VfSample out;
  for (std::size_t k : dedupe(pts, opt.tol.dedupe_radius())) {
    out.points.push_back(pts[k]);
    out.residuals.push_back(res[k]);
    DynVec s = singular_values(sys.frame_jacobian(pts[k]));
    out.jacobian_sigma1.push_back(s[0]);
    out.jacobian_sigma2.push_back(s[1]);
  }
  out.mesh_width = ((box.upper - box.lower) / (grid_res - 1)).maxCoeff();
  return out;
}

VfDistance::VfDistance(const Poly4& f, const VfSample& sample, const Tolerances& tol)
    : sys_(vf_system(f)), sample_(&sample) {
  if (sample.empty()) throw EmptyVariety();
  newton_.tol = tol.refine_tol;
}

Projection VfDistance::project(const Point4& x, const Point4* hint) const {
  std::size_t nearest = 0;
  double best_sample = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample_->points.size(); ++i) {
    double d = (sample_->points[i] - x).norm();
    if (d < best_sample) {
      best_sample = d;
      nearest = i;
    }
  }
  Projection best{sample_->points[nearest], best_sample, false};
  auto consider = [&](const Point4& start) {
    auto p = project_onto(sys_, x, start, newton_);
    if (p && p->distance < best.distance) best = *p;
    else if (p && !best.converged && p->distance <= best.distance) best = *p;
  };
  consider(x);
  if (hint) consider(*hint);
  consider(sample_->points[nearest]);
  return best;
}

double distance_to_vf(const Poly4& f, const VfSample& sample, const Point4& x, const Tolerances& tol) {
  return VfDistance(f, sample, tol)(x);
}

}  // namespace engelgrad
