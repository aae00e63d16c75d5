#include <cmath>
#include <limits>

#include "engelgrad/parallel.hpp"
#include "engelgrad/varieties.hpp"

namespace engelgrad {

std::string to_string(SystemId s) {
  switch (s) {
    case SystemId::S1:
      return "S1";
    case SystemId::S2:
      return "S2";
    case SystemId::S3:
      return "S3";
    case SystemId::Cr:
      return "Cr";
  }
  return "?";
}

std::string to_string(Finiteness f) {
  switch (f) {
    case Finiteness::Finite:
      return "Finite";
    case Finiteness::Unknown:
      return "Unknown";
    case Finiteness::CurveDetected:
      return "CurveDetected";
  }
  return "?";
}

PolySystem finite_system(const Poly4& f, SystemId which) {
  const Poly4 h1 = apply_x(1, f), h2 = apply_x(2, f);
  if (which == SystemId::Cr) return PolySystem({h1, h2, apply_x(3, f), apply_x(4, f)});
  const auto s = second_order(f);
  switch (which) {
    case SystemId::S1:
      return PolySystem({h1, h2, s.x11, s.x21});
    case SystemId::S2:
      return PolySystem({h1, h2, s.x11, s.x12});
    default:
      return PolySystem({h1, h2, s.x21, s.x22});
  }
}

bool curve_connected(const PolySystem& sys, const Point4& a, const Point4& b) {
  constexpr int kSteps = 16;
  for (int k = 1; k < kSteps; ++k) {
    Point4 p = a + (static_cast<double>(k) / kSteps) * (b - a);
    Point4 q = newton_step(sys, p);
    if (!q.allFinite() || !(sys.residual(q) <= 1e-6)) return false;
  }
  return true;
}

RootSet solve_finite_system(const Poly4& f, SystemId which, const Box& box, int grid_res,
                            const VarietyOptions& opt) {
  const PolySystem sys = finite_system(f, which);
  const auto seeds = lattice(box, grid_res);
  NewtonOptions nopt;
  nopt.tol = opt.tol.refine_tol;
  nopt.max_iter = 80;

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

  RootSet out;
  out.system = which;
  for (std::size_t k : dedupe(found, opt.tol.dedupe_radius())) out.roots.push_back(found[k]);
  if (out.roots.empty()) return out;

  // Probe each root against its nearest neighbour that is not a numerical
  // duplicate of it (slowly converging singular roots scatter slightly).
  const double min_sep = 1e-3 * box.diagonal();
  const auto& R = out.roots;
  auto connected = map_indices<char>(R.size(), opt.exec, [&](std::size_t i) -> char {
    std::size_t best = R.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < R.size(); ++j) {
      double d = (R[i] - R[j]).norm();
      if (j != i && d >= min_sep && d < bd) {
        bd = d;
        best = j;
      }
    }
    return best < R.size() && curve_connected(sys, R[i], R[best]) ? 1 : 0;
  });
  bool curve = false;
  for (char c : connected) curve = curve || c;
  if (curve) {
    out.finiteness = Finiteness::CurveDetected;
    return out;
  }
  for (const auto& r : R) {
    DynVec s = singular_values(sys.jacobian(r));
    if (!(s[0] > 0.0) || s[3] / s[0] < opt.tol.rank_tol) {
      out.finiteness = Finiteness::Unknown;
      break;
    }
  }
  return out;
}

RootSet omega_set(const Poly4& f, const Box& box, const VarietyOptions& opt) {
  RootSet out;
  out.system = SystemId::S1;
  std::vector<Point4> all;
  for (SystemId s : {SystemId::S1, SystemId::S2, SystemId::S3}) {
    auto r = solve_finite_system(f, s, box, opt.system_grid, opt);
    all.insert(all.end(), r.roots.begin(), r.roots.end());
    out.finiteness = std::max(out.finiteness, r.finiteness);
  }
  for (std::size_t k : dedupe(all, opt.tol.dedupe_radius())) out.roots.push_back(all[k]);
  return out;
}

}  // namespace engelgrad
