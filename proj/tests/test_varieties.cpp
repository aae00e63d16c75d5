#include <algorithm>

#include "engelgrad/varieties.hpp"
#include "helpers.hpp"

using namespace testing;

namespace {

const Box kUnit = Box::cube(-1, 1);
const Box kTwo = Box::cube(-2, 2);

double max_dist_to_x2_axis(const GammaComponent& c) {
  double m = 0.0;
  for (const auto& p : c.polyline) m = std::max(m, std::sqrt(p[0] * p[0] + p[2] * p[2] + p[3] * p[3]));
  return m;
}

Point4 twisted_cubic(double t) { return Point4(t, -t, (1 + t * t) / 2, t * (t * t - 1) / 2); }

}  // namespace

TEST_CASE("V_f samples") {
  VfSample s = sample_vf(P("x1^2/2 + x2^2/2"), kUnit, 6);
  REQUIRE_FALSE(s.empty());
  double lo3 = 1, hi3 = -1;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(std::abs(s.points[i][0]) <= 1e-9);
    CHECK(std::abs(s.points[i][1]) <= 1e-9);
    CHECK(s.residuals[i] <= 1e-9);
    lo3 = std::min(lo3, s.points[i][2]);
    hi3 = std::max(hi3, s.points[i][2]);
  }
  CHECK(hi3 - lo3 >= 1.9);

  CHECK(sample_vf(P("3*x1 + x2 + 5"), kUnit, 6).empty());

  VfSample d = sample_vf(P("x1^2/2 + x2*x4"), kTwo, 6);
  REQUIRE_FALSE(d.empty());
  for (const auto& p : d.points) {
    CHECK(std::abs(p[0]) <= 1e-9);
    CHECK(std::abs(p[3] + p[1] * p[2]) <= 1e-9);
    CHECK(kTwo.contains(p));
  }
  CHECK_THROWS(sample_vf(P("x1"), kUnit, 1));
}

TEST_CASE("distance to V_f") {
  const Poly4 q = P("x1^2/2 + x2^2/2");
  VfSample s = sample_vf(q, kUnit, 5);
  CHECK(distance_to_vf(q, s, Point4(3, 4, 7, -2)) == doctest::Approx(5.0).epsilon(1e-12));
  for (std::size_t i = 0; i < s.points.size(); i += 7) CHECK(distance_to_vf(q, s, s.points[i]) <= 1e-9);

  VfSample empty = sample_vf(P("3*x1 + x2 + 5"), kUnit, 4);
  CHECK_THROWS_AS(distance_to_vf(P("3*x1 + x2 + 5"), empty, Point4::Zero()), EmptyVariety);
}

TEST_CASE("projection never exceeds the nearest sample distance") {
  const Poly4 f = P("x1^2/2 + x1*x2 + x2*x4");
  VfSample s = sample_vf(f, kTwo, 5);
  VfDistance dist(f, s);
  Rng rng(21);
  for (int k = 0; k < 40; ++k) {
    Point4 x = random_point(rng);
    double nearest = 1e300;
    for (const auto& p : s.points) nearest = std::min(nearest, (p - x).norm());
    auto pr = dist.project(x);
    CHECK(pr.distance <= nearest + 1e-12);
    CHECK(vf_system(f).residual(pr.foot) <= 1e-9);
  }
}

TEST_CASE("projection solves the nearest-point problem on a curved V_f") {
  // V_f = {x1 = 0, x4 + x2 x3 = 0}: compare against a dense parametric search.
  const Poly4 f = P("x1^2/2 + x2*x4");
  VfSample s = sample_vf(f, kTwo, 6);
  VfDistance dist(f, s);
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    Point4 x = random_point(rng, -1, 1);
    double brute = 1e300;
    for (int i = -200; i <= 200; ++i)
      for (int j = -200; j <= 200; ++j) {
        double u = 0.01 * i, v = 0.01 * j;
        brute = std::min(brute, (x - Point4(0, u, v, -u * v)).norm());
      }
    CHECK(dist(x) <= brute + 1e-12);
    CHECK(dist(x) >= brute - 2e-2);
  }
}

TEST_CASE("component bound") {
  CHECK(component_bound(1) == 0);
  CHECK(component_bound(2) == 54);
  CHECK(component_bound(3) == 1372);
}

TEST_CASE("Gamma of the quadratic model is empty") {
  CHECK(trace_gamma(P("x1^2/2 + x2^2/2"), kUnit).empty());
}

TEST_CASE("Gamma of the degenerate fixture is the x2-axis") {
  const Poly4 f = P("x1^2/2 + x2*x4");
  auto comps = trace_gamma(f, kTwo);
  REQUIRE(comps.size() == 1);
  const auto& c = comps[0];
  CHECK(max_dist_to_x2_axis(c) <= 1e-6);
  double lo = 1e9, hi = -1e9;
  for (const auto& p : c.polyline) {
    lo = std::min(lo, p[1]);
    hi = std::max(hi, p[1]);
  }
  CHECK(lo <= -2 + 1e-6);
  CHECK(hi >= 2 - 1e-6);
  CHECK(c.classification == ComponentClass::FiberContained);
  CHECK(c.horizontal);
  CHECK(c.exits_box);

  // xi_f = X2 is tangent to the component.
  for (std::size_t i = 1; i < c.polyline.size(); ++i) {
    Vec4 t = (c.polyline[i] - c.polyline[i - 1]).normalized();
    Vec4 xi = xi_field(f, c.polyline[i]).ambient().normalized();
    CHECK(std::abs(t.dot(xi)) >= std::cos(1e-3));
  }
}

TEST_CASE("Gamma of the transverse fixture is a twisted cubic") {
  const Poly4 f = P("x1^2/2 + x1*x2 + x2*x4");
  const PolySystem sys = gamma_system(f);
  auto comps = trace_gamma(f, kTwo);
  REQUIRE(comps.size() == 1);
  const auto& c = comps[0];
  double lo = 1e9, hi = -1e9;
  for (const auto& p : c.polyline) {
    CHECK((p - twisted_cubic(p[0])).norm() <= 1e-6);
    CHECK(sys.residual(p) <= 1e-9);
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  CHECK(lo <= -std::sqrt(3.0) + 1e-6);
  CHECK(hi >= std::sqrt(3.0) - 1e-6);
  CHECK(c.classification == ComponentClass::Transverse);
  CHECK_FALSE(c.horizontal);
  // f = -t^4/2 along the curve
  CHECK(c.f_min == doctest::Approx(-4.5).epsilon(1e-6));
  CHECK(std::abs(c.f_max) <= 1e-6);
}

TEST_CASE("consecutive traced points respect the step bound") {
  VarietyOptions opt;
  for (const char* text : {"x1^2/2 + x2*x4", "x1^2/2 + x1*x2 + x2*x4"})
    for (const auto& c : trace_gamma(P(text), kTwo, opt))
      for (std::size_t i = 1; i < c.polyline.size(); ++i)
        CHECK((c.polyline[i] - c.polyline[i - 1]).norm() <= 2 * opt.step_fraction * kTwo.diagonal() + 1e-12);
}

TEST_CASE("classification of degenerate components") {
  GammaComponent point;
  point.polyline = {Point4(0, 0, 0.5, 0)};
  CHECK(classify_component(P("x1^2/2 + x1*x2 + x2*x4"), point, 1e-7).classification ==
        ComponentClass::Undetermined);
  GammaComponent none;
  CHECK(classify_component(P("x1"), none, 1e-7).classification == ComponentClass::Undetermined);
}

TEST_CASE("rank drop along Gamma is reported") {
  // X1 f = 0 and G f = 0 identically, so Gamma = {x2 = 0} is three-dimensional.
  CHECK_THROWS_AS(trace_gamma(P("x2^2/2"), kUnit), RankDeficiency);
}

TEST_CASE("finite systems") {
  const Box b = kTwo;
  auto s1 = solve_finite_system(P("x1^2/2 + x1*x2 + x2*x4"), SystemId::S1, b, 5);
  CHECK(s1.roots.empty());
  CHECK(s1.finiteness == Finiteness::Finite);

  auto cr = solve_finite_system(P("x1^2/2 + x2^2/2 + x3^2/2 + x4^2/2"), SystemId::Cr, b, 5);
  REQUIRE(cr.roots.size() == 1);
  CHECK(cr.roots[0].norm() <= 1e-9);
  CHECK(cr.finiteness == Finiteness::Finite);

  auto s3 = solve_finite_system(P("x1^2/2 + x2*x4"), SystemId::S3, b, 5);
  CHECK(s3.finiteness == Finiteness::CurveDetected);
}

TEST_CASE("Omega sets") {
  auto t = omega_set(P("x1^2/2 + x1*x2 + x2*x4"), kTwo);
  CHECK(t.roots.empty());
  CHECK(t.finiteness == Finiteness::Finite);
  CHECK(omega_set(P("x1^2/2 + x2*x4"), kTwo).finiteness == Finiteness::CurveDetected);
  auto q = omega_set(P("x1^2/2 + x2^2/2"), kUnit);
  CHECK(q.roots.empty());
  CHECK(q.finiteness == Finiteness::Finite);
}

TEST_CASE("roots satisfy their systems and are separated") {
  const Tolerances tol;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Poly4 f = random_poly(3, seed);
    for (SystemId id : {SystemId::S1, SystemId::S2, SystemId::S3, SystemId::Cr}) {
      auto rs = solve_finite_system(f, id, kUnit, 4);
      const PolySystem sys = finite_system(f, id);
      for (std::size_t i = 0; i < rs.roots.size(); ++i) {
        CHECK(sys.residual(rs.roots[i]) <= tol.refine_tol);
        for (std::size_t j = 0; j < i; ++j) CHECK((rs.roots[i] - rs.roots[j]).norm() > tol.dedupe_radius());
      }
    }
  }
}

TEST_CASE("traced points lie on Gamma with full rank for random cubics") {
  const Tolerances tol;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Poly4 f = random_poly(3, seed);
    TraceDiagnostics diag;
    auto comps = trace_gamma(f, kUnit, {}, &diag);
    const PolySystem sys = gamma_system(f);
    CHECK(static_cast<long long>(comps.size()) <= component_bound(3));
    CHECK(diag.min_sigma3 >= tol.rank_tol);
    for (const auto& c : comps)
      for (const auto& p : c.polyline) CHECK(sys.residual(p) <= tol.refine_tol);
  }
}

TEST_CASE("V_f meets a fiber only in curves") {
  // Points of V_f with f = t, gathered around a base point, spread along a
  // single direction: the local PCA spectrum has one dominant value.
  const Box box = kUnit;
  const Tolerances tol;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Poly4 f = random_poly(3, seed);
    VfSample s = sample_vf(f, box, 5);
    Rng rng(derive_seed(seed, 0x70636121));
    for (std::size_t i = 0; i < s.points.size(); i += std::max<std::size_t>(1, s.points.size() / 6)) {
      const Point4 p = s.points[i];
      const PolySystem sys({apply_x(1, f), apply_x(2, f), f - Poly4::constant(f.eval(p))});
      const DynVec sv = singular_values(sys.frame_jacobian(p));
      CHECK(sv[2] / sv[0] >= tol.rank_tol);

      const double r = 1e-3;
      std::vector<Point4> near;
      for (int k = 0; k < 40; ++k) {
        Point4 q = p + r * random_point(rng, -1, 1);
        auto nr = gauss_newton(sys, q);
        if (nr.converged && (nr.x - p).norm() <= 3 * r) near.push_back(nr.x);
      }
      if (near.size() < 8) continue;
      Eigen::MatrixXd M(near.size(), 4);
      Point4 mean = Point4::Zero();
      for (const auto& q : near) mean += q;
      mean /= static_cast<double>(near.size());
      for (std::size_t k = 0; k < near.size(); ++k) M.row(k) = (near[k] - mean).transpose();
      const DynVec pc = singular_values(M);
      CHECK(pc[1] / pc[0] <= 0.05);
      ++checked;
    }
  }
  CHECK(checked >= 8);
}
