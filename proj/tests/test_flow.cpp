#include "engelgrad/flow.hpp"
#include "engelgrad/ode.hpp"
#include "helpers.hpp"

using namespace testing;

namespace {

const Box kUnit = Box::cube(-1, 1);
const char* kQuadratic = "x1^2/2 + x2^2/2";

// Closed-form descent of the quadratic model from (1, 1, 0, 0).
Point4 quadratic_exact(double t) {
  const double e = std::exp(-t);
  return Point4(e, e, -(1 - e * e) / 2, ((1 - e) - (1 - e * e * e) / 3) / 2);
}

Trajectory quadratic_descent(FlowConfig cfg = {}) {
  return integrate(P(kQuadratic), Point4(1, 1, 0, 0), kUnit, cfg);
}

Trajectory synthetic(std::vector<Point4> pts, Termination term) {
  Trajectory tr;
  tr.termination = term;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    FlowSample s;
    s.t = static_cast<double>(i);
    s.x = pts[i];
    tr.samples.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("Dormand-Prince on a linear test equation") {
  Dopri5 ode([](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return -y; }, 0.0,
             Eigen::VectorXd::Ones(1));
  double worst_dense = 0.0;
  while (ode.t() < 5.0) {
    REQUIRE(ode.step(5.0) == Dopri5::Status::Accepted);
    const double mid = 0.5 * (ode.t_prev() + ode.t());
    worst_dense = std::max(worst_dense, std::abs(ode.dense(mid)[0] - std::exp(-mid)));
  }
  CHECK(ode.t() == 5.0);
  CHECK(std::abs(ode.y()[0] - std::exp(-5.0)) <= 1e-10);
  CHECK(worst_dense <= 1e-9);
}

TEST_CASE("quadratic model descent matches the closed form") {
  const Trajectory tr = quadratic_descent();
  CHECK(tr.termination == Termination::NearVf);
  CHECK((tr.samples.back().x - Point4(0, 0, -0.5, 1.0 / 3)).norm() <= 1e-6);
  CHECK(tr.l_g == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(tr.l_delta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tr.ldelta_applicable);
  CHECK(tr.max_horizontality == 0.0);
  double worst = 0.0;
  for (const auto& s : tr.samples)
    if (s.t <= 10.0) worst = std::max(worst, (s.x - quadratic_exact(s.t)).norm());
  CHECK(worst <= 1e-8);
  // Cumulative lengths against their closed forms.
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.lg - std::sqrt(2.0) * (1 - std::exp(-s.t))) <= 1e-7);
    CHECK(std::abs(s.ldelta - (1 - std::exp(-2 * s.t))) <= 1e-7);
  }
}

TEST_CASE("halving the tolerances barely moves the lengths") {
  FlowConfig fine;
  fine.rtol /= 2;
  fine.atol /= 2;
  const Trajectory a = quadratic_descent(), b = quadratic_descent(fine);
  CHECK(std::abs(a.l_g - b.l_g) < 1e-6);
  CHECK(std::abs(a.l_delta - b.l_delta) < 1e-6);
}

TEST_CASE("f changes at the rate |grad^h f|^2 along the flow") {
  Rng rng(12);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Poly4 f = random_poly(3, seed);
    const Point4 x = random_point(rng);
    const double a = apply_x(1, f).eval(x), b = apply_x(2, f).eval(x);
    for (double s : {1.0, -1.0}) {
      const Vec4 v = ambient_velocity(s * a, s * b, x);
      const double rate = fd_directional(f, x, v, 1e-6);
      CHECK(rate == doctest::Approx(s * (a * a + b * b)).epsilon(1e-6));
      auto [w3, w4] = one_form_residual(x, v);
      CHECK(w3 == 0.0);
      CHECK(w4 == 0.0);
    }
  }
}

TEST_CASE("trajectories are monotone, horizontal and non-revisiting") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Poly4 f = random_poly(3, seed);
    for (FlowDirection dir : {FlowDirection::Descent, FlowDirection::Ascent}) {
      FlowConfig cfg;
      cfg.direction = dir;
      const Trajectory tr = integrate(f, Point4(0.1, -0.2, 0.3, 0.05), kUnit, cfg);
      CHECK(monotonicity_violation(tr) <= 1e-10);
      CHECK(tr.max_horizontality == 0.0);
      CHECK_FALSE(revisit_detected(tr, 1e-6, 1e-3));
      const double df = tr.samples.back().f - tr.samples.front().f;
      if (dir == FlowDirection::Descent)
        CHECK(df <= 0.0);
      else
        CHECK(df >= 0.0);
      for (const auto& s : tr.samples) CHECK(kUnit.contains(s.x, 1e-9));
    }
  }
}

TEST_CASE("box exit of a linear function") {
  // Descent of f = x1 is x1 = 0.5 - t; it leaves [-1, 1]^4 at t = 1.5.
  const Trajectory tr = integrate(P("x1"), Point4(0.5, 0, 0, 0), kUnit);
  CHECK(tr.termination == Termination::BoxExit);
  CHECK(tr.samples.back().t == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(tr.samples.back().x[0] + 1) <= 1e-9);
  CHECK(tr.l_g == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_FALSE(tr.ldelta_applicable);
  auto lim = limit_analysis(tr, {}, 1e-5);
  CHECK(lim.verdict == LimitVerdict::Converged);
  CHECK(lim.location == LimitLocation::Boundary);
}

TEST_CASE("stationary and invalid starts") {
  const Trajectory tr = integrate(P(kQuadratic), Point4(0, 0, 0.3, -0.2), kUnit);
  CHECK(tr.termination == Termination::NearVf);
  CHECK(tr.l_g == 0.0);
  CHECK(tr.l_delta == 0.0);
  CHECK(tr.samples.size() == 1);
  CHECK_THROWS_AS(integrate(P(kQuadratic), Point4(2, 0, 0, 0), kUnit), StartOutsideBox);
}

TEST_CASE("parametrization by f is ordered along the flow") {
  const Trajectory tr = quadratic_descent();
  auto pf = parametrize_by_f(tr);
  REQUIRE(pf.size() == tr.samples.size());
  for (std::size_t i = 1; i < pf.size(); ++i) CHECK(pf[i].first <= pf[i - 1].first);
}

TEST_CASE("delta gradient") {
  const Poly4 f = P(kQuadratic);
  const Point4 x(0.3, -0.4, 0.1, 0.2);
  auto g = delta_gradient(f, x, 0.5);
  CHECK(g.a[0] == doctest::Approx(0.3 / 0.25));
  CHECK(g.a[1] == doctest::Approx(-0.4 / 0.25));
  CHECK(g.a[2] == 0.0);
  CHECK(g.a[3] == 0.0);
  CHECK_THROWS(delta_gradient(f, x, 0.0));
  CHECK_THROWS(delta_gradient(f, x, -1.0));
}

TEST_CASE("Lojasiewicz constants") {
  const Poly4 f = P(kQuadratic);
  VfSample s = sample_vf(f, kUnit, 6);
  auto est = estimate_loja(f, kUnit, s, 300, 1e-2);
  CHECK(est.C1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(est.C2 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(est.sample_count > 0);

  // Scaling f by 2 leaves V_f alone and doubles both constants.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Poly4 g = random_poly(3, seed);
    VfSample sg = sample_vf(g, kUnit, 5);
    if (sg.empty()) continue;
    auto e1 = estimate_loja(g, kUnit, sg, 100, 1e-2);
    auto e2 = estimate_loja(2.0 * g, kUnit, sg, 100, 1e-2);
    CHECK(e2.C1 == 2.0 * e1.C1);
    CHECK(e2.C2 == 2.0 * e1.C2);
    CHECK(e1.C1 <= e1.C2);
  }

  VfSample empty = sample_vf(P("x1 + 1"), kUnit, 4);
  CHECK_THROWS_AS(estimate_loja(P("x1 + 1"), kUnit, empty, 10, 1e-2), EmptyVariety);
}

TEST_CASE("length bound") {
  const Trajectory tr = quadratic_descent();
  LojaEstimate loja;
  loja.C1 = loja.C2 = 1.0;
  auto lb = length_bound_check(tr, loja);
  CHECK(lb.passed);
  CHECK(lb.ratio == doctest::Approx(1.0).epsilon(1e-3));
  loja.C1 = 2.0;
  CHECK_FALSE(length_bound_check(tr, loja).passed);
}

TEST_CASE("limit analysis") {
  SUBCASE("converged tail near Gamma") {
    GammaComponent c;
    c.polyline = {Point4(0, -1, 0, 0), Point4(0, 1, 0, 0)};
    auto tr = synthetic({Point4(1, 1, 0, 0), Point4(0.5, 0.5, 0, 0), Point4(0, 1e-7, 0, 0), Point4(0, 0, 0, 0)},
                        Termination::NearVf);
    auto r = limit_analysis(tr, {c}, 1e-5);
    CHECK(r.verdict == LimitVerdict::Converged);
    CHECK(r.location == LimitLocation::NearGamma);
    CHECK(r.tail_diameter == doctest::Approx(1e-7));
    auto far = limit_analysis(tr, {}, 1e-5);
    CHECK(far.location == LimitLocation::VfMinusGamma);
  }
  SUBCASE("wide tail") {
    auto tr = synthetic({Point4(0, 0, 0, 0), Point4(0.1, 0, 0, 0), Point4(0.2, 0, 0, 0), Point4(0.3, 0, 0, 0),
                         Point4(0.4, 0, 0, 0)},
                        Termination::NearVf);
    auto r = limit_analysis(tr, {}, 1e-5);
    CHECK(r.verdict == LimitVerdict::Inconclusive);
    CHECK(r.tail_diameter == doctest::Approx(0.1));
  }
  SUBCASE("max time is never converged") {
    auto tr = synthetic({Point4(0, 0, 0, 0), Point4(0, 0, 0, 0)}, Termination::MaxTime);
    CHECK(limit_analysis(tr, {}, 1e-5).verdict == LimitVerdict::Inconclusive);
  }
  SUBCASE("box exit") {
    auto tr = synthetic({Point4(0, 0, 0, 0), Point4(1, 0, 0, 0)}, Termination::BoxExit);
    auto r = limit_analysis(tr, {}, 1e-5);
    CHECK(r.verdict == LimitVerdict::Converged);
    CHECK(r.location == LimitLocation::Boundary);
    CHECK(r.point == Point4(1, 0, 0, 0));
  }
}

TEST_CASE("revisit detector") {
  auto tr = synthetic({Point4(0, 0, 0, 0), Point4(1, 0, 0, 0), Point4(0, 0, 0, 0)}, Termination::MaxTime);
  tr.samples[1].lg = 1;
  tr.samples[2].lg = 2;
  CHECK(revisit_detected(tr, 1e-6, 1e-3));
  CHECK_FALSE(revisit_detected(tr, 1e-6, 5.0));
}

TEST_CASE("batch on the quadratic model") {
  FlowBatchConfig cfg;
  cfg.loja_points = 200;
  auto b = batch_flow(P(kQuadratic), kUnit, 8, cfg);
  CHECK(b.runs.size() == 16);
  CHECK(b.converged == 16);
  CHECK(b.fraction_converged == 1.0);
  CHECK(b.max_horizontality == 0.0);
  CHECK(b.max_monotonicity_violation <= 1e-5);
  CHECK(b.revisit_firings == 0);
  CHECK(b.bound_passed == b.bound_checked);
  REQUIRE(b.loja.has_value());
  CHECK(b.loja->C1 == doctest::Approx(1.0).epsilon(1e-6));
  int ascents = 0;
  for (const auto& r : b.runs) ascents += r.direction == FlowDirection::Ascent;
  CHECK(ascents == 8);
}
