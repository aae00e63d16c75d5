#include "engelgrad/genericity.hpp"
#include "helpers.hpp"

using namespace testing;

namespace {

const Box kTwo = Box::cube(-2, 2);

PerturbationParams random_eps(Rng& rng) {
  PerturbationParams e;
  e.alpha = rng.uniform(-1, 1);
  e.beta = rng.uniform(-1, 1);
  e.gamma = rng.uniform(-1, 1);
  return e;
}

Poly4 affine_x1(double a, double b) { return Poly4::constant(a) + b * Poly4::variable(1); }

// Score [d(Gf)](xi_f) at x from the symbolic frame derivatives.
double tangency_score(const Poly4& f, const Point4& x) {
  const Poly4 g = g_poly(f);
  return frame_directional(g, xi_field(f, x));
}

GammaComponent polyline_component(std::vector<Point4> pts) {
  GammaComponent c;
  c.polyline = std::move(pts);
  c.classification = ComponentClass::FiberContained;
  return c;
}

}  // namespace

TEST_CASE("certify examples") {
  SUBCASE("affine: vacuous checks") {
    auto r = certify(P("3*x1 + x2 + 5"), Box::cube(-1, 1));
    CHECK(r.kd_transversal == Verdict::Pass);
    CHECK(r.md_no_fiber_horizontal == Verdict::Pass);
    CHECK(r.vf_samples == 0);
    CHECK(r.all_pass());
  }
  SUBCASE("degenerate fixture") {
    auto r = certify(P("x1^2/2 + x2*x4"), kTwo);
    CHECK(r.dd_omega_finite == Verdict::Fail);
    CHECK(r.md_no_fiber_horizontal == Verdict::Fail);
    CHECK(r.omega_flag == Finiteness::CurveDetected);
    CHECK(r.kappa_in_box == 1);
    CHECK_FALSE(r.all_pass());
  }
  SUBCASE("transverse fixture") {
    auto r = certify(P("x1^2/2 + x1*x2 + x2*x4"), kTwo);
    CHECK(r.dd_omega_finite == Verdict::Pass);
    CHECK(r.lambda_in_box == 1);
    CHECK(r.kappa_in_box == 0);
  }
}

TEST_CASE("lambda + kappa never exceeds the component count or c(d)") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Poly4 f = random_poly(2, seed);
    auto r = certify(f, kTwo);
    CHECK(r.lambda_in_box + r.kappa_in_box <= static_cast<int>(r.components.size()));
    CHECK(static_cast<long long>(r.components.size()) <= r.cd_bound);
    CHECK(r.cd_bound == component_bound(2));
  }
}

TEST_CASE("choose_base_point") {
  const RootSet none;
  SUBCASE("interior argmax") {
    const Poly4 f = P("x1^2*x2");  // X11f X21f = 4 x1 x2
    std::vector<Point4> pts;
    for (int i = 0; i <= 200; ++i) pts.emplace_back(0.01 * i, 2 - 0.01 * i, 0, 0);
    auto comp = polyline_component(pts);
    Point4 b = choose_base_point(f, comp, none, none);
    CHECK((b - Point4(1, 1, 0, 0)).norm() <= 1e-12);

    RootSet blocked;
    blocked.roots = {Point4(1, 1, 0, 0)};
    Point4 b2 = choose_base_point(f, comp, blocked, none);
    CHECK((b2 - Point4(1, 1, 0, 0)).norm() > Tolerances{}.exclusion_radius());
    CHECK((b2 - Point4(1, 1, 0, 0)).norm() <= 0.015);
  }
  SUBCASE("vanishing product along the component") {
    const Poly4 f = P("x1^2/2 + x2*x4");
    std::vector<Point4> pts;
    for (int i = -20; i <= 20; ++i) pts.emplace_back(0, 0.1 * i, 0, 0);
    CHECK_THROWS_AS(choose_base_point(f, polyline_component(pts), none, none), NoAdmissiblePoint);
  }
  SUBCASE("every point excluded") {
    RootSet all;
    all.roots = {Point4(1, 1, 0, 0)};
    CHECK_THROWS_AS(choose_base_point(P("x1^2*x2"), polyline_component({Point4(1, 1, 0, 0)}), all, none),
                    NoAdmissiblePoint);
  }
}

TEST_CASE("perturbation_from_point") {
  auto e = perturbation_from_point(Point4(1, 2, 3, 4), 0.1);
  CHECK(e.alpha == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(e.beta == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(e.gamma == 0.1);

  auto o = perturbation_from_point(Point4::Zero(), 1.0);
  CHECK(o.alpha == 0.0);
  CHECK(o.beta == 0.0);
  CHECK(o.gamma == 1.0);

  auto h = perturbation_from_point(Point4(2, 1, 0, 0), 0.5);
  CHECK(h.alpha == 1.0);
  CHECK(h.beta == -1.0);

  CHECK_THROWS(perturbation_from_point(Point4(1, 2, 3, 4), 0.0));

  // The linear system the formulas solve, exactly for dyadic data.
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    Point4 b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<double>(static_cast<int>(rng.next_u64() % 65) - 32) / 8.0;
    double g = static_cast<double>(static_cast<int>(rng.next_u64() % 31) + 1) / 16.0;
    auto p = perturbation_from_point(b, g);
    CHECK(p.alpha + b[1] * p.beta + b[2] * p.gamma == 0.0);
    CHECK(p.beta + b[0] * p.gamma == 0.0);
  }
  // Size is linear in gamma.
  auto big = perturbation_from_point(Point4(1, 2, 3, 4), 0.2);
  CHECK(big.size() == doctest::Approx(2 * e.size()));
}

TEST_CASE("perturb") {
  PerturbationParams e;
  e.alpha = 1;
  e.beta = 2;
  e.gamma = 3;
  CHECK(perturb(Poly4(), e) == P("x2 + x2^2 + 3*x4"));
  const Poly4 f = random_poly(3, 8);
  CHECK(perturb(f, PerturbationParams{}) == f);
  CHECK(perturb(P("x1"), e).degree() == 2);
}

TEST_CASE("perturbation identities on random data") {
  Rng rng(77);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Poly4 f = random_poly(static_cast<int>(2 + seed % 3), seed);
    const PerturbationParams e = random_eps(rng);
    const Poly4 fe = perturb(f, e);
    const Poly4 x1 = Poly4::variable(1), x2 = Poly4::variable(2), x3 = Poly4::variable(3);

    CHECK(apply_x(1, fe).approx_equal(apply_x(1, f)));
    CHECK(apply_x(3, fe).approx_equal(apply_x(3, f)));
    // The gamma x4 term shifts X4 by a constant.
    CHECK(apply_x(4, fe).approx_equal(apply_x(4, f) + Poly4::constant(e.gamma)));
    CHECK(apply_x(2, fe).approx_equal(apply_x(2, f) + Poly4::constant(e.alpha) + e.beta * x2 + e.gamma * x3));

    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 4; ++j) {
        Poly4 shift;
        if (i == 2 && j == 2) shift = affine_x1(e.beta, e.gamma);
        if (i == 3 && j == 2) shift = Poly4::constant(e.gamma);
        CHECK(apply_word({i, j}, fe).approx_equal(apply_word({i, j}, f) + shift));
      }

    const Poly4 g = g_poly(f);
    CHECK(g_poly(fe).approx_equal(g + affine_x1(e.beta, e.gamma) * apply_word({1, 1}, f), 1e-12));
    (void)x1;

    const auto so = second_order(f), soe = second_order(fe);
    CHECK(soe.x21.approx_equal(so.x21));
    CHECK(soe.x11.approx_equal(so.x11));
  }
}

TEST_CASE("claim 1 at points of Gamma") {
  const Poly4 f = P("x1^2/2 + x1*x2 + x2*x4");
  for (double t : {-1.5, -0.3, 0.0, 0.7, 1.2}) {
    const Point4 b(t, -t, (1 + t * t) / 2, t * (t * t - 1) / 2);
    for (double g : {0.1, -0.02}) {
      auto r = verify_claim1(f, perturbation_from_point(b, g), b);
      for (double v : r) CHECK(v <= Tolerances{}.claim_tol);
    }
  }
  const Point4 b(0.3, -0.3, 0.545, 0.3 * (0.09 - 1) / 2);
  auto r0 = verify_claim1(f, PerturbationParams{}, b);
  const PolySystem sys = gamma_system(f);
  const auto v = sys.value(b);
  for (int i = 0; i < 3; ++i) CHECK(r0[i] == doctest::Approx(std::abs(v[i])).epsilon(1e-15));
}

TEST_CASE("claim 2 on the transverse fixture") {
  const Poly4 f = P("x1^2/2 + x1*x2 + x2*x4");
  const Point4 b(0, 0, 0.5, 0);
  auto e = perturbation_from_point(b, 0.01);
  CHECK(e.alpha == doctest::Approx(-0.005));
  CHECK(e.beta == 0.0);
  auto c = verify_claim2(f, e, b);
  CHECK(c.rhs == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK(std::abs(c.lhs + 0.01) <= 1e-7);
  CHECK(c.agrees);
  CHECK(c.nondegenerate);

  // Linear in gamma.
  auto small = verify_claim2(f, perturbation_from_point(b, 1e-4), b);
  CHECK(small.rhs == doctest::Approx(-1e-4).epsilon(1e-12));

  // Not a tangency point.
  const Point4 off(1, -1, 1, 0);
  CHECK_THROWS_AS(verify_claim2(f, perturbation_from_point(off, 0.01), off), PreconditionViolation);
  // beta + gamma b1 != 0
  PerturbationParams bad = e;
  bad.beta = 0.3;
  CHECK_THROWS_AS(verify_claim2(f, bad, b), PreconditionViolation);
}

TEST_CASE("claim 2 across randomized admissible data") {
  // Terms vanishing to fourth order at b leave every quantity in the claim
  // unchanged at b, so b stays a tangency point of Gamma.
  const Point4 b(0, 0, 0.5, 0);
  const Poly4 base = P("x1^2/2 + x1*x2 + x2*x4");
  std::array<Poly4, 4> lin;
  for (int i = 0; i < 4; ++i) lin[i] = Poly4::variable(i + 1) - Poly4::constant(b[i]);
  Rng rng(31);
  for (int k = 0; k < 40; ++k) {
    Poly4 f = base;
    for (int m = 0; m < 3; ++m) {
      Poly4 q = Poly4::constant(rng.uniform(-1, 1));
      for (int r = 0; r < 4; ++r) q = q * lin[rng.next_u64() % 4];
      f = f + q;
    }
    REQUIRE(std::abs(tangency_score(f, b)) <= 1e-12);
    const double g = rng.uniform(-0.1, 0.1);
    auto c = verify_claim2(f, perturbation_from_point(b, g), b);
    CHECK(std::abs(c.lhs - c.rhs) <= Tolerances{}.claim_tol);
    CHECK(c.rhs == doctest::Approx(-g).epsilon(1e-12));
  }
}

TEST_CASE("claim 2 flags a vanishing product") {
  // On f = x1^2/2 + x2 x4 the x2-axis has X21 f = 0.
  const Poly4 f = P("x1^2/2 + x2*x4");
  const Point4 b(0, 0.5, 0, 0);
  auto c = verify_claim2(f, perturbation_from_point(b, 0.01), b);
  CHECK(c.rhs == 0.0);
  CHECK_FALSE(c.nondegenerate);
}

TEST_CASE("budget radius rule") {
  CHECK(budget_radius(4, 0, 2, 7) == 0.5);
  CHECK(budget_radius(4, 1, 2, 8) == 0.125);
  CHECK(budget_radius(4, 1, 2, 0.1) == 0.5);
  auto r = perturbation_budget(P("x1^2/2 + x2*x4"), {}, RootSet{}, RootSet{}, Point4::Zero(), kTwo);
  CHECK(std::isinf(r.radius));
}

TEST_CASE("budget on the transverse fixture") {
  const Poly4 f = P("x1^2/2 + x1*x2 + x2*x4");
  auto comps = trace_gamma(f, kTwo);
  REQUIRE(comps.size() == 1);
  auto r = perturbation_budget(f, comps, RootSet{}, RootSet{}, Point4(0, 0.5, 0, 0), kTwo);
  CHECK(r.radius > 0);
  CHECK(std::isfinite(r.radius));
  CHECK(r.witnesses.size() == 1);
  CHECK(r.m1 > 0);
  CHECK(r.radius == budget_radius(r.m1, r.m2, r.m3, r.m4));
}

TEST_CASE("repair leaves kappa = 0 inputs untouched") {
  const Poly4 f = P("x1^2/2 + x1*x2 + x2*x4");
  auto r = repair_loop(f, kTwo, 0.1);
  CHECK(r.success);
  CHECK(r.iterations == 0);
  CHECK(r.repaired == f);
  CHECK(r.distance == 0.0);
}

TEST_CASE("repair removes a fiber-contained component") {
  const Poly4 f = P("x1^2 - 2*x1*x2 + x2^2*x3/2 - 2*x2*x4 + x3^2/3 + 2*x3");
  auto before = certify(f, kTwo);
  REQUIRE(before.kappa_in_box == 1);
  auto r = repair_loop(f, kTwo, 0.1);
  CHECK(r.success);
  CHECK(r.final_report.kappa_in_box == 0);
  CHECK(r.iterations >= 1);
  CHECK(r.iterations <= component_bound(f.degree()));
  CHECK(r.distance > 0);
  CHECK(r.distance <= 0.1 * std::sqrt(3.0) * 3);
  for (const auto& s : r.log)
    if (s.kind == "perturbation") {
      CHECK(s.kappa_after < s.kappa_before);
      CHECK(s.lambda_after > s.lambda_before);
      CHECK(s.claim2.agrees);
      for (double v : s.claim1) CHECK(v <= Tolerances{}.claim_tol);
    }
}

TEST_CASE("repair falls back when the hypotheses fail") {
  auto r = repair_loop(P("x1^2/2 + x2*x4"), kTwo, 0.1);
  REQUIRE(r.log.size() >= 2);
  CHECK(r.log[0].kind == "hypothesis_failure");
  CHECK(r.log[1].kind == "fallback");
  CHECK(r.iterations <= component_bound(2));
}
