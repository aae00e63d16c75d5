#include <cmath>
#include <limits>

#include "engelgrad/genericity.hpp"
#include "engelgrad/rng.hpp"

namespace engelgrad {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Unknown:
      return "unknown";
  }
  return "?";
}

bool CertificateReport::all_pass() const {
  return kd_transversal == Verdict::Pass && bd_gamma_smooth == Verdict::Pass &&
         jd_cr_finite_morse == Verdict::Pass && dd_omega_finite == Verdict::Pass &&
         md_no_fiber_horizontal == Verdict::Pass;
}

namespace {

double abs_det_hessian(const std::array<std::array<Poly4, 4>, 4>& H, const Point4& x) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = H[i][j].eval(x);
  return std::abs(m.determinant());
}

Verdict from_finiteness(Finiteness f) {
  switch (f) {
    case Finiteness::Finite:
      return Verdict::Pass;
    case Finiteness::CurveDetected:
      return Verdict::Fail;
    default:
      return Verdict::Unknown;
  }
}

bool near_any(const Point4& x, const RootSet& set, double radius) {
  for (const auto& r : set.roots)
    if ((r - x).norm() < radius) return true;
  return false;
}

}  // namespace

CertificateReport certify(const Poly4& f, const Box& box, const CertifyOptions& opt) {
  const VarietyOptions& vo = opt.variety;
  const double rank_tol = vo.tol.rank_tol;
  CertificateReport rep;
  rep.degree = f.degree();
  rep.cd_bound = component_bound(f.degree());

  try {
    VfSample s = sample_vf(f, box, vo.grid_res, vo);
    rep.vf_samples = s.points.size();
    double m = 1.0;
    for (std::size_t i = 0; i < s.points.size(); ++i)
      m = std::min(m, s.jacobian_sigma1[i] > 0.0 ? s.jacobian_sigma2[i] / s.jacobian_sigma1[i] : 0.0);
    rep.min_sigma2 = m;
    rep.kd_transversal = m >= rank_tol ? Verdict::Pass : Verdict::Fail;
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("V_f sampling: ") + e.what());
  }

  try {
    TraceDiagnostics diag;
    rep.components = trace_gamma(f, box, vo, &diag);
    rep.min_sigma3 = diag.min_sigma3;
    rep.bd_gamma_smooth = Verdict::Pass;
  } catch (const RankDeficiency& e) {
    rep.bd_gamma_smooth = Verdict::Fail;
    rep.notes.push_back(std::string("Gamma tracing: ") + e.what());
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("Gamma tracing: ") + e.what());
  }

  try {
    rep.omega = omega_set(f, box, vo);
    rep.omega_flag = rep.omega.finiteness;
    rep.omega_count = rep.omega.roots.size();
    rep.dd_omega_finite = from_finiteness(rep.omega_flag);
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("Omega: ") + e.what());
  }

  try {
    rep.critical = solve_finite_system(f, SystemId::Cr, box, vo.system_grid, vo);
    rep.cr_count = rep.critical.roots.size();
    std::array<std::array<Poly4, 4>, 4> H;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) H[i][j] = f.partial(i + 1).partial(j + 1);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.critical.roots) m = std::min(m, abs_det_hessian(H, r));
    rep.min_abs_det_hessian = m;
    if (rep.critical.finiteness == Finiteness::CurveDetected || m < rank_tol)
      rep.jd_cr_finite_morse = Verdict::Fail;
    else
      rep.jd_cr_finite_morse = Verdict::Pass;
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("critical points: ") + e.what());
  }

  for (const auto& c : rep.components) {
    if (c.classification == ComponentClass::Transverse) ++rep.lambda_in_box;
    if (c.classification == ComponentClass::FiberContained) ++rep.kappa_in_box;
  }
  if (rep.bd_gamma_smooth == Verdict::Pass) {
    rep.md_no_fiber_horizontal = Verdict::Pass;
    for (const auto& c : rep.components)
      if (c.classification == ComponentClass::FiberContained && c.horizontal)
        rep.md_no_fiber_horizontal = Verdict::Fail;
  }
  return rep;
}

double PerturbationParams::size() const {
  return std::max({std::abs(alpha), std::abs(beta), std::abs(gamma)});
}

Point4 choose_base_point(const Poly4& f, const GammaComponent& comp, const RootSet& omega, const RootSet& cr,
                         const Tolerances& tol) {
  const auto s = second_order(f);
  const double excl = tol.exclusion_radius();
  double best = -1.0;
  Point4 arg = Point4::Zero();
  for (const auto& p : comp.polyline) {
    if (near_any(p, omega, excl) || near_any(p, cr, excl)) continue;
    double v = std::abs(s.x11.eval(p) * s.x21.eval(p));
    if (v > best) {
      best = v;
      arg = p;
    }
  }
  if (best < 0.0) throw NoAdmissiblePoint("every component point lies near Omega_f or Cr(f)");
  if (best < tol.rank_tol) throw NoAdmissiblePoint("X11f * X21f vanishes along the component");
  return arg;
}

PerturbationParams perturbation_from_point(const Point4& b, double gamma) {
  if (gamma == 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be nonzero");
  PerturbationParams p;
  p.alpha = (b[0] * b[1] - b[2]) * gamma;
  p.beta = -b[0] * gamma;
  p.gamma = gamma;
  p.base_point = b;
  return p;
}

Poly4 perturb(const Poly4& f, const PerturbationParams& eps) {
  return f + Poly4::from_terms({{{0, 1, 0, 0}, eps.alpha}, {{0, 2, 0, 0}, eps.beta / 2.0}, {{0, 0, 0, 1}, eps.gamma}});
}

std::array<double, 3> verify_claim1(const Poly4& f, const PerturbationParams& eps, const Point4& b,
                                    const Tolerances&) {
  const Poly4 fe = perturb(f, eps);
  const Poly4 g = g_poly(f), ge = g_poly(fe);
  const Poly4 predicted =
      g + (Poly4::constant(eps.beta) + Poly4::variable(1).scaled(eps.gamma)) * apply_word({1, 1}, f);
  const double scale = 1.0 + ge.coeff_norm();
  if (!ge.approx_equal(predicted, 1e-12 * scale))
    throw IdentityViolation("G f_eps differs from G f + (beta + gamma x1) X11 f");
  return {std::abs(apply_x(1, fe).eval(b)), std::abs(apply_x(2, fe).eval(b)), std::abs(ge.eval(b))};
}

Claim2Result verify_claim2(const Poly4& f, const PerturbationParams& eps, const Point4& b, const Tolerances& tol) {
  const Poly4 g = g_poly(f);
  const FrameVector xi = xi_field(f, b);
  const double score = frame_directional(g, xi);
  const double dg = std::hypot(apply_x(1, g).eval(b), apply_x(2, g).eval(b));
  if (std::abs(score) > tol.claim_tol * (1.0 + xi.norm()) * (1.0 + dg))
    throw PreconditionViolation("d(Gf)(xi_f) does not vanish at the base point");
  if (std::abs(eps.beta + eps.gamma * b[0]) > tol.claim_tol)
    throw PreconditionViolation("beta + gamma b1 does not vanish");

  const Poly4 fe = perturb(f, eps);
  const auto s = second_order(f);
  const double prod = s.x11.eval(b) * s.x21.eval(b);
  Claim2Result r;
  r.lhs = frame_directional(g_poly(fe), xi_field(fe, b));
  r.rhs = -eps.gamma * prod;
  r.agrees = std::abs(r.lhs - r.rhs) <= tol.claim_tol * (1.0 + std::abs(r.rhs));
  r.nondegenerate = eps.gamma != 0.0 && std::abs(prod) >= tol.rank_tol;
  return r;
}

double budget_radius(double m1, double m2, double m3, double m4) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double r3 = m3 > 0.0 ? m1 / (4.0 * m3) : inf;
  if (m2 == 0.0) return r3;
  double r24 = m4 > 0.0 ? m1 / (4.0 * m2 * m4) : inf;
  return std::min(r24, r3);
}

namespace {

double tangency_score(const Poly4& g, const SecondOrder& s, const Point4& x) {
  // [d(Gf)](xi_f) = -X21f X1(Gf) + X11f X2(Gf), with X1, X2 evaluated directly.
  return frame_directional(g, FrameVector{{-s.x21.eval(x), s.x11.eval(x), 0.0, 0.0}, x});
}

std::vector<Vec4> sphere_directions(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec4> dirs;
  for (int i = 0; i < 4; ++i) {
    dirs.push_back(Vec4::Unit(i));
    dirs.push_back(-Vec4::Unit(i));
  }
  while (static_cast<int>(dirs.size()) < n) {
    Vec4 v(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    if (v.norm() > 1e-12) dirs.push_back(v.normalized());
  }
  return dirs;
}

}  // namespace

BudgetReport perturbation_budget(const Poly4& f, const std::vector<GammaComponent>& transverse,
                                 const RootSet& omega, const RootSet& cr, const Point4& base_point,
                                 const Box& box, const Tolerances& tol) {
  BudgetReport rep;
  if (transverse.empty()) return rep;

  const Poly4 g = g_poly(f);
  const auto s = second_order(f);
  const Poly4 x11 = s.x11;
  const double excl = tol.exclusion_radius();

  rep.m1 = std::numeric_limits<double>::infinity();
  for (const auto& comp : transverse) {
    double best = -1.0;
    Point4 arg = Point4::Zero();
    for (const auto& p : comp.polyline) {
      if (near_any(p, omega, excl) || near_any(p, cr, excl)) continue;
      double v = std::abs(tangency_score(g, s, p));
      if (v > best) {
        best = v;
        arg = p;
      }
    }
    if (best <= 0.0) throw NoWitness("transverse component has no admissible witness point");
    rep.witnesses.push_back(arg);
    rep.m1 = std::min(rep.m1, best);
  }

  const auto dirs = sphere_directions(64, 0x7a657461);
  auto ball_ok = [&](const Point4& a, double z) {
    for (const auto& d : dirs)
      if (std::abs(tangency_score(g, s, a + z * d)) < 0.75 * rep.m1) return false;
    return true;
  };

  // Largest zeta (by bisection) whose witness spheres stay in the box and
  // keep the score above 3 m1 / 4 at the sampled directions.
  double zeta = std::numeric_limits<double>::infinity();
  for (const auto& a : rep.witnesses) {
    double hi = std::max(0.0, box.inner_distance(a));
    double lo = 0.0;
    if (hi > 0.0 && ball_ok(a, hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ball_ok(a, mid)) lo = mid;
        else hi = mid;
      }
    }
    zeta = std::min(zeta, lo);
  }
  rep.zeta = zeta;

  const Poly4 dx11_1 = apply_x(1, x11), dx11_2 = apply_x(2, x11);
  for (const auto& a : rep.witnesses) {
    std::vector<Point4> probe{a};
    for (double frac : {0.5, 1.0})
      for (const auto& d : dirs) probe.push_back(a + frac * zeta * d);
    for (const auto& x : probe) {
      double m2 = std::abs(-s.x21.eval(x) * dx11_1.eval(x) + s.x11.eval(x) * dx11_2.eval(x));
      double m3 = std::abs(s.x11.eval(x)) * std::abs(s.x21.eval(x));
      rep.m2 = std::max(rep.m2, m2);
      rep.m3 = std::max(rep.m3, m3);
    }
    rep.m4 = std::max(rep.m4, (a - base_point).norm() + zeta);
  }
  rep.radius = budget_radius(rep.m1, rep.m2, rep.m3, rep.m4);
  return rep;
}

}  // namespace engelgrad
