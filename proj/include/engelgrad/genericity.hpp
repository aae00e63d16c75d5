#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "engelgrad/varieties.hpp"

namespace engelgrad {

enum class Verdict { Pass, Fail, Unknown };
std::string to_string(Verdict v);

/// Per-polynomial numerical certificates. Each check reports Unknown rather
/// than aborting when the underlying computation throws.
struct CertificateReport {
  Verdict kd_transversal = Verdict::Unknown;  // V_f smooth, horizontal gradient submersive on it
  double min_sigma2 = 0.0;                    // relative, over V_f samples (1 when vacuous)
  std::size_t vf_samples = 0;

  Verdict bd_gamma_smooth = Verdict::Unknown;
  double min_sigma3 = 0.0;

  Verdict jd_cr_finite_morse = Verdict::Unknown;
  std::size_t cr_count = 0;
  double min_abs_det_hessian = 0.0;  // +inf when Cr is empty in the box

  Verdict dd_omega_finite = Verdict::Unknown;
  Finiteness omega_flag = Finiteness::Unknown;
  std::size_t omega_count = 0;

  Verdict md_no_fiber_horizontal = Verdict::Unknown;

  int lambda_in_box = 0;
  int kappa_in_box = 0;
  long long cd_bound = 0;
  int degree = 0;

  std::vector<GammaComponent> components;
  RootSet omega;
  RootSet critical;
  std::vector<std::string> notes;

  bool all_pass() const;
};

struct CertifyOptions {
  VarietyOptions variety;
};

CertificateReport certify(const Poly4& f, const Box& box, const CertifyOptions& opt = {});

/// Perturbation direction (alpha, beta, gamma) and the point b it fixes:
/// f_eps = f + alpha x2 + (beta/2) x2^2 + gamma x4.
struct PerturbationParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  Point4 base_point = Point4::Zero();
  double size() const;  // max(|alpha|, |beta|, |gamma|)
};

/// Point of a fiber-contained component maximizing |X11f * X21f|, kept away
/// from Omega_f and Cr(f) by the exclusion radius.
Point4 choose_base_point(const Poly4& f, const GammaComponent& comp, const RootSet& omega, const RootSet& cr,
                         const Tolerances& tol = {});

/// alpha = (b1 b2 - b3) gamma, beta = -b1 gamma. Rejects gamma = 0.
PerturbationParams perturbation_from_point(const Point4& b, double gamma);

Poly4 perturb(const Poly4& f, const PerturbationParams& eps);

/// (|X1 f_eps(b)|, |X2 f_eps(b)|, |G f_eps(b)|). Throws IdentityViolation if
/// G f_eps != G f + (beta + gamma x1) X11 f beyond coefficient tolerance.
std::array<double, 3> verify_claim1(const Poly4& f, const PerturbationParams& eps, const Point4& b,
                                    const Tolerances& tol = {});

struct Claim2Result {
  double lhs = 0.0;  // [d_b(G f_eps)](xi_{f_eps}(b)), computed numerically
  double rhs = 0.0;  // -gamma X11f(b) X21f(b)
  bool agrees = false;
  bool nondegenerate = false;  // rhs != 0
};

/// Throws PreconditionViolation unless [d_b Gf](xi_f(b)) = 0 and beta + gamma b1 = 0.
Claim2Result verify_claim2(const Poly4& f, const PerturbationParams& eps, const Point4& b,
                           const Tolerances& tol = {});

/// The radius rule r <= min{m1/(4 m2 m4), m1/(4 m3)}, or m1/(4 m3) when m2 = 0.
double budget_radius(double m1, double m2, double m3, double m4);

struct BudgetReport {
  double radius = std::numeric_limits<double>::infinity();
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double zeta = 0.0;
  std::vector<Point4> witnesses;
};

/// Largest perturbation size that keeps every listed transverse component
/// transverse. `base_point` enters through m4 = max |x - b| over the balls.
BudgetReport perturbation_budget(const Poly4& f, const std::vector<GammaComponent>& transverse,
                                 const RootSet& omega, const RootSet& cr, const Point4& base_point,
                                 const Box& box, const Tolerances& tol = {});

struct RepairStep {
  std::string kind;  // "perturbation", "hypothesis_failure", "fallback", "halving", "stalled"
  PerturbationParams eps;
  std::array<double, 3> claim1{};
  Claim2Result claim2;
  double budget = 0.0;
  int lambda_before = 0, kappa_before = 0;
  int lambda_after = 0, kappa_after = 0;
  std::string detail;
};

struct RepairResult {
  Poly4 repaired;
  std::vector<RepairStep> log;
  int iterations = 0;
  bool success = false;      // kappa reached 0
  std::string failure;       // "", "hypothesis_failure" or "stalled"
  double distance = 0.0;     // coeff_norm(repaired - f)
  CertificateReport final_report;
};

struct RepairOptions {
  CertifyOptions certify;
  std::uint64_t seed = 1;
  int max_halvings = 20;
};

/// Failures (hypotheses still violated after the random fallback, or no
/// admissible base point) end the loop and are reported in `failure` and the
/// log instead of being thrown, so the partial log survives.
RepairResult repair_loop(const Poly4& f, const Box& box, double gamma0, const RepairOptions& opt = {});

}  // namespace engelgrad
