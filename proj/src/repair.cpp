#include <cmath>
#include <sstream>

#include "engelgrad/genericity.hpp"
#include "engelgrad/rng.hpp"

namespace engelgrad {

namespace {

bool hypotheses_hold(const CertificateReport& r) {
  return r.dd_omega_finite == Verdict::Pass && r.jd_cr_finite_morse == Verdict::Pass;
}

// Random form in the slots x1, x2, x3, x4, x2^2, x1 x2 with coefficient norm gamma0.
Poly4 fallback_form(double gamma0, std::uint64_t seed) {
  static const Exponents slots[] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0},
                                    {0, 0, 0, 1}, {0, 2, 0, 0}, {1, 1, 0, 0}};
  Rng rng(derive_seed(seed, 0x66616c6c));
  std::vector<Monomial> terms;
  double norm2 = 0.0;
  for (const auto& e : slots) {
    double c = rng.uniform(-1.0, 1.0);
    terms.push_back({e, c});
    norm2 += c * c;
  }
  const double k = norm2 > 0.0 ? gamma0 / std::sqrt(norm2) : 0.0;
  for (auto& t : terms) t.coef *= k;
  return Poly4::from_terms(std::move(terms));
}

RepairStep step_of(const char* kind, const CertificateReport& before, const CertificateReport& after) {
  RepairStep s;
  s.kind = kind;
  s.lambda_before = before.lambda_in_box;
  s.kappa_before = before.kappa_in_box;
  s.lambda_after = after.lambda_in_box;
  s.kappa_after = after.kappa_in_box;
  return s;
}

std::string hypothesis_detail(const CertificateReport& r) {
  std::ostringstream os;
  os << "omega finiteness " << to_string(r.dd_omega_finite) << ", critical points "
     << to_string(r.jd_cr_finite_morse);
  return os.str();
}

}  // namespace

RepairResult repair_loop(const Poly4& f, const Box& box, double gamma0, const RepairOptions& opt) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  const Tolerances& tol = opt.certify.variety.tol;
  RepairResult out;
  out.repaired = f;
  CertificateReport rep = certify(f, box, opt.certify);

  auto finish = [&](const char* failure) {
    out.failure = failure;
    out.success = out.failure.empty() && rep.kappa_in_box == 0;
    out.distance = (out.repaired - f).coeff_norm();
    out.final_report = rep;
    return out;
  };

  if (rep.kappa_in_box == 0) return finish("");

  if (!hypotheses_hold(rep)) {
    RepairStep hf = step_of("hypothesis_failure", rep, rep);
    hf.detail = hypothesis_detail(rep);
    out.log.push_back(hf);

    out.repaired = f + fallback_form(gamma0, opt.seed);
    CertificateReport after = certify(out.repaired, box, opt.certify);
    RepairStep fb = step_of("fallback", rep, after);
    fb.detail = "random form in x1, x2, x3, x4, x2^2, x1*x2 with coefficient norm " + std::to_string(gamma0);
    out.log.push_back(fb);
    rep = after;
    if (rep.kappa_in_box == 0) return finish("");
    if (!hypotheses_hold(rep)) {
      RepairStep again = step_of("hypothesis_failure", rep, rep);
      again.detail = hypothesis_detail(rep) + " after fallback";
      out.log.push_back(again);
      return finish("hypothesis_failure");
    }
  }

  const long long max_iter = rep.cd_bound;
  while (rep.kappa_in_box > 0 && out.iterations < max_iter) {
    std::vector<GammaComponent> transverse;
    std::vector<const GammaComponent*> fibers;
    for (const auto& c : rep.components) {
      if (c.classification == ComponentClass::Transverse) transverse.push_back(c);
      if (c.classification == ComponentClass::FiberContained) fibers.push_back(&c);
    }

    bool accepted = false;
    std::string last_detail;
    for (const GammaComponent* comp : fibers) {
      Point4 b;
      try {
        b = choose_base_point(out.repaired, *comp, rep.omega, rep.critical, tol);
      } catch (const NoAdmissiblePoint& e) {
        last_detail = e.what();
        continue;
      }

      double budget = std::numeric_limits<double>::infinity();
      try {
        budget = perturbation_budget(out.repaired, transverse, rep.omega, rep.critical, b, box, tol).radius;
      } catch (const NoWitness& e) {
        last_detail = e.what();
      }
      // |eps| = |gamma| * max(1, |b1 b2 - b3|, |b1|); keep |eps| within the budget.
      const double k = std::max({1.0, std::abs(b[0] * b[1] - b[2]), std::abs(b[0])});
      double gamma = std::min(gamma0, 0.5 * budget) / k;

      for (int h = 0; h <= opt.max_halvings; ++h, gamma *= 0.5) {
        RepairStep st;
        st.eps = perturbation_from_point(b, gamma);
        st.budget = budget;
        st.claim1 = verify_claim1(out.repaired, st.eps, b, tol);
        try {
          st.claim2 = verify_claim2(out.repaired, st.eps, b, tol);
        } catch (const PreconditionViolation& e) {
          st.detail = e.what();
        }
        Poly4 cand = perturb(out.repaired, st.eps);
        CertificateReport after = certify(cand, box, opt.certify);
        st.lambda_before = rep.lambda_in_box;
        st.kappa_before = rep.kappa_in_box;
        st.lambda_after = after.lambda_in_box;
        st.kappa_after = after.kappa_in_box;
        if (after.kappa_in_box < rep.kappa_in_box && after.lambda_in_box > rep.lambda_in_box) {
          st.kind = "perturbation";
          out.log.push_back(st);
          out.repaired = cand;
          rep = after;
          accepted = true;
          break;
        }
        st.kind = "halving";
        out.log.push_back(st);
      }
      if (accepted) break;
      last_detail = "no perturbation size repaired the component";
    }
    if (!accepted) {
      RepairStep st = step_of("stalled", rep, rep);
      st.detail = last_detail;
      out.log.push_back(st);
      return finish("stalled");
    }
    ++out.iterations;
  }
  return finish("");
}

}  // namespace engelgrad
