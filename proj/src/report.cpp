#include "engelgrad/report.hpp"

#include <charconv>
#include <cmath>

namespace engelgrad {

namespace {

// JSON has no NaN or infinity; those become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const Point4& x) { return Json::array({num(x[0]), num(x[1]), num(x[2]), num(x[3])}); }

Json to_json(const Box& box) {
  Json a = Json::array();
  for (int i = 0; i < 4; ++i) a.push_back(Json::array({box.lower[i], box.upper[i]}));
  return a;
}

Json to_json(const GammaComponent& c) {
  double max_score = 0.0;
  for (double s : c.tangency_scores) max_score = std::max(max_score, std::abs(s));
  Json pts = Json::array();
  for (const auto& p : c.polyline) pts.push_back(to_json(p));
  return Json{{"classification", to_string(c.classification)},
              {"horizontal", c.horizontal},
              {"closed", c.closed},
              {"exits_box", c.exits_box},
              {"points", c.polyline.size()},
              {"length", num(c.length())},
              {"f_min", num(c.f_min)},
              {"f_max", num(c.f_max)},
              {"max_tangency_score", num(max_score)},
              {"polyline", pts}};
}

Json to_json(const RootSet& r) {
  Json roots = Json::array();
  for (const auto& p : r.roots) roots.push_back(to_json(p));
  return Json{{"system", to_string(r.system)}, {"finiteness", to_string(r.finiteness)}, {"roots", roots}};
}

Json to_json(const CertificateReport& r) {
  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  return Json{
      {"all_pass", r.all_pass()},
      {"kd_transversal", {{"verdict", to_string(r.kd_transversal)}, {"min_sigma2", num(r.min_sigma2)}, {"vf_samples", r.vf_samples}}},
      {"bd_gamma_smooth", {{"verdict", to_string(r.bd_gamma_smooth)}, {"min_sigma3", num(r.min_sigma3)}}},
      {"jd_cr_finite_morse",
       {{"verdict", to_string(r.jd_cr_finite_morse)},
        {"root_count", r.cr_count},
        {"min_abs_det_hessian", num(r.min_abs_det_hessian)}}},
      {"dd_omega_finite",
       {{"verdict", to_string(r.dd_omega_finite)}, {"flag", to_string(r.omega_flag)}, {"root_count", r.omega_count}}},
      {"md_no_fiber_horizontal", {{"verdict", to_string(r.md_no_fiber_horizontal)}}},
      {"lambda_in_box", r.lambda_in_box},
      {"kappa_in_box", r.kappa_in_box},
      {"component_count", r.components.size()},
      {"cd_bound", r.cd_bound},
      {"degree", r.degree},
      {"notes", notes}};
}

Json to_json(const LojaEstimate& e) {
  return Json{{"C1", num(e.C1)},
              {"C2", num(e.C2)},
              {"argmin", to_json(e.argmin)},
              {"argmax", to_json(e.argmax)},
              {"collar_radius", num(e.collar_radius)},
              {"sample_count", e.sample_count}};
}

Json to_json(const TrajectorySummary& s) {
  Json j{{"start", to_json(s.start)},
         {"direction", to_string(s.direction)},
         {"termination", to_string(s.termination)},
         {"verdict", to_string(s.limit.verdict)},
         {"limit_location", to_string(s.limit.location)},
         {"limit", to_json(s.limit.point)},
         {"tail_diameter", num(s.limit.tail_diameter)},
         {"l_g", num(s.l_g)},
         {"l_delta", num(s.l_delta)},
         {"monotonicity_violation", num(s.monotonicity_violation)},
         {"horizontality", num(s.horizontality)},
         {"revisit", s.revisit},
         {"retried", s.retried},
         {"samples", s.samples}};
  if (s.bound)
    j["length_bound"] = Json{{"l_delta", num(s.bound->l_delta)},
                             {"bound", num(s.bound->bound)},
                             {"ratio", num(s.bound->ratio)},
                             {"passed", s.bound->passed}};
  return j;
}

Json to_json(const FlowBatch& b) {
  Json runs = Json::array();
  for (const auto& r : b.runs) runs.push_back(to_json(r));
  Json notes = Json::array();
  for (const auto& n : b.notes) notes.push_back(n);
  return Json{{"trajectories", b.runs.size()},
              {"converged", b.converged},
              {"inconclusive", b.inconclusive},
              {"fraction_converged", num(b.fraction_converged)},
              {"max_monotonicity_violation", num(b.max_monotonicity_violation)},
              {"max_horizontality", num(b.max_horizontality)},
              {"length_bound_checked", b.bound_checked},
              {"length_bound_passed", b.bound_passed},
              {"revisit_firings", b.revisit_firings},
              {"notes", notes},
              {"runs", runs}};
}

Json to_json(const PerturbationParams& p) {
  return Json{{"alpha", num(p.alpha)}, {"beta", num(p.beta)}, {"gamma", num(p.gamma)}, {"base_point", to_json(p.base_point)}};
}

Json to_json(const RepairResult& r) {
  Json log = Json::array();
  for (const auto& s : r.log) {
    Json e{{"kind", s.kind},
           {"lambda_before", s.lambda_before},
           {"kappa_before", s.kappa_before},
           {"lambda_after", s.lambda_after},
           {"kappa_after", s.kappa_after},
           {"detail", s.detail}};
    if (s.kind == "perturbation" || s.kind == "halving") {
      e["eps"] = to_json(s.eps);
      e["budget"] = num(s.budget);
      e["claim1"] = Json::array({num(s.claim1[0]), num(s.claim1[1]), num(s.claim1[2])});
      e["claim2"] = Json{{"lhs", num(s.claim2.lhs)},
                         {"rhs", num(s.claim2.rhs)},
                         {"agrees", s.claim2.agrees},
                         {"nondegenerate", s.claim2.nondegenerate}};
    }
    log.push_back(e);
  }
  return Json{{"repaired", format_poly(r.repaired)},
              {"success", r.success},
              {"failure", r.failure},
              {"iterations", r.iterations},
              {"distance", num(r.distance)},
              {"log", log},
              {"final_certificates", to_json(r.final_report)}};
}

Json report_header(const Poly4& f, const Box& box) {
  return Json{{"schema_version", kSchemaVersion}, {"polynomial", format_poly(f)}, {"box", to_json(box)}};
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x1,x2,x3,x4,f,grad_norm,dist_vf,lg_cum,ldelta_cum\n";
  for (const auto& s : traj.samples) {
    const double vals[] = {s.t,         s.x[0],   s.x[1], s.x[2],
                           s.x[3],      s.f,      s.grad_norm,
                           s.dist_vf,   s.lg,     traj.ldelta_applicable ? s.ldelta : std::nan("")};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) out += ',';
      out += format_double(vals[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace engelgrad
