#include "engelgrad/flow.hpp"

#include <cmath>
#include <limits>

#include "engelgrad/ode.hpp"
#include "engelgrad/parallel.hpp"
#include "engelgrad/rng.hpp"

namespace engelgrad {

std::string to_string(FlowDirection d) { return d == FlowDirection::Ascent ? "ascent" : "descent"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::BoxExit:
      return "BoxExit";
    case Termination::NearVf:
      return "NearVf";
    case Termination::MaxTime:
      return "MaxTime";
    case Termination::StepFloor:
      return "StepFloor";
  }
  return "?";
}

std::string to_string(LimitVerdict v) { return v == LimitVerdict::Converged ? "Converged" : "Inconclusive"; }

std::string to_string(LimitLocation l) {
  switch (l) {
    case LimitLocation::Boundary:
      return "boundary";
    case LimitLocation::VfMinusGamma:
      return "vf_minus_gamma";
    case LimitLocation::NearGamma:
      return "near_gamma";
    case LimitLocation::None:
      return "none";
  }
  return "?";
}

namespace {

// d_{V_f} along one trajectory. Nodes warm-start from the previous foot point
// and redo the global search after moving half a sample mesh width; RK stages
// only use the local projection from the current foot.
class DistanceTracker {
 public:
  explicit DistanceTracker(const VfDistance& d) : dist_(d) {}

  double at_node(const Point4& x) {
    Projection p;
    if (!has_ || (x - anchor_).norm() > 0.5 * dist_.mesh_width()) {
      p = dist_.project(x, has_ ? &foot_ : nullptr);
      anchor_ = x;
    } else {
      auto q = dist_.local(x, foot_);
      p = (q && q->converged) ? *q : dist_.project(x, &foot_);
    }
    has_ = true;
    foot_ = p.foot;
    return p.distance;
  }

  double at_stage(const Point4& x) const {
    auto q = dist_.local(x, foot_);
    if (q && q->converged) return q->distance;
    return dist_.project(x, &foot_).distance;
  }

 private:
  const VfDistance& dist_;
  Point4 foot_ = Point4::Zero();
  Point4 anchor_ = Point4::Zero();
  bool has_ = false;
};

}  // namespace

Trajectory integrate(const Poly4& f, const Point4& x0, const Box& box, const FlowConfig& cfg,
                     const VfSample* sample) {
  if (!box.contains(x0)) throw StartOutsideBox();
  const double s = cfg.direction == FlowDirection::Ascent ? 1.0 : -1.0;
  const Poly4 h1 = apply_x(1, f), h2 = apply_x(2, f);

  Trajectory traj;
  traj.direction = cfg.direction;

  std::optional<VfSample> own;
  std::optional<VfDistance> dist;
  if (cfg.track_ldelta) {
    if (!sample) {
      VarietyOptions vo;
      vo.tol = cfg.tol;
      vo.exec = Exec::Serial;
      own = sample_vf(f, box, cfg.vf_grid, vo);
      sample = &*own;
    }
    if (!sample->empty()) dist.emplace(f, *sample, cfg.tol);
  }
  traj.ldelta_applicable = dist.has_value();
  std::optional<DistanceTracker> tracker;
  if (dist) tracker.emplace(*dist);

  double ldelta = 0.0;
  auto node = [&](double t, const Eigen::VectorXd& y) {
    FlowSample fs;
    fs.t = t;
    fs.x = y.head<4>();
    fs.f = f.eval(fs.x);
    const double a = h1.eval(fs.x), b = h2.eval(fs.x);
    fs.grad_norm = std::hypot(a, b);
    fs.dist_vf = tracker ? tracker->at_node(fs.x) : std::numeric_limits<double>::quiet_NaN();
    fs.lg = y[4];
    fs.ldelta = ldelta;
    Vec4 v = s * ambient_velocity(a, b, fs.x);
    auto [w3, w4] = one_form_residual(fs.x, v);
    traj.max_horizontality = std::max({traj.max_horizontality, std::abs(w3), std::abs(w4)});
    traj.samples.push_back(fs);
    return fs;
  };

  Eigen::VectorXd y0(5);
  y0 << x0, 0.0;
  if (node(0.0, y0).grad_norm < cfg.stop_grad) {
    traj.termination = Termination::NearVf;
    return traj;
  }

  OdeRhs rhs = [&](double, const Eigen::VectorXd& y) {
    const Point4 x = y.head<4>();
    const double a = h1.eval(x), b = h2.eval(x);
    Eigen::VectorXd dy(5);
    dy.head<4>() = s * ambient_velocity(a, b, x);
    dy[4] = std::hypot(a, b);
    return dy;
  };

  DopriOptions dopt;
  dopt.rtol = cfg.rtol;
  dopt.atol = cfg.atol;
  dopt.h_min = cfg.step_floor;
  Dopri5 ode(rhs, 0.0, y0, dopt);
  auto ode_dense = [&](double t) -> Point4 { return ode.dense(t).head<4>(); };

  // l_delta over [t0, t1] of the last step: 3-point Gauss-Legendre on the
  // continuous extension, d_{V_f} warm-started from the foot at the step start.
  auto add_ldelta = [&](double t0, double t1) {
    if (!tracker) return;
    static const double nodes[] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double weights[] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    const double h = t1 - t0;
    for (int i = 0; i < 3; ++i) {
      const Point4 x = ode_dense(t0 + 0.5 * h * (1.0 + nodes[i]));
      ldelta += h * weights[i] * tracker->at_stage(x) * std::hypot(h1.eval(x), h2.eval(x));
    }
  };


  constexpr std::size_t kMaxSamples = 200000;
  for (;;) {
    if (ode.step(cfg.t_max) == Dopri5::Status::StepFloor) {
      traj.termination = Termination::StepFloor;
      break;
    }
    if (!box.contains(ode.y().head<4>())) {
      double lo = ode.t_prev(), hi = ode.t();
      while (hi - lo > cfg.exit_tol) {
        double mid = 0.5 * (lo + hi);
        if (box.contains(ode.dense(mid).head<4>())) lo = mid;
        else hi = mid;
      }
      add_ldelta(ode.t_prev(), lo);
      node(lo, ode.dense(lo));
      traj.termination = Termination::BoxExit;
      break;
    }
    add_ldelta(ode.t_prev(), ode.t());
    const FlowSample& fs = node(ode.t(), ode.y());
    if (fs.grad_norm < cfg.stop_grad) {
      traj.termination = Termination::NearVf;
      break;
    }
    if (ode.t() >= cfg.t_max || traj.samples.size() >= kMaxSamples) {
      traj.termination = Termination::MaxTime;
      break;
    }
  }
  traj.rejected_steps = ode.rejected();
  traj.l_g = traj.samples.back().lg;
  traj.l_delta = traj.ldelta_applicable ? traj.samples.back().ldelta : 0.0;
  return traj;
}

std::vector<std::pair<double, Point4>> parametrize_by_f(const Trajectory& traj) {
  std::vector<std::pair<double, Point4>> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.emplace_back(s.f, s.x);
  return out;
}

FrameVector delta_gradient(const Poly4& f, const Point4& x, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("distance to V_f must be positive");
  const double d2 = d * d;
  return FrameVector{{apply_x(1, f).eval(x) / d2, apply_x(2, f).eval(x) / d2, 0.0, 0.0}, x};
}

LengthBound length_bound_check(const Trajectory& traj, const LojaEstimate& loja, double slack) {
  LengthBound r;
  r.slack = slack;
  r.l_delta = traj.l_delta;
  const double df = traj.samples.empty() ? 0.0 : std::abs(traj.samples.back().f - traj.samples.front().f);
  r.bound = loja.C1 > 0.0 ? df / loja.C1 : std::numeric_limits<double>::infinity();
  r.ratio = r.bound > 0.0 ? r.l_delta / r.bound : 0.0;
  r.passed = r.l_delta <= r.bound * (1.0 + slack);
  return r;
}

double monotonicity_violation(const Trajectory& traj) {
  const auto& S = traj.samples;
  if (S.size() < 2) return 0.0;
  const double s = traj.direction == FlowDirection::Ascent ? 1.0 : -1.0;
  const double scale =
      std::max(std::abs(S.back().f - S.front().f), 1e-12 * (1.0 + std::abs(S.front().f)));
  double worst = 0.0;
  for (std::size_t i = 1; i < S.size(); ++i) worst = std::max(worst, -s * (S[i].f - S[i - 1].f));
  return worst / scale;
}

bool revisit_detected(const Trajectory& traj, double radius, double min_length) {
  const auto& S = traj.samples;
  for (std::size_t j = 1; j < S.size(); ++j)
    for (std::size_t i = 0; i < j && S[j].lg - S[i].lg >= min_length; ++i)
      if ((S[j].x - S[i].x).norm() <= radius) return true;
  return false;
}

LimitReport limit_analysis(const Trajectory& traj, const std::vector<GammaComponent>& gamma, double tol) {
  LimitReport r;
  const auto& S = traj.samples;
  if (S.empty()) return r;

  // Tail: samples in the last quarter of the integration time.
  const std::size_t n = S.size();
  std::size_t first = n - 1;
  if (traj.termination != Termination::BoxExit) {
    const double t_tail = 0.75 * S.back().t;
    while (first > 0 && S[first - 1].t >= t_tail) --first;
  }
  double diam = 0.0;
  r.far_a = r.far_b = S.back().x;
  for (std::size_t i = first; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = (S[i].x - S[j].x).norm();
      if (d > diam) {
        diam = d;
        r.far_a = S[i].x;
        r.far_b = S[j].x;
      }
    }
  r.tail_diameter = diam;
  r.point = S.back().x;

  const bool terminated = traj.termination == Termination::BoxExit || traj.termination == Termination::NearVf;
  if (!terminated || diam > tol) return r;

  r.verdict = LimitVerdict::Converged;
  if (traj.termination == Termination::BoxExit) {
    r.location = LimitLocation::Boundary;
    return r;
  }
  r.location = LimitLocation::VfMinusGamma;
  for (const auto& c : gamma)
    for (std::size_t i = 0; i < c.polyline.size(); ++i) {
      const Point4& a = c.polyline[i];
      const Point4& b = i + 1 < c.polyline.size() ? c.polyline[i + 1] : a;
      Vec4 ab = b - a;
      double t = ab.squaredNorm() > 0.0 ? std::clamp((r.point - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0) : 0.0;
      if ((r.point - (a + t * ab)).norm() <= tol) r.location = LimitLocation::NearGamma;
    }
  return r;
}

FlowBatch batch_flow(const Poly4& f, const Box& box, int n_seeds, const FlowBatchConfig& cfg) {
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be at least 1");
  FlowBatch out;
  VarietyOptions vo;
  vo.tol = cfg.flow.tol;
  vo.exec = cfg.exec;
  const VfSample sample = sample_vf(f, box, cfg.flow.vf_grid, vo);

  std::vector<GammaComponent> gamma;
  try {
    gamma = trace_gamma(f, box, vo);
  } catch (const std::exception& e) {
    out.notes.push_back(std::string("Gamma tracing: ") + e.what());
  }
  if (!sample.empty()) {
    try {
      out.loja = estimate_loja(f, box, sample, cfg.loja_points, cfg.collar, derive_seed(cfg.seed, 0x6c6f6a61),
                               cfg.flow.tol);
    } catch (const std::exception& e) {
      out.notes.push_back(std::string("Lojasiewicz estimate: ") + e.what());
    }
  }

  const Point4 shift = random_shift(derive_seed(cfg.seed, 0x73747274));
  const std::size_t n = static_cast<std::size_t>(n_seeds);

  struct Run {
    TrajectorySummary summary;
    Trajectory traj;
  };
  auto runs = map_indices<Run>(2 * n, cfg.exec, [&](std::size_t k) {
    FlowConfig fc = cfg.flow;
    fc.direction = k % 2 == 0 ? FlowDirection::Descent : FlowDirection::Ascent;
    Run run;
    TrajectorySummary& sm = run.summary;
    sm.start = halton_point(k / 2 + 1, box, shift);
    sm.direction = fc.direction;
    run.traj = integrate(f, sm.start, box, fc, &sample);
    sm.limit = limit_analysis(run.traj, gamma, cfg.limit_tol);
    if (sm.limit.verdict == LimitVerdict::Inconclusive) {
      fc.t_max *= 2.0;
      run.traj = integrate(f, sm.start, box, fc, &sample);
      sm.limit = limit_analysis(run.traj, gamma, cfg.limit_tol);
      sm.retried = true;
    }
    const Trajectory& tr = run.traj;
    sm.termination = tr.termination;
    sm.l_g = tr.l_g;
    sm.l_delta = tr.l_delta;
    sm.samples = tr.samples.size();
    sm.monotonicity_violation = monotonicity_violation(tr);
    sm.horizontality = tr.max_horizontality;
    sm.revisit = revisit_detected(tr, cfg.revisit_radius, cfg.revisit_min_length);
    if (out.loja && tr.ldelta_applicable && tr.samples.size() >= 2)
      sm.bound = length_bound_check(tr, *out.loja, cfg.bound_slack);
    return run;
  });

  for (auto& run : runs) {
    const auto& sm = run.summary;
    if (sm.limit.verdict == LimitVerdict::Converged) ++out.converged;
    else ++out.inconclusive;
    out.max_monotonicity_violation = std::max(out.max_monotonicity_violation, sm.monotonicity_violation);
    out.max_horizontality = std::max(out.max_horizontality, sm.horizontality);
    if (sm.bound) {
      ++out.bound_checked;
      if (sm.bound->passed) ++out.bound_passed;
    }
    if (sm.revisit) ++out.revisit_firings;
    out.runs.push_back(sm);
    if (cfg.keep_trajectories) out.trajectories.push_back(std::move(run.traj));
  }
  out.fraction_converged = static_cast<double>(out.converged) / static_cast<double>(out.runs.size());
  return out;
}

}  // namespace engelgrad
