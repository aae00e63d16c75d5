#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engelgrad/varieties.hpp"

namespace engelgrad {

enum class FlowDirection { Ascent, Descent };
enum class Termination { BoxExit, NearVf, MaxTime, StepFloor };
std::string to_string(FlowDirection d);
std::string to_string(Termination t);

struct FlowSample {
  double t = 0.0;
  Point4 x = Point4::Zero();
  double f = 0.0;
  double grad_norm = 0.0;
  double dist_vf = 0.0;  // NaN when V_f is empty
  double lg = 0.0;       // cumulative lengths up to this sample
  double ldelta = 0.0;
};

struct FlowConfig {
  FlowDirection direction = FlowDirection::Descent;
  double stop_grad = 1e-8;
  double t_max = 1e3;
  double step_floor = 1e-12;
  double rtol = 1e-10;
  double atol = 1e-12;
  double exit_tol = 1e-10;  // time resolution of the box-exit bisection
  bool track_ldelta = true;
  int vf_grid = 6;
  Tolerances tol;
};

struct Trajectory {
  std::vector<FlowSample> samples;
  double l_g = 0.0;
  double l_delta = 0.0;
  bool ldelta_applicable = true;
  FlowDirection direction = FlowDirection::Descent;
  Termination termination = Termination::MaxTime;
  double max_horizontality = 0.0;  // max |w3|, |w4| of the velocity over all nodes
  int rejected_steps = 0;
};

/// Integrates x' = s (X1f X1 + X2f X2) with s = +1 (ascent) or -1 (descent).
/// l_g is carried as an extra state component; l_delta is a 3-point
/// Gauss-Legendre sum per step on the integrator's continuous extension.
/// Pass `sample` to reuse a V_f sample; otherwise one is built on a
/// cfg.vf_grid lattice.
Trajectory integrate(const Poly4& f, const Point4& x0, const Box& box, const FlowConfig& cfg = {},
                     const VfSample* sample = nullptr);

/// f-values paired with positions, in flow order.
std::vector<std::pair<double, Point4>> parametrize_by_f(const Trajectory& traj);

/// Gradient for the metric d^2 g: frame components (X1f/d^2, X2f/d^2, 0, 0).
FrameVector delta_gradient(const Poly4& f, const Point4& x, double d);

struct LojaEstimate {
  double C1 = 0.0, C2 = 0.0;
  Point4 argmin = Point4::Zero(), argmax = Point4::Zero();
  double collar_radius = 0.0;
  std::size_t sample_count = 0;
};

/// Ratio |grad^h f| / d_{V_f} over n Halton points at distance >= collar
/// plus probes pushed off V_f along its normal space by [collar, 10 collar].
/// Throws EmptyVariety when the sample is empty.
LojaEstimate estimate_loja(const Poly4& f, const Box& box, const VfSample& sample, int n, double collar,
                           std::uint64_t seed = 1, const Tolerances& tol = {});

struct LengthBound {
  double l_delta = 0.0;
  double bound = 0.0;  // |f(end) - f(start)| / C1
  double ratio = 0.0;  // l_delta / bound (0 when both vanish)
  double slack = 0.0;
  bool passed = false;
};

LengthBound length_bound_check(const Trajectory& traj, const LojaEstimate& loja, double slack = 1e-3);

enum class LimitVerdict { Converged, Inconclusive };
enum class LimitLocation { Boundary, VfMinusGamma, NearGamma, None };
std::string to_string(LimitVerdict v);
std::string to_string(LimitLocation l);

struct LimitReport {
  LimitVerdict verdict = LimitVerdict::Inconclusive;
  LimitLocation location = LimitLocation::None;
  Point4 point = Point4::Zero();
  double tail_diameter = 0.0;
  Point4 far_a = Point4::Zero(), far_b = Point4::Zero();  // most distant tail pair
};

/// Box exits converge to their exit point. Otherwise the tail is the set of
/// samples in the last quarter of the integration time; its diameter must not
/// exceed tol.
LimitReport limit_analysis(const Trajectory& traj, const std::vector<GammaComponent>& gamma, double tol);

struct FlowBatchConfig {
  FlowConfig flow;
  double limit_tol = 1e-5;
  double monotone_tol = 1e-5;
  double revisit_radius = 1e-6;
  double revisit_min_length = 1e-3;
  int loja_points = 400;
  double collar = 1e-2;
  double bound_slack = 1e-3;
  std::uint64_t seed = 1;
  bool keep_trajectories = false;
  Exec exec = Exec::Parallel;
};

struct TrajectorySummary {
  Point4 start = Point4::Zero();
  FlowDirection direction = FlowDirection::Descent;
  Termination termination = Termination::MaxTime;
  LimitReport limit;
  double l_g = 0.0, l_delta = 0.0;
  double monotonicity_violation = 0.0;  // relative to |f(end) - f(start)|
  double horizontality = 0.0;
  bool revisit = false;
  std::optional<LengthBound> bound;
  bool retried = false;  // integrated again with doubled t_max
  std::size_t samples = 0;
};

struct FlowBatch {
  std::vector<TrajectorySummary> runs;
  std::vector<Trajectory> trajectories;  // filled when keep_trajectories
  std::optional<LojaEstimate> loja;
  std::size_t converged = 0;
  std::size_t inconclusive = 0;
  double fraction_converged = 0.0;
  double max_monotonicity_violation = 0.0;
  double max_horizontality = 0.0;
  std::size_t bound_checked = 0, bound_passed = 0;
  std::size_t revisit_firings = 0;
  std::vector<std::string> notes;
};

/// n_seeds Halton starts, each integrated in both directions.
FlowBatch batch_flow(const Poly4& f, const Box& box, int n_seeds, const FlowBatchConfig& cfg = {});

/// Largest relative increase of f against the flow direction between samples.
double monotonicity_violation(const Trajectory& traj);

/// True if two samples separated by at least min_length of l_g lie within radius.
bool revisit_detected(const Trajectory& traj, double radius, double min_length);

}  // namespace engelgrad
