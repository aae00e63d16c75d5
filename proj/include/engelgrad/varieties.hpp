#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engelgrad/engel.hpp"
#include "engelgrad/system.hpp"

namespace engelgrad {

struct Tolerances {
  double refine_tol = 1e-9;
  double rank_tol = 1e-6;   // relative to the largest singular value
  double claim_tol = 1e-7;
  double fiber_tol = 1e-7;
  double tangency_floor = 1e-6;
  double angle_tol = 1e-3;  // radians
  double dedupe_radius() const { return 10.0 * refine_tol; }
  double exclusion_radius() const { return 10.0 * dedupe_radius(); }
};

struct VarietyOptions {
  Tolerances tol;
  int grid_res = 6;         // lattice points per axis for seeding
  int system_grid = 5;      // lattice for the finite systems
  double step_fraction = 1e-2;  // initial continuation step / box diagonal
  double step_floor = 1e-6;
  int max_trace_points = 20000;
  Exec exec = Exec::Parallel;
};

/// Discrete stand-in for V_f = {X1 f = X2 f = 0}.
struct VfSample {
  std::vector<Point4> points;
  std::vector<double> residuals;
  std::vector<double> jacobian_sigma2;  // second singular value, frame Jacobian
  std::vector<double> jacobian_sigma1;
  double mesh_width = 0.0;              // lattice spacing used for seeding
  bool empty() const { return points.empty(); }
};

/// The system (X1 f, X2 f) with Euclidean Jacobians.
PolySystem vf_system(const Poly4& f);
/// The system (X1 f, X2 f, G f) defining Gamma_f.
PolySystem gamma_system(const Poly4& f);

/// Regular lattice with `res` points per axis (corners included), row-major in x1..x4.
std::vector<Point4> lattice(const Box& box, int res);

/// Removes points within `radius` of an earlier point. Order-preserving.
std::vector<std::size_t> dedupe(const std::vector<Point4>& pts, double radius);

VfSample sample_vf(const Poly4& f, const Box& box, int grid_res, const VarietyOptions& opt = {});

/// Reusable distance oracle to V_f. Starts local projections from the query
/// point itself and from the nearest sample points, returns the smallest
/// converged distance.
class VfDistance {
 public:
  VfDistance(const Poly4& f, const VfSample& sample, const Tolerances& tol = {});
  double operator()(const Point4& x) const { return project(x).distance; }
  Projection project(const Point4& x, const Point4* hint = nullptr) const;
  /// Single local projection started at `start` (no global search).
  std::optional<Projection> local(const Point4& x, const Point4& start) const {
    return project_onto(sys_, x, start, newton_);
  }
  double mesh_width() const { return sample_->mesh_width; }
  const VfSample& sample() const { return *sample_; }

 private:
  PolySystem sys_;
  const VfSample* sample_;
  NewtonOptions newton_;
};

/// Throws EmptyVariety when the sample is empty.
double distance_to_vf(const Poly4& f, const VfSample& sample, const Point4& x, const Tolerances& tol = {});

enum class ComponentClass { FiberContained, Transverse, Undetermined };
std::string to_string(ComponentClass c);

struct GammaComponent {
  std::vector<Point4> polyline;
  bool closed = false;
  bool exits_box = false;
  double f_min = 0.0, f_max = 0.0;
  std::vector<double> tangency_scores;  // [d(Gf)](xi_f) / (1 + |xi_f|)
  std::vector<double> raw_scores;       // [d(Gf)](xi_f)
  std::vector<double> sigma3;           // relative third singular value
  ComponentClass classification = ComponentClass::Undetermined;
  bool horizontal = false;
  double length() const;
};

/// c(d) = 2(d-1)[4(d-1)-1]^3, the bound on the number of components of Gamma_f.
long long component_bound(int d);

struct TraceDiagnostics {
  std::size_t seeds = 0;
  std::size_t converged_seeds = 0;
  double min_sigma3 = 1.0;  // min relative third singular value along traced points
};

/// Traces Gamma_f inside the box by predictor-corrector continuation.
/// Throws RankDeficiency when the 3x4 frame Jacobian drops rank at a traced
/// point and ComponentBoundExceeded when more than c(d) components appear.
std::vector<GammaComponent> trace_gamma(const Poly4& f, const Box& box, const VarietyOptions& opt = {},
                                        TraceDiagnostics* diag = nullptr);

GammaComponent classify_component(const Poly4& f, GammaComponent comp, double fiber_tol,
                                  const Tolerances& tol = {});

enum class SystemId { S1, S2, S3, Cr };
enum class Finiteness { Finite, Unknown, CurveDetected };
std::string to_string(SystemId s);
std::string to_string(Finiteness f);

struct RootSet {
  SystemId system = SystemId::Cr;
  std::vector<Point4> roots;
  Finiteness finiteness = Finiteness::Finite;
};

/// The four equations of S1, S2, S3 or Cr for f.
PolySystem finite_system(const Poly4& f, SystemId which);

RootSet solve_finite_system(const Poly4& f, SystemId which, const Box& box, int grid_res,
                            const VarietyOptions& opt = {});

/// Omega_f candidates: union of S1, S2, S3 roots; worst finiteness flag.
RootSet omega_set(const Poly4& f, const Box& box, const VarietyOptions& opt = {});

/// True if the 16-step linear homotopy from a to b stays on the system.
bool curve_connected(const PolySystem& sys, const Point4& a, const Point4& b);

}  // namespace engelgrad
