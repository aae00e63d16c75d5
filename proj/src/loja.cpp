#include <cmath>
#include <limits>

#include "engelgrad/flow.hpp"
#include "engelgrad/rng.hpp"

namespace engelgrad {

LojaEstimate estimate_loja(const Poly4& f, const Box& box, const VfSample& sample, int n, double collar,
                           std::uint64_t seed, const Tolerances& tol) {
  if (sample.empty()) throw EmptyVariety();
  if (!(collar > 0.0)) throw std::invalid_argument("collar must be positive");
  if (n < 1) throw std::invalid_argument("need at least one sample point");

  const VfDistance dist(f, sample, tol);
  const PolySystem sys = vf_system(f);
  const Poly4 h1 = apply_x(1, f), h2 = apply_x(2, f);

  LojaEstimate est;
  est.collar_radius = collar;
  est.C1 = std::numeric_limits<double>::infinity();
  est.C2 = 0.0;
  auto consider = [&](const Point4& x) {
    if (!box.contains(x)) return;
    const double d = dist(x);
    if (!(d >= collar)) return;
    const double ratio = std::hypot(h1.eval(x), h2.eval(x)) / d;
    ++est.sample_count;
    if (ratio < est.C1) {
      est.C1 = ratio;
      est.argmin = x;
    }
    if (ratio > est.C2) {
      est.C2 = ratio;
      est.argmax = x;
    }
  };

  const Point4 shift = random_shift(derive_seed(seed, 0x68616c74));
  for (int i = 0; i < n; ++i) consider(halton_point(static_cast<std::uint64_t>(i) + 1, box, shift));

  // Near-variety probes: random unit vectors in the row space of the
  // Jacobian, which is the normal space of V_f at a regular point.
  Rng rng(derive_seed(seed, 0x6e726d6c));
  const std::size_t m = sample.points.size();
  const std::size_t stride = std::max<std::size_t>(1, m / static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < m; i += stride) {
    const Point4& p = sample.points[i];
    DynMat J = sys.jacobian(p);
    const double c1 = rng.normal(), c2 = rng.normal();
    const double r = collar * rng.uniform(1.0, 10.0);
    Vec4 nrm = c1 * J.row(0).transpose() + c2 * J.row(1).transpose();
    if (!(nrm.norm() > 0.0)) continue;
    consider(p + r * nrm.normalized());
  }
  if (est.sample_count == 0) throw std::runtime_error("no sample point at distance >= collar from V_f");
  return est;
}

}  // namespace engelgrad
