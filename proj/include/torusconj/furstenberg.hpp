#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "torusconj/circle.hpp"
#include "torusconj/shear.hpp"
#include "torusconj/trig.hpp"

namespace torusconj {

/**
 * Skew product (x, t) -> (x + theta, t + d*x + f(x)) on T^2 with theta
 * irrational and d != 0 (minimal; uniquely ergodic for Lipschitz f, with
 * invariant measure Lebesgue x Lebesgue).
 */
class FurstenbergMap {
 public:
  FurstenbergMap(double theta, int d, RealFunction f)
      : theta_(theta), d_(d), f_(std::move(f)) {
    if (d_ == 0)
      throw std::invalid_argument("FurstenbergMap: degree d must be nonzero");
    convergents(theta_, 12);  // rejects theta outside (0,1) and near-rationals
  }

  double theta() const { return theta_; }
  int degree() const { return d_; }
  const RealFunction& fiber_phase() const { return f_; }

  /** Real lift of the fiber increment: d*x + f(x), x the real coordinate. */
  double fiber_lift(double x) const { return d_ * x + f_.eval(x); }

  CircleValuedMap fiber_map() const { return CircleValuedMap(d_, f_); }

  TorusPoint apply(TorusPoint p) const {
    return {p.x.rotated(theta_), p.t.rotated(fiber_lift(p.x.value()))};
  }

  TorusPoint apply_inverse(TorusPoint p) const {
    CirclePoint x0 = p.x.rotated(-theta_);
    return {x0, p.t.rotated(-fiber_lift(x0.value()))};
  }

  TorusPoint iterate(TorusPoint p, std::int64_t n) const {
    TorusPoint q = p;
    for (std::int64_t i = 0; i < n; ++i) q = apply(q);
    for (std::int64_t i = 0; i > n; --i) q = apply_inverse(q);
    return q;
  }

  /** Coarse chordal Lipschitz bound 1 + 2 pi (|d| + Lip f). */
  double lipschitz_bound() const {
    return 1.0 + kTwoPi * (std::fabs(static_cast<double>(d_)) + f_.lipschitz_bound());
  }

 private:
  double theta_;
  int d_;
  RealFunction f_;
};

/** Conjugated map together with the conjugating flip and a grid defect check. */
struct FlipConjugacy {
  FurstenbergMap map;
  ShearMap flip;
  double grid_defect = 0.0;
};

namespace detail {

inline double flip_grid_defect(const FurstenbergMap& alpha,
                               const FurstenbergMap& beta, const ShearMap& flip,
                               int grid) {
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      TorusPoint p{CirclePoint((i + 0.5) / grid), CirclePoint((j + 0.5) / grid)};
      worst = std::max(worst,
                       torus_dist(flip.apply(alpha.apply(p)),
                                  beta.apply(flip.apply(p))));
    }
  }
  return worst;
}

}  // namespace detail

/**
 * Conjugation by sigma(x, t) = (-x, t): Phi_{theta,d,f} becomes
 * Phi_{1-theta,-d,f(-.)}, exactly (sigma . alpha = beta . sigma).
 */
inline FlipConjugacy flip_base(const FurstenbergMap& m, int grid = 64) {
  FurstenbergMap flipped(wrap_unit(-m.theta()), -m.degree(),
                         m.fiber_phase().reflected());
  ShearMap flip = ShearMap::base_flip();
  double defect = detail::flip_grid_defect(m, flipped, flip, grid);
  return {std::move(flipped), std::move(flip), defect};
}

/**
 * Conjugation by sigma(x, t) = (x, -t): Phi_{theta,d,f} becomes
 * Phi_{theta,-d,-f}, exactly.
 */
inline FlipConjugacy flip_fiber(const FurstenbergMap& m, int grid = 64) {
  FurstenbergMap flipped(m.theta(), -m.degree(), m.fiber_phase().negated());
  ShearMap flip = ShearMap::fiber_flip();
  double defect = detail::flip_grid_defect(m, flipped, flip, grid);
  return {std::move(flipped), std::move(flip), defect};
}

/** (1/N) sum_{j<N} phi(alpha^j(start)). */
template <typename Phi>
double birkhoff_average(const FurstenbergMap& m, Phi&& phi, TorusPoint start,
                        std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("birkhoff_average: n must be >= 1");
  double s = 0.0;
  TorusPoint p = start;
  for (std::int64_t j = 0; j < n; ++j) {
    s += phi(p);
    p = m.apply(p);
  }
  return s / static_cast<double>(n);
}

}  // namespace torusconj
