#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "torusconj/circle.hpp"
#include "torusconj/piecewise.hpp"
#include "torusconj/trig.hpp"

namespace torusconj {

/**
 * One stage of a Lebesgue-measure-preserving torus homeomorphism (off a null
 * set). Every stage acts fiberwise-affinely: (x, t) -> (a(x), s*t + c(x)).
 */
class ShearMap {
 public:
  enum class Kind {
    base_flip,         // (x, t) -> (-x, t)
    fiber_flip,        // (x, t) -> (x, -t)
    fiber_shear,       // (x, t) -> (x, t + sign * omega(x))
    fiber_multiplier,  // (x, t) -> (x, t + sign * (K x + g0(x)))
  };

  static ShearMap base_flip() { return ShearMap(Kind::base_flip); }
  static ShearMap fiber_flip() { return ShearMap(Kind::fiber_flip); }

  static ShearMap fiber_shear(PiecewiseCircleMap omega, int sign = +1) {
    ShearMap s(Kind::fiber_shear);
    s.omega_ = std::make_shared<PiecewiseCircleMap>(std::move(omega));
    s.sign_ = sign;
    return s;
  }

  static ShearMap fiber_multiplier(CircleValuedMap g, int sign = +1) {
    ShearMap s(Kind::fiber_multiplier);
    s.g_ = std::make_shared<CircleValuedMap>(std::move(g));
    s.sign_ = sign;
    return s;
  }

  Kind kind() const { return kind_; }
  int sign() const { return sign_; }
  const PiecewiseCircleMap& omega() const { return *omega_; }
  const CircleValuedMap& multiplier() const { return *g_; }

  /** Fiber shift c(x); base flips have none. */
  double fiber_shift(CirclePoint x) const {
    switch (kind_) {
      case Kind::fiber_shear:
        return sign_ * omega_->lift_at(x);
      case Kind::fiber_multiplier:
        return sign_ * g_->folded_lift(x.value());
      default:
        return 0.0;
    }
  }

  TorusPoint apply(TorusPoint p) const {
    switch (kind_) {
      case Kind::base_flip:
        return {p.x.negated(), p.t};
      case Kind::fiber_flip:
        return {p.x, p.t.negated()};
      default:
        return {p.x, p.t.rotated(fiber_shift(p.x))};
    }
  }

  ShearMap inverse() const {
    ShearMap s = *this;
    if (kind_ == Kind::fiber_shear || kind_ == Kind::fiber_multiplier)
      s.sign_ = -s.sign_;
    return s;  // flips are involutions
  }

  /** Base circles {x = c} where the stage is discontinuous. */
  std::vector<CirclePoint> discontinuities() const {
    if (kind_ == Kind::fiber_shear) return omega_->discontinuities();
    return {};
  }

  double fiber_lipschitz_bound() const {
    switch (kind_) {
      case Kind::fiber_shear:
        return omega_->lipschitz_bound();
      case Kind::fiber_multiplier:
        return g_->lipschitz_bound();
      default:
        return 0.0;
    }
  }

 private:
  explicit ShearMap(Kind k) : kind_(k) {}

  Kind kind_;
  int sign_ = +1;
  std::shared_ptr<PiecewiseCircleMap> omega_;
  std::shared_ptr<CircleValuedMap> g_;
};

/** How a fiber-affine transform acts over the base point x. */
struct ColumnAction {
  CirclePoint base_out;
  int fiber_sign = +1;
  double fiber_shift = 0.0;  // t -> fiber_sign * t + fiber_shift (mod 1)
};

/**
 * Composition of shear stages, applied first-to-last. Closed under the
 * fiber-affine form (x, t) -> (a(x), s*t + c(x)) with a global sign s.
 */
class TorusTransform {
 public:
  TorusTransform() = default;
  explicit TorusTransform(std::vector<ShearMap> stages) : stages_(std::move(stages)) {}

  static TorusTransform identity() { return TorusTransform(); }

  void push(ShearMap s) { stages_.push_back(std::move(s)); }
  const std::vector<ShearMap>& stages() const { return stages_; }
  bool empty() const { return stages_.empty(); }

  ColumnAction column_action(CirclePoint x) const {
    ColumnAction a{x, +1, 0.0};
    for (const ShearMap& s : stages_) {
      switch (s.kind()) {
        case ShearMap::Kind::base_flip:
          a.base_out = a.base_out.negated();
          break;
        case ShearMap::Kind::fiber_flip:
          a.fiber_sign = -a.fiber_sign;
          a.fiber_shift = -a.fiber_shift;
          break;
        default:
          a.fiber_shift += s.fiber_shift(a.base_out);
          break;
      }
    }
    a.fiber_shift = wrap_unit(a.fiber_shift);
    return a;
  }

  TorusPoint apply(TorusPoint p) const {
    ColumnAction a = column_action(p.x);
    return {a.base_out, CirclePoint(a.fiber_sign * p.t.value() + a.fiber_shift)};
  }

  TorusTransform inverse() const {
    std::vector<ShearMap> rev;
    rev.reserve(stages_.size());
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it)
      rev.push_back(it->inverse());
    return TorusTransform(std::move(rev));
  }

  /**
   * Discontinuity circles in input coordinates: each stage's circles pulled
   * back through the base action of the preceding stages (which is x -> ±x).
   */
  std::vector<CirclePoint> discontinuities() const {
    std::vector<CirclePoint> out;
    int sign = +1;
    for (const ShearMap& s : stages_) {
      for (CirclePoint c : s.discontinuities())
        out.push_back(sign > 0 ? c : c.negated());
      if (s.kind() == ShearMap::Kind::base_flip) sign = -sign;
    }
    return out;
  }

  double fiber_lipschitz_bound() const {
    double m = 0.0;
    for (const ShearMap& s : stages_) m += s.fiber_lipschitz_bound();
    return m;
  }

 private:
  std::vector<ShearMap> stages_;
};

}  // namespace torusconj
