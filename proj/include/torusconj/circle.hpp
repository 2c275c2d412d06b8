#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusconj {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

/** Canonical representative of x + Z in [0, 1). */
inline double wrap_unit(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? y - 1.0 : y;
}

/** Representative of x + Z in (-1/2, 1/2]. */
inline double centered_unit(double x) {
  double y = wrap_unit(x);
  return y > 0.5 ? y - 1.0 : y;
}

/**
 * (m * theta) mod 1 for possibly large integer m. The product is split with
 * an FMA into rounded part + exact residue so the result carries ~1 ulp of
 * absolute error even when m*theta is far too large for the fractional part
 * to survive a plain double product.
 */
inline double frac_mul(std::int64_t m, double theta) {
  double md = static_cast<double>(m);
  double p = md * theta;
  if (std::fabs(p) >= 4.5e15) {  // fractional bits of p itself start to round
    long double lp = static_cast<long double>(md) * static_cast<long double>(theta);
    return wrap_unit(static_cast<double>(lp - std::floor(lp)));
  }
  double e = std::fma(md, theta, -p);  // exact: m*theta == p + e
  double r = p - std::floor(p);        // exact for |p| < 2^52
  return wrap_unit(r + e);
}

/** A point on R/Z, stored canonically in [0, 1). */
class CirclePoint {
 public:
  CirclePoint() : v_(0.0) {}
  explicit CirclePoint(double x) : v_(wrap_unit(x)) {}

  double value() const { return v_; }

  CirclePoint rotated(double by) const { return CirclePoint(v_ + by); }
  CirclePoint negated() const { return CirclePoint(-v_); }

  friend bool operator==(CirclePoint a, CirclePoint b) { return a.v_ == b.v_; }

 private:
  double v_;
};

/** Chordal distance |e^{2pi i a} - e^{2pi i b}| = 2|sin(pi(a-b))|, range [0, 2]. */
inline double circle_dist(CirclePoint a, CirclePoint b) {
  return 2.0 * std::fabs(std::sin(kPi * (a.value() - b.value())));
}

inline double circle_dist(double a, double b) {
  return circle_dist(CirclePoint(a), CirclePoint(b));
}

/** Distance of x + Z to the nearest integer (the R/Z sup-norm), range [0, 1/2]. */
inline double rz_norm(double x) { return std::fabs(centered_unit(x)); }

struct TorusPoint {
  CirclePoint x;
  CirclePoint t;
};

/** Product chordal metric on T^2, range [0, 2*sqrt(2)]. */
inline double torus_dist(const TorusPoint& p, const TorusPoint& q) {
  return std::hypot(circle_dist(p.x, q.x), circle_dist(p.t, q.t));
}

/**
 * Circular arc of positive length <= 1 starting at `start`, traversed
 * counterclockwise. Membership treats the arc as half-open [start, start+length).
 */
struct Arc {
  CirclePoint start;
  double length = 0.0;

  Arc() = default;
  Arc(CirclePoint s, double len) : start(s), length(len) {
    if (!(len > 0.0) || len > 1.0)
      throw std::invalid_argument("Arc: length must lie in (0, 1]");
  }

  CirclePoint end() const { return start.rotated(length); }

  bool contains(CirclePoint p) const {
    if (length == 1.0) return true;
    double off = wrap_unit(p.value() - start.value());
    return off < length;
  }

  /** Offset of p from start along the arc, in [0, 1). */
  double offset_of(CirclePoint p) const { return wrap_unit(p.value() - start.value()); }
};

struct RationalApprox {
  std::int64_t p = 0;
  std::int64_t q = 1;
  double error = 0.0;  // |q*theta - p|
};

class rational_rotation_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * Continued-fraction convergents p_k/q_k of theta in (0, 1), in order of
 * increasing q. The trivial convergent 0/1 is emitted only when theta < 1/2
 * (first partial quotient >= 2); for theta > 1/2 the sequence starts at 1/1.
 * Throws rational_rotation_error if theta is 0, 1, or indistinguishable from
 * a rational within `depth` terms (partial quotient above 1e12).
 */
inline std::vector<RationalApprox> convergents(double theta, int depth) {
  if (!(theta > 0.0 && theta < 1.0))
    throw rational_rotation_error("convergents: theta must lie in (0, 1)");
  if (depth < 1) throw std::invalid_argument("convergents: depth must be >= 1");

  constexpr double kQuotientCap = 1e12;
  std::vector<RationalApprox> out;
  out.reserve(static_cast<std::size_t>(depth));

  // h/k recurrences with a_0 = 0; x holds the current fractional tail.
  std::int64_t h_prev = 1, h_cur = 0;  // numerators  (h_{-1}, h_0)
  std::int64_t k_prev = 0, k_cur = 1;  // denominators (k_{-1}, k_0)
  double x = theta;

  if (std::floor(1.0 / theta) >= 2.0)
    out.push_back({0, 1, theta});  // |1*theta - 0|; absent when theta > 1/2

  while (static_cast<int>(out.size()) < depth) {
    if (x <= 0.0)
      throw rational_rotation_error("convergents: rational rotation detected");
    double inv = 1.0 / x;
    double a_f = std::floor(inv);
    if (!(a_f < kQuotientCap))
      throw rational_rotation_error("convergents: rational rotation detected");
    auto a = static_cast<std::int64_t>(a_f);
    x = inv - a_f;

    std::int64_t h_next = a * h_cur + h_prev;
    std::int64_t k_next = a * k_cur + k_prev;
    h_prev = h_cur; h_cur = h_next;
    k_prev = k_cur; k_cur = k_next;

    // |q theta - p| with an FMA correction: the naive product loses the
    // entire error term once q theta has more integer bits than the gap.
    double kd = static_cast<double>(k_cur);
    double prod = kd * theta;
    double corr = std::fma(kd, theta, -prod);
    double err = std::fabs((prod - static_cast<double>(h_cur)) + corr);
    out.push_back({h_cur, k_cur, err});
  }
  return out;
}

/**
 * Degree of a loop on the circle given samples v_i = gamma(i/N) in cyclic
 * order. Consecutive lift steps are snapped to (-1/2, 1/2]; a step whose R/Z
 * gap reaches 1/2 (up to 1e-9) is ambiguous and raises an error asking for
 * finer sampling.
 */
inline std::int64_t winding_number(const std::vector<CirclePoint>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("winding_number: need at least 2 samples");
  double total = 0.0;
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    double d = centered_unit(samples[(i + 1) % n].value() - samples[i].value());
    if (std::fabs(d) >= 0.5 - 1e-9)
      throw std::runtime_error(
          "winding_number: insufficient sampling (half-turn step at index " +
          std::to_string(i) + ")");
    total += d;
  }
  double rounded = std::nearbyint(total);
  if (std::fabs(total - rounded) > 0.25)
    throw std::runtime_error("winding_number: lift does not close to an integer");
  return static_cast<std::int64_t>(rounded);
}

}  // namespace torusconj
