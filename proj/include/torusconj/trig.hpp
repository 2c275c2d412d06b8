#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "torusconj/circle.hpp"

namespace torusconj {

/**
 * Real trigonometric polynomial
 *   f(t) = constant + sum_k cos_coeffs[k-1]*cos(2 pi k t)
 *                   + sum_k sin_coeffs[k-1]*sin(2 pi k t).
 */
struct TrigPoly {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  int degree() const {
    return static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
  }

  double cos_coeff(int k) const {
    return (k >= 1 && k <= static_cast<int>(cos_coeffs.size()))
               ? cos_coeffs[static_cast<std::size_t>(k - 1)] : 0.0;
  }
  double sin_coeff(int k) const {
    return (k >= 1 && k <= static_cast<int>(sin_coeffs.size()))
               ? sin_coeffs[static_cast<std::size_t>(k - 1)] : 0.0;
  }

  double eval(double t) const {
    double s = constant;
    int deg = degree();
    for (int k = 1; k <= deg; ++k) {
      double ang = kTwoPi * k * t;
      s += cos_coeff(k) * std::cos(ang) + sin_coeff(k) * std::sin(ang);
    }
    return s;
  }

  double mean() const { return constant; }

  /** sup|f| <= |c| + sum(|a_k| + |b_k|). */
  double sup_bound() const {
    double s = std::fabs(constant);
    int deg = degree();
    for (int k = 1; k <= deg; ++k)
      s += std::fabs(cos_coeff(k)) + std::fabs(sin_coeff(k));
    return s;
  }

  /** Lip(f) <= 2 pi sum k(|a_k| + |b_k|). */
  double lipschitz_bound() const {
    double s = 0.0;
    int deg = degree();
    for (int k = 1; k <= deg; ++k)
      s += k * (std::fabs(cos_coeff(k)) + std::fabs(sin_coeff(k)));
    return kTwoPi * s;
  }

  TrigPoly operator-() const {
    TrigPoly r = *this;
    r.constant = -r.constant;
    for (double& a : r.cos_coeffs) a = -a;
    for (double& b : r.sin_coeffs) b = -b;
    return r;
  }

  friend TrigPoly operator+(const TrigPoly& f, const TrigPoly& g) {
    TrigPoly r;
    int deg = std::max(f.degree(), g.degree());
    r.constant = f.constant + g.constant;
    r.cos_coeffs.resize(static_cast<std::size_t>(deg), 0.0);
    r.sin_coeffs.resize(static_cast<std::size_t>(deg), 0.0);
    for (int k = 1; k <= deg; ++k) {
      r.cos_coeffs[static_cast<std::size_t>(k - 1)] = f.cos_coeff(k) + g.cos_coeff(k);
      r.sin_coeffs[static_cast<std::size_t>(k - 1)] = f.sin_coeff(k) + g.sin_coeff(k);
    }
    return r;
  }

  friend TrigPoly operator-(const TrigPoly& f, const TrigPoly& g) { return f + (-g); }

  /** f(t + delta) as a trig polynomial (exact rotation of coefficients). */
  TrigPoly shifted(double delta) const {
    TrigPoly r = *this;
    int deg = degree();
    r.cos_coeffs.assign(static_cast<std::size_t>(deg), 0.0);
    r.sin_coeffs.assign(static_cast<std::size_t>(deg), 0.0);
    for (int k = 1; k <= deg; ++k) {
      double ang = kTwoPi * k * delta;
      double c = std::cos(ang), s = std::sin(ang);
      // a cos(x+d) + b sin(x+d) = (a c + b s) cos x + (b c - a s) sin x
      r.cos_coeffs[static_cast<std::size_t>(k - 1)] = cos_coeff(k) * c + sin_coeff(k) * s;
      r.sin_coeffs[static_cast<std::size_t>(k - 1)] = sin_coeff(k) * c - cos_coeff(k) * s;
    }
    return r;
  }

  /** f(-t): cosine part kept, sine part negated. */
  TrigPoly reflected() const {
    TrigPoly r = *this;
    for (double& b : r.sin_coeffs) b = -b;
    return r;
  }
};

/**
 * Uniform samples v_i = f(i/n) of a 1-periodic function with a declared
 * Lipschitz constant; evaluation is linear interpolation with wraparound.
 */
struct SampledFunction {
  std::vector<double> values;
  double lipschitz = 0.0;

  SampledFunction() = default;
  SampledFunction(std::vector<double> v, double lip)
      : values(std::move(v)), lipschitz(lip) {
    if (values.size() < 2)
      throw std::invalid_argument("SampledFunction: need at least 2 samples");
    if (!(lip >= 0.0))
      throw std::invalid_argument("SampledFunction: Lipschitz constant must be >= 0");
  }

  template <typename F>
  static SampledFunction from_function(F&& f, std::size_t n, double lip) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = f(static_cast<double>(i) / static_cast<double>(n));
    return SampledFunction(std::move(v), lip);
  }

  std::size_t size() const { return values.size(); }

  double eval(double t) const {
    const std::size_t n = values.size();
    double u = wrap_unit(t) * static_cast<double>(n);
    auto i = static_cast<std::size_t>(u);
    if (i >= n) i = n - 1;
    double frac = u - static_cast<double>(i);
    double a = values[i];
    double b = values[(i + 1) % n];
    return a + frac * (b - a);
  }

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }

  /** f(-t), exact on the grid (index reversal). */
  SampledFunction reflected() const {
    SampledFunction r = *this;
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) r.values[i] = values[(n - i) % n];
    return r;
  }
};

/** 1-periodic real function: either a trig polynomial or interpolated samples. */
class RealFunction {
 public:
  RealFunction() : rep_(TrigPoly{}) {}
  RealFunction(TrigPoly p) : rep_(std::move(p)) {}
  RealFunction(SampledFunction s) : rep_(std::move(s)) {}

  bool is_trig() const { return std::holds_alternative<TrigPoly>(rep_); }
  const TrigPoly& trig() const { return std::get<TrigPoly>(rep_); }
  const SampledFunction& samples() const { return std::get<SampledFunction>(rep_); }

  double eval(double t) const {
    return is_trig() ? trig().eval(t) : samples().eval(t);
  }

  double mean() const { return is_trig() ? trig().mean() : samples().mean(); }

  double lipschitz_bound() const {
    return is_trig() ? trig().lipschitz_bound() : samples().lipschitz;
  }

  RealFunction reflected() const {
    return is_trig() ? RealFunction(trig().reflected())
                     : RealFunction(samples().reflected());
  }

  RealFunction negated() const {
    if (is_trig()) return RealFunction(-trig());
    SampledFunction s = samples();
    for (double& v : s.values) v = -v;
    return RealFunction(std::move(s));
  }

 private:
  std::variant<TrigPoly, SampledFunction> rep_;
};

/** f - g, exact for trig pairs; otherwise resampled on the finer grid. */
inline RealFunction subtract(const RealFunction& f, const RealFunction& g) {
  if (f.is_trig() && g.is_trig()) return RealFunction(f.trig() - g.trig());
  std::size_t n = 1u << 12;
  if (!f.is_trig()) n = std::max(n, f.samples().size());
  if (!g.is_trig()) n = std::max(n, g.samples().size());
  auto diff = [&](double t) { return f.eval(t) - g.eval(t); };
  return RealFunction(SampledFunction::from_function(
      diff, n, f.lipschitz_bound() + g.lipschitz_bound()));
}

/**
 * Exact-on-the-grid trig evaluation: uses the shared table
 * cos(2 pi (k i mod N)/N), avoiding per-point trig calls.
 */
class TrigGridEvaluator {
 public:
  explicit TrigGridEvaluator(std::size_t n) : n_(n), cos_(n), sin_(n) {
    for (std::size_t i = 0; i < n; ++i) {
      double ang = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      cos_[i] = std::cos(ang);
      sin_[i] = std::sin(ang);
    }
  }

  std::size_t size() const { return n_; }

  std::vector<double> eval(const TrigPoly& f) const {
    std::vector<double> out(n_, f.constant);
    int deg = f.degree();
    for (int k = 1; k <= deg; ++k) {
      double a = f.cos_coeff(k), b = f.sin_coeff(k);
      if (a == 0.0 && b == 0.0) continue;
      std::size_t idx = 0;
      const auto step = static_cast<std::size_t>(k) % n_;
      for (std::size_t i = 0; i < n_; ++i) {
        out[i] += a * cos_[idx] + b * sin_[idx];
        idx += step;
        if (idx >= n_) idx -= n_;
      }
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<double> cos_, sin_;
};

struct FourierResult {
  TrigPoly poly;
  /** Jackson/Lebesgue sup bound on the truncation tail for the declared Lipschitz constant. */
  double tail_bound = 0.0;
};

/**
 * Leading Fourier data of uniformly sampled f: trapezoid-rule coefficients
 * a_k, b_k for k <= max_mode (exact for trig polynomials of degree < N/2).
 * Rejects max_mode >= N/2 (Nyquist).
 */
inline FourierResult fourier_coeffs(const SampledFunction& f, int max_mode) {
  const std::size_t n = f.values.size();
  if (max_mode < 0) throw std::invalid_argument("fourier_coeffs: max_mode < 0");
  if (2 * static_cast<std::size_t>(max_mode) >= n)
    throw std::invalid_argument("fourier_coeffs: max_mode must be < N/2");

  FourierResult r;
  r.poly.constant = f.mean();
  r.poly.cos_coeffs.assign(static_cast<std::size_t>(max_mode), 0.0);
  r.poly.sin_coeffs.assign(static_cast<std::size_t>(max_mode), 0.0);

  std::vector<double> cos_tab(n), sin_tab(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ang = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    cos_tab[i] = std::cos(ang);
    sin_tab[i] = std::sin(ang);
  }
  for (int k = 1; k <= max_mode; ++k) {
    double sa = 0.0, sb = 0.0;
    std::size_t idx = 0;
    const auto step = static_cast<std::size_t>(k) % n;
    for (std::size_t i = 0; i < n; ++i) {
      sa += f.values[i] * cos_tab[idx];
      sb += f.values[i] * sin_tab[idx];
      idx += step;
      if (idx >= n) idx -= n;
    }
    r.poly.cos_coeffs[static_cast<std::size_t>(k - 1)] = 2.0 * sa / static_cast<double>(n);
    r.poly.sin_coeffs[static_cast<std::size_t>(k - 1)] = 2.0 * sb / static_cast<double>(n);
  }

  // ||f - S_K f||_inf <= (4 + (4/pi^2) ln K) * pi L / (2 (K+1)), L = Lip(f).
  if (max_mode >= 1) {
    double lebesgue = 4.0 + (4.0 / (kPi * kPi)) * std::log(static_cast<double>(max_mode));
    r.tail_bound = lebesgue * kPi * f.lipschitz / (2.0 * (max_mode + 1));
  } else {
    r.tail_bound = kPi * f.lipschitz;
  }
  return r;
}

/**
 * Continuous circle map xi -> xi^degree * e^{2 pi i phase(xi)}, represented in
 * additive coordinates as x -> degree*x + phase(x) (mod 1).
 */
struct CircleValuedMap {
  std::int64_t degree = 0;
  RealFunction phase;

  CircleValuedMap() = default;
  CircleValuedMap(std::int64_t d, RealFunction p)
      : degree(d), phase(std::move(p)) {}

  /** Real lift at the real coordinate t (not folded). */
  double lift(double t) const {
    return static_cast<double>(degree) * t + phase.eval(t);
  }

  /**
   * Lift reduced mod 1.  Unlike wrapping lift() directly, this keeps roughly
   * 1 ulp of accuracy even when |degree| is large enough that degree*t has
   * rounding error far above the unit circle's resolution.
   */
  double folded_lift(double t) const { return frac_mul(degree, t) + phase.eval(t); }

  CirclePoint eval(CirclePoint p) const {
    return CirclePoint(folded_lift(p.value()));
  }

  double lipschitz_bound() const {
    return std::fabs(static_cast<double>(degree)) + phase.lipschitz_bound();
  }
};

}  // namespace torusconj
