#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torusconj/circle.hpp"
#include "torusconj/cocycle.hpp"
#include "torusconj/furstenberg.hpp"
#include "torusconj/rokhlin.hpp"
#include "torusconj/shear.hpp"
#include "torusconj/verify.hpp"

namespace torusconj {

inline constexpr double kRotationMatchTol = 1e-9;

struct ObstructionReport {
  double theta1 = 0.0, theta2 = 0.0;
  double rotation_gap_minus = 0.0;  // a = |e^{2 pi i (theta1 - theta2)} - 1|
  double rotation_gap_plus = 0.0;   // b = |e^{2 pi i (theta1 + theta2)} - 1|
  int d1 = 0, d2 = 0;
  bool rotation_compatible = false;  // theta1 == +-theta2 (mod 1) within 1e-9
  bool winding_compatible = false;   // |d1| == |d2|
  double slice_defect_min = 0.0;     // min over candidates of their xi=1 slice defect
  std::int64_t candidates = 0;
  std::uint64_t seed = 0;
};

class obstruction_error : public std::runtime_error {
 public:
  explicit obstruction_error(ObstructionReport r)
      : std::runtime_error(
            "maps are not approximately conjugate: rotation gaps (" +
            std::to_string(r.rotation_gap_minus) + ", " +
            std::to_string(r.rotation_gap_plus) + "), windings |" +
            std::to_string(r.d1) + "| vs |" + std::to_string(r.d2) + "|"),
        report_(std::move(r)) {}
  const ObstructionReport& report() const { return report_; }

 private:
  ObstructionReport report_;
};

/**
 * Rotation-number and winding obstructions, plus a constructive lower-bound
 * experiment: random candidate conjugacies (xi, zeta) ->
 * (xi^s g1(zeta), zeta^s' g2(xi)) between the degree-1 reduced maps all incur
 * a defect >= min(a, b) on the xi = 1 slice, because the first coordinate of
 * the defect there is exactly a (s = +1) or b (s = -1).
 */
inline ObstructionReport check_obstructions(const FurstenbergMap& alpha,
                                            const FurstenbergMap& beta,
                                            std::int64_t candidates = 1000,
                                            std::uint64_t seed = 0x0B57AC1Eull) {
  ObstructionReport rep;
  rep.theta1 = alpha.theta();
  rep.theta2 = beta.theta();
  rep.rotation_gap_minus = circle_dist(alpha.theta(), beta.theta());
  rep.rotation_gap_plus = circle_dist(alpha.theta(), wrap_unit(-beta.theta()));
  rep.d1 = alpha.degree();
  rep.d2 = beta.degree();
  rep.rotation_compatible =
      rz_norm(alpha.theta() - beta.theta()) <= kRotationMatchTol ||
      rz_norm(alpha.theta() + beta.theta()) <= kRotationMatchTol;
  rep.winding_compatible = std::abs(rep.d1) == std::abs(rep.d2);
  rep.candidates = candidates;
  rep.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-0.5, 0.5);
  std::uniform_int_distribution<int> deg(-2, 2);
  std::uniform_int_distribution<int> flip(0, 1);
  constexpr int kSliceSamples = 128;

  auto random_circle_map = [&]() {
    TrigPoly p;
    p.constant = coeff(rng);
    p.cos_coeffs.resize(4);
    p.sin_coeffs.resize(4);
    for (double& c : p.cos_coeffs) c = coeff(rng);
    for (double& s : p.sin_coeffs) s = coeff(rng);
    return CircleValuedMap(deg(rng), RealFunction(std::move(p)));
  };

  double slice_min = std::numeric_limits<double>::infinity();
  const double th1 = alpha.theta(), th2 = beta.theta();
  for (std::int64_t c = 0; c < candidates; ++c) {
    const int s = flip(rng) ? 1 : -1;
    const int sp = flip(rng) ? 1 : -1;
    CircleValuedMap g1 = random_circle_map();
    CircleValuedMap g2 = random_circle_map();

    // sigma(x, z) = (s x + G1(z), s' z + G2(x)) against Phi_{th1,1,0}, Phi_{th2,1,0}.
    double cand = 0.0;
    for (int i = 0; i < kSliceSamples; ++i) {
      double z = (i + 0.5) / kSliceSamples;
      // alpha(sigma(0, z)) vs sigma(beta(0, z)):
      double sx = g1.lift(z);                 // sigma base coord at x = 0
      double st = sp * z + g2.lift(0.0);      // sigma fiber coord at x = 0
      CirclePoint a_base(sx + th1);
      CirclePoint a_fib(st + sx);             // reduced map adds d*x = x
      CirclePoint b_base(s * th2 + g1.lift(z));
      CirclePoint b_fib(sp * z + g2.lift(th2));
      cand = std::max(cand, std::hypot(circle_dist(a_base, b_base),
                                       circle_dist(a_fib, b_fib)));
    }
    slice_min = std::min(slice_min, cand);
  }
  rep.slice_defect_min = candidates > 0 ? slice_min : 0.0;
  return rep;
}

struct ConjugacyResult {
  TorusTransform map;
  double sup_defect = 0.0;       // certified chordal bound, off discontinuity circles
  double defect_lipschitz = 0.0; // hint for independent grid certification
  std::vector<MeasureDefectSample> profile;
  double discontinuity_measure = 0.0;  // base measure of the surgered region
  std::int64_t discontinuity_count = 0;
  std::int64_t winding_k = 0;    // fiber-multiplier degree k*d when present
  bool exact_constant = true;
  double target_eps = 0.0;
};

namespace detail {

struct NormalizedPair {
  FurstenbergMap beta_aligned;     // beta conjugated by the flips below
  std::vector<ShearMap> flips_reversed;  // to append after the fiber stage
  double theta_mismatch = 0.0;     // residual ||theta1 -+ theta2||
};

/** Base-flip beta so the rotations agree (mod the 1e-9 tolerance). */
inline NormalizedPair align_rotation(const FurstenbergMap& alpha,
                                     const FurstenbergMap& beta) {
  if (rz_norm(alpha.theta() - beta.theta()) <= kRotationMatchTol)
    return {beta, {}, rz_norm(alpha.theta() - beta.theta())};
  if (rz_norm(alpha.theta() + beta.theta()) <= kRotationMatchTol) {
    FlipConjugacy fc = flip_base(beta);
    return {fc.map, {fc.flip}, rz_norm(alpha.theta() + beta.theta())};
  }
  ObstructionReport rep = check_obstructions(alpha, beta, 0);
  throw obstruction_error(std::move(rep));
}

struct M2Core {
  PiecewiseCircleMap omega;
  CocycleBuildStats stats;
  NormalizedPair aligned;
  RokhlinTower tower;
};

inline M2Core m2_core(const FurstenbergMap& alpha, const FurstenbergMap& beta,
                      double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("build conjugacy: eps must be > 0");
  // No winding condition here: the tower smoothing absorbs the full cocycle
  // difference, including a degree mismatch (only the rotations must match).
  NormalizedPair aligned = align_rotation(alpha, beta);
  // Chordal defect <= 2 sin(pi |kappa|/h) <= 2 pi / min h; pick min h ~ 2.4 pi/eps.
  auto n = static_cast<std::int64_t>(std::ceil(kTwoPi * 1.2 / eps));
  n = std::max<std::int64_t>(n, 4);
  RokhlinTower tower = build_tower(alpha.theta(), n);
  CocycleBuildStats stats;
  PiecewiseCircleMap omega = build_omega(tower, alpha.fiber_map(),
                                         aligned.beta_aligned.fiber_map(), &stats);
  return {std::move(omega), stats, std::move(aligned), std::move(tower)};
}

inline TorusTransform with_flips(ShearMap fiber_stage,
                                 const std::vector<ShearMap>& flips_reversed) {
  TorusTransform t;
  t.push(std::move(fiber_stage));
  for (auto it = flips_reversed.rbegin(); it != flips_reversed.rend(); ++it)
    t.push(*it);
  return t;
}

}  // namespace detail

/**
 * Measure-preserving sigma with sup dist(sigma(alpha p), beta(sigma p)) <= eps
 * away from finitely many discontinuity circles: a fiber shear by the transfer
 * function of the cocycle difference over a Rokhlin tower of height ~ 2.4pi/eps
 * (composed with a base flip when theta1 == -theta2 mod 1).
 */
inline ConjugacyResult build_m2_conjugacy(const FurstenbergMap& alpha,
                                          const FurstenbergMap& beta, double eps) {
  detail::M2Core core = detail::m2_core(alpha, beta, eps);
  ConjugacyResult res;
  res.discontinuity_count =
      static_cast<std::int64_t>(core.omega.discontinuities().size());
  res.map = detail::with_flips(ShearMap::fiber_shear(std::move(core.omega), -1),
                               core.aligned.flips_reversed);
  res.sup_defect =
      core.stats.chordal_defect_bound + kTwoPi * core.aligned.theta_mismatch;
  res.defect_lipschitz = core.stats.defect_lipschitz;
  res.discontinuity_measure = 0.0;  // circles are null sets
  res.target_eps = eps;
  if (res.sup_defect > eps)
    throw std::runtime_error("build_m2_conjugacy: certificate " +
                             std::to_string(res.sup_defect) +
                             " does not clear eps");
  return res;
}

/**
 * Continuous version: the m2 shear is surgered on a union G of intervals of
 * total measure <= eps/4 around its discontinuity points, interpolating the
 * lift linearly across each gap. The result is continuous everywhere and
 * satisfies the defect bound off G ∪ (G - theta) (measure <= eps/2); the
 * profile records the Monte-Carlo measure of {defect >= eps}.
 */
inline ConjugacyResult build_m1_conjugacy(const FurstenbergMap& alpha,
                                          const FurstenbergMap& beta, double eps,
                                          std::int64_t samples = 1000000,
                                          std::uint64_t seed = 0x5EED5EEDull) {
  detail::M2Core core = detail::m2_core(alpha, beta, eps);
  const PiecewiseCircleMap& omega = core.omega;

  std::vector<double> cuts;
  for (const CirclePoint& p : omega.discontinuities()) cuts.push_back(p.value());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto dcount = static_cast<std::int64_t>(cuts.size());
  if (dcount == 0) throw std::logic_error("build_m1_conjugacy: no pieces");

  double min_gap = 1.0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    double next = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts[0] + 1.0;
    min_gap = std::min(min_gap, next - cuts[i]);
  }
  const double radius =
      std::min(eps / (8.0 * static_cast<double>(dcount)), 0.25 * min_gap);

  // Piece starting at cuts[i] spans to cuts[i+1]; trim radius off both ends
  // and bridge each gap with a linear lift through the shortest fiber path.
  std::vector<CirclePiece> pieces;
  const auto& orig = omega.pieces();
  std::vector<const CirclePiece*> by_start(cuts.size(), nullptr);
  for (const auto& p : orig) {
    auto it = std::lower_bound(cuts.begin(), cuts.end(),
                               p.arc.start.value() - 1e-12);
    std::size_t idx = static_cast<std::size_t>(it - cuts.begin()) % cuts.size();
    by_start[idx] = &p;
  }
  for (const auto* p : by_start)
    if (p == nullptr)
      throw std::logic_error("build_m1_conjugacy: cut without matching piece");

  double junction_worst = 0.0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const CirclePiece& cur = *by_start[i];
    const CirclePiece& prev = *by_start[(i + cuts.size() - 1) % cuts.size()];
    // Trimmed interior of the current piece.
    double len = cur.arc.length - 2.0 * radius;
    CirclePiece trimmed;
    trimmed.arc = Arc(CirclePoint(cuts[i] + radius), len);
    trimmed.lip_bound = cur.lip_bound;
    auto lift = cur.lift;
    trimmed.lift = [lift, radius](double off) { return lift(off + radius); };
    // Gap piece centred on cuts[i], joining prev's right limit to cur's left.
    double left_val = prev.lift(prev.arc.length - radius);
    double right_val = cur.lift(radius);
    double delta = centered_unit(right_val - left_val);
    CirclePiece gap;
    gap.arc = Arc(CirclePoint(cuts[i] - radius), 2.0 * radius);
    gap.lift = [left_val, delta, radius](double off) {
      return left_val + delta * (off / (2.0 * radius));
    };
    gap.lip_bound = std::fabs(delta) / (2.0 * radius);
    junction_worst = std::max(
        junction_worst, rz_norm((left_val + delta) - right_val));
    pieces.push_back(std::move(gap));
    pieces.push_back(std::move(trimmed));
  }
  if (junction_worst > 1e-9)
    throw std::logic_error("build_m1_conjugacy: junction mismatch " +
                           std::to_string(junction_worst));

  PiecewiseCircleMap omega0(std::move(pieces), {});

  ConjugacyResult res;
  res.map = detail::with_flips(ShearMap::fiber_shear(std::move(omega0), -1),
                               core.aligned.flips_reversed);
  res.sup_defect =
      core.stats.chordal_defect_bound + kTwoPi * core.aligned.theta_mismatch;
  res.defect_lipschitz = core.stats.defect_lipschitz;
  res.discontinuity_measure = 2.0 * radius * static_cast<double>(dcount);
  res.discontinuity_count = 0;  // continuous by construction
  res.target_eps = eps;
  res.profile = measure_defect_profile(res.map, alpha, beta,
                                       {0.25 * eps, 0.5 * eps, eps}, samples, seed);
  return res;
}

/**
 * Exact conjugacy when f1 - f2 = m1 theta + m2 + (trig part) lies in the
 * solvable class: sigma is the fiber multiplier xi^{k d} e^{2 pi i g0} with
 * k = -m1/d and g0 the exact Fourier transfer function. Residuals are
 * certified at the coefficient level. Requires alpha, beta to share theta and
 * d; when d does not divide m1 the constant is matched approximately instead
 * and the result is flagged (exact_constant = false).
 */
inline ConjugacyResult build_exact_conjugacy(const FurstenbergMap& alpha,
                                             const FurstenbergMap& beta) {
  if (rz_norm(alpha.theta() - beta.theta()) > 1e-12)
    throw std::invalid_argument("build_exact_conjugacy: maps must share theta");
  if (alpha.degree() != beta.degree())
    throw std::invalid_argument("build_exact_conjugacy: maps must share d");
  const double theta = alpha.theta();
  const int d = alpha.degree();

  RealFunction diff_rf = subtract(alpha.fiber_phase(), beta.fiber_phase());
  TrigPoly diff;
  if (diff_rf.is_trig()) {
    diff = diff_rf.trig();
  } else {
    auto max_mode = static_cast<int>(
        std::min<std::size_t>(256, diff_rf.samples().size() / 2 - 1));
    FourierResult fr = fourier_coeffs(diff_rf.samples(), max_mode);
    if (fr.tail_bound > 1e-9)
      throw std::invalid_argument(
          "build_exact_conjugacy: f1 - f2 is not resolvably trigonometric; "
          "use build_m2_conjugacy for an approximate conjugacy");
    diff = fr.poly;
  }

  // Constant part c = m1 theta + m2 with integer m1, m2 (to 1e-9).
  std::int64_t m1 = 0;
  try {
    m1 = detail::lattice_approx(diff.constant, theta, 1e-9);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument(
        "build_exact_conjugacy: constant of f1 - f2 is not on the theta "
        "lattice; use build_m2_conjugacy for an approximate conjugacy");
  }

  std::int64_t k = 0;
  bool exact_const = (m1 % d == 0);
  if (exact_const) {
    k = -m1 / d;
  } else {
    double tol = 1e-11;
    for (;; tol *= 10.0) {
      if (tol > 1e-6)
        throw std::runtime_error("build_exact_conjugacy: constant fallback failed");
      try {
        k = detail::lattice_approx(-diff.constant, wrap_unit(d * theta), tol);
        break;
      } catch (const std::runtime_error&) {
      }
    }
  }

  TrigPoly p = diff;
  p.constant = 0.0;
  TrigPoly g0 = solve_coboundary_exact(p, theta);

  const std::int64_t kd = k * d;
  const double const_gap = rz_norm(diff.constant + frac_mul(kd, theta));

  // Coefficient-level residual of p - (g0 - g0(. + theta)).
  double mode_residual = 0.0;
  for (int m = 1; m <= g0.degree(); ++m) {
    std::complex<double> gm(0.5 * g0.cos_coeff(m), -0.5 * g0.sin_coeff(m));
    std::complex<double> pm(0.5 * p.cos_coeff(m), -0.5 * p.sin_coeff(m));
    std::complex<double> w = 1.0 - detail::unit(frac_mul(m, theta));
    mode_residual += 2.0 * std::abs(gm * w - pm);
  }

  ConjugacyResult res;
  res.map = TorusTransform(
      {ShearMap::fiber_multiplier(CircleValuedMap(kd, RealFunction(g0)))});
  res.sup_defect = kTwoPi * (const_gap + mode_residual) + 1e-14;
  res.defect_lipschitz =
      kTwoPi * (diff.lipschitz_bound() + 2.0 * g0.lipschitz_bound());
  res.winding_k = kd;
  res.exact_constant = exact_const;
  res.target_eps = 0.0;
  return res;
}

/**
 * Sequence of shear conjugacies realizing defects below a decreasing schedule
 * between maps satisfying the compatibility condition theta1 == +-theta2 and
 * |d1| == |d2| (after base/fiber flip normalization). Each entry's fiber
 * multiplier winds k*d times, recording the homotopy correction.
 */
inline std::vector<ConjugacyResult> build_k_conjugacy_sequence(
    const FurstenbergMap& alpha, const FurstenbergMap& beta,
    const std::vector<double>& schedule) {
  if (schedule.empty())
    throw std::invalid_argument("build_k_conjugacy_sequence: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0))
      throw std::invalid_argument("build_k_conjugacy_sequence: eps must be > 0");
    if (i > 0 && !(schedule[i] < schedule[i - 1]))
      throw std::invalid_argument(
          "build_k_conjugacy_sequence: schedule must decrease strictly");
  }
  if (std::abs(alpha.degree()) != std::abs(beta.degree())) {
    ObstructionReport rep = check_obstructions(alpha, beta, 0);
    throw obstruction_error(std::move(rep));
  }

  detail::NormalizedPair aligned = detail::align_rotation(alpha, beta);
  FurstenbergMap work = aligned.beta_aligned;
  std::vector<ShearMap> flips = aligned.flips_reversed;
  if (work.degree() != alpha.degree()) {
    FlipConjugacy fc = flip_fiber(work);
    work = fc.map;
    flips.push_back(fc.flip);
  }

  std::vector<ConjugacyResult> out;
  out.reserve(schedule.size());
  RealFunction fdiff = subtract(work.fiber_phase(), alpha.fiber_phase());
  for (double eps : schedule) {
    WindingCoboundary wc =
        approx_coboundary_with_winding(fdiff, alpha.theta(), alpha.degree(), eps);
    ConjugacyResult res;
    const auto kd = wc.k * static_cast<std::int64_t>(alpha.degree());
    res.map = detail::with_flips(
        ShearMap::fiber_multiplier(CircleValuedMap(kd, RealFunction(wc.g0))),
        flips);
    res.sup_defect = wc.cert.achieved_sup + kTwoPi * aligned.theta_mismatch;
    res.defect_lipschitz =
        kTwoPi * (fdiff.lipschitz_bound() + 2.0 * wc.g0.lipschitz_bound());
    res.winding_k = kd;
    res.target_eps = eps;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace torusconj
