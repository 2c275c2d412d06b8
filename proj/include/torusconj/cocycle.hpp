#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torusconj/circle.hpp"
#include "torusconj/piecewise.hpp"
#include "torusconj/rokhlin.hpp"
#include "torusconj/trig.hpp"

namespace torusconj {

class small_denominator_error : public std::runtime_error {
 public:
  small_denominator_error(int mode, double denom)
      : std::runtime_error("coboundary: denominator |1 - e^{2 pi i m theta}| = " +
                           std::to_string(denom) + " at mode m = " +
                           std::to_string(mode) + " below guard 1e-13"),
        mode_(mode), denom_(denom) {}
  int mode() const { return mode_; }
  double denom() const { return denom_; }

 private:
  int mode_;
  double denom_;
};

namespace detail {

inline std::complex<double> unit(double frac_angle) {
  double ang = kTwoPi * frac_angle;
  return {std::cos(ang), std::sin(ang)};
}

/** D_j(k theta) = sum_{l<j} e^{2 pi i l k theta}, folded arguments. */
inline std::complex<double> dirichlet(std::int64_t j, std::int64_t k, double theta) {
  if (j == 0) return {0.0, 0.0};
  std::complex<double> den = unit(frac_mul(k, theta)) - 1.0;
  if (std::abs(den) < 1e-15) return {static_cast<double>(j), 0.0};
  std::complex<double> num = unit(frac_mul(j * k, theta)) - 1.0;
  return num / den;
}

/** Trig modes of f1 - f2 as complex c_k = a_k - i b_k, k = 1..K (zeros dropped). */
struct DriftModes {
  std::vector<int> k;
  std::vector<std::complex<double>> c;

  static DriftModes from(const TrigPoly& diff) {
    DriftModes m;
    for (int kk = 1; kk <= diff.degree(); ++kk) {
      double a = diff.cos_coeff(kk), b = diff.sin_coeff(kk);
      if (a != 0.0 || b != 0.0) {
        m.k.push_back(kk);
        m.c.emplace_back(a, -b);
      }
    }
    return m;
  }
};

}  // namespace detail

/** Lifted cocycle difference summed along one tower column. */
struct KappaColumn {
  Arc base;
  std::int64_t height = 0;
  /** kappa at base offset off in [0, base.length): true Birkhoff sum (real lift). */
  std::function<double(double)> lift;
  double lipschitz_bound = 0.0;
};

/**
 * Per-column Birkhoff sums kappa(x0) = sum_{j<h} [(dF-dG)(x0+j theta)
 * + fF(x0+j theta) - fG(x0+j theta)] of the lifted fiber difference of two
 * circle-valued maps over the tower's rotation. Trig phases use closed-form
 * geometric mode sums; sampled phases fall back to direct orbit summation.
 */
inline std::vector<KappaColumn> kappa_sums(const RokhlinTower& tower,
                                           const CircleValuedMap& F,
                                           const CircleValuedMap& G) {
  const double theta = tower.theta();
  const double dd = static_cast<double>(F.degree - G.degree);
  const bool fast = F.phase.is_trig() && G.phase.is_trig();

  std::vector<KappaColumn> out;
  out.reserve(tower.columns().size());
  for (const TowerColumn& col : tower.columns()) {
    const double s0 = col.base.start.value();
    const std::int64_t h = col.height;
    KappaColumn kc;
    kc.base = col.base;
    kc.height = h;
    if (fast) {
      TrigPoly diff = F.phase.trig() - G.phase.trig();
      auto modes = detail::DriftModes::from(diff);
      std::vector<std::complex<double>> cmode(modes.k.size());
      double trig_lip = 0.0;
      for (std::size_t i = 0; i < modes.k.size(); ++i) {
        cmode[i] = modes.c[i] * detail::dirichlet(h, modes.k[i], theta);
        trig_lip += kTwoPi * modes.k[i] * std::abs(cmode[i]);
      }
      const double const_part =
          diff.constant * static_cast<double>(h) +
          dd * (static_cast<double>(h) * s0 +
                theta * 0.5 * static_cast<double>(h) * static_cast<double>(h - 1));
      std::vector<int> ks = modes.k;
      kc.lift = [=](double off) {
        double v = const_part + dd * static_cast<double>(h) * off;
        for (std::size_t i = 0; i < ks.size(); ++i) {
          auto e = detail::unit(wrap_unit(ks[i] * (s0 + off)));
          v += (cmode[i] * e).real();
        }
        return v;
      };
      kc.lipschitz_bound = std::fabs(dd) * static_cast<double>(h) + trig_lip;
    } else {
      RealFunction fF = F.phase, fG = G.phase;
      kc.lift = [=](double off) {
        double v = 0.0;
        double x = s0 + off;
        for (std::int64_t j = 0; j < h; ++j) {
          double y = x + static_cast<double>(j) * theta;
          v += dd * y + fF.eval(y) - fG.eval(y);
        }
        return v;
      };
      kc.lipschitz_bound =
          static_cast<double>(h) *
          (std::fabs(dd) + fF.lipschitz_bound() + fG.lipschitz_bound());
    }
    out.push_back(std::move(kc));
  }
  return out;
}

struct CocycleBuildStats {
  double kappa_sup = 0.0;           // certified sup |kappa tilde| over all cells
  double rz_defect_bound = 0.0;     // sup_y ||[F+omega]-[omega.alpha+G]||_{R/Z}
  double chordal_defect_bound = 0.0;
  double defect_lipschitz = 0.0;    // Lipschitz bound of x -> chordal defect(x)
  std::size_t pieces = 0;
  std::size_t max_subdivision = 0;  // largest per-column cell count
};

namespace detail {

struct OmegaSubarc {
  double lo = 0.0, len = 0.0;  // offsets within the column base arc
  double branch = 0.0;         // integer window constant for kappa tilde
  double kappa_sup = 0.0;      // certified sup |kappa tilde|
};

/** Folded-lift evaluator for one column: values continuous mod 1 in off. */
struct ColumnEval {
  double theta = 0.0, s0 = 0.0, dd = 0.0, fconst = 0.0;
  std::int64_t h = 0;
  bool fast = true;
  std::vector<int> ks;
  std::vector<std::complex<double>> cmode;  // (a - ib) D_h(k theta)
  RealFunction fF, fG;  // slow path

  /** Birkhoff sum S_j at absolute base offset off (within [0, L)), folded mod 1
      up to a per-(j) constant integer; continuous in off. */
  double partial(std::int64_t j, double off) const {
    if (j == 0) return 0.0;
    if (fast) {
      double lin =
          wrap_unit(fconst * static_cast<double>(j) +
                    dd * (static_cast<double>(j) * s0 +
                          theta * 0.5 * static_cast<double>(j) *
                              static_cast<double>(j - 1))) +
          dd * static_cast<double>(j) * off;
      double v = lin;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        auto dj = dirichlet(j, ks[i], theta);
        auto e = unit(wrap_unit(ks[i] * (s0 + off)));
        v += (cmode_raw(i) * dj * e).real();
      }
      return v;
    }
    double v = 0.0;
    double x = s0 + off;
    for (std::int64_t l = 0; l < j; ++l) {
      double y = x + static_cast<double>(l) * theta;
      v += dd * y + fF.eval(y) - fG.eval(y);
    }
    return v;
  }

  std::complex<double> cmode_raw(std::size_t i) const { return raw_c[i]; }
  std::vector<std::complex<double>> raw_c;  // a - ib per mode

  double kappa(double off) const {
    if (fast) {
      double lin =
          wrap_unit(fconst * static_cast<double>(h) +
                    dd * (static_cast<double>(h) * s0 +
                          theta * 0.5 * static_cast<double>(h) *
                              static_cast<double>(h - 1))) +
          dd * static_cast<double>(h) * off;
      double v = lin;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        auto e = unit(wrap_unit(ks[i] * (s0 + off)));
        v += (cmode[i] * e).real();
      }
      return v;
    }
    return partial(h, off);
  }

  double kappa_lipschitz() const {
    if (fast) {
      double lip = std::fabs(dd) * static_cast<double>(h);
      for (std::size_t i = 0; i < ks.size(); ++i)
        lip += kTwoPi * ks[i] * std::abs(cmode[i]);
      return lip;
    }
    return static_cast<double>(h) *
           (std::fabs(dd) + fF.lipschitz_bound() + fG.lipschitz_bound());
  }

  double partial_lipschitz(std::int64_t j) const {
    if (fast) {
      double lip = std::fabs(dd) * static_cast<double>(j);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        auto dj = dirichlet(j, ks[i], theta);
        lip += kTwoPi * ks[i] * std::abs(raw_c[i] * dj);
      }
      return lip;
    }
    return static_cast<double>(j) *
           (std::fabs(dd) + fF.lipschitz_bound() + fG.lipschitz_bound());
  }
};

}  // namespace detail

/**
 * Transfer function for cocycle smoothing over a Rokhlin tower:
 * omega vanishes on the tower base and on the level-j translate of a base
 * cell equals -(j/h) kappa~ + sum_{l<j}[F - G]_lift, where kappa~ is kappa
 * recentred by an integer chosen per cell so |kappa~| < 1 (cells are bisected
 * until the certified oscillation of kappa is < 0.98; cap 1024 cells per
 * column). The R/Z defect ||[F + omega] - [omega . R_theta + G]|| then equals
 * |kappa~|/h at every level, certifying the bound reported in stats.
 */
inline PiecewiseCircleMap build_omega(const RokhlinTower& tower,
                                      const CircleValuedMap& F,
                                      const CircleValuedMap& G,
                                      CocycleBuildStats* stats = nullptr) {
  constexpr double kOscTarget = 0.98;
  constexpr int kOscSamples = 33;
  constexpr std::size_t kMaxCells = 1024;
  const double theta = tower.theta();
  const bool fast = F.phase.is_trig() && G.phase.is_trig();

  CocycleBuildStats st;
  std::vector<CirclePiece> pieces;
  std::vector<CirclePoint> disc;

  for (const TowerColumn& col : tower.columns()) {
    auto ev = std::make_shared<detail::ColumnEval>();
    ev->theta = theta;
    ev->s0 = col.base.start.value();
    ev->dd = static_cast<double>(F.degree - G.degree);
    ev->h = col.height;
    ev->fast = fast;
    if (fast) {
      TrigPoly diff = F.phase.trig() - G.phase.trig();
      ev->fconst = diff.constant;
      auto modes = detail::DriftModes::from(diff);
      ev->ks = modes.k;
      ev->raw_c = modes.c;
      ev->cmode.resize(modes.k.size());
      for (std::size_t i = 0; i < modes.k.size(); ++i)
        ev->cmode[i] = modes.c[i] * detail::dirichlet(ev->h, modes.k[i], theta);
    } else {
      ev->fF = F.phase;
      ev->fG = G.phase;
      ev->fconst = 0.0;
    }

    const double kappa_lip = ev->kappa_lipschitz();
    const double L = col.base.length;

    // Bisect base cells until the certified oscillation of kappa is < 1.
    std::vector<std::pair<double, double>> work{{0.0, L}};
    std::vector<detail::OmegaSubarc> cells;
    while (!work.empty()) {
      auto [lo, hi] = work.back();
      work.pop_back();
      double spacing = (hi - lo) / (kOscSamples - 1);
      double mn = 0.0, mx = 0.0;
      for (int s = 0; s < kOscSamples; ++s) {
        double v = ev->kappa(std::min(lo + s * spacing, std::nextafter(hi, lo)));
        if (s == 0) { mn = mx = v; }
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      double pad = 0.5 * kappa_lip * spacing;
      double cert_lo = mn - pad, cert_hi = mx + pad;
      if (cert_hi - cert_lo < kOscTarget) {
        detail::OmegaSubarc cell;
        cell.lo = lo;
        cell.len = hi - lo;
        cell.branch = std::nearbyint(0.5 * (cert_lo + cert_hi));
        cell.kappa_sup = std::max(cert_hi - cell.branch, cell.branch - cert_lo);
        cells.push_back(cell);
      } else {
        if (cells.size() + work.size() + 2 > kMaxCells)
          throw std::runtime_error(
              "build_omega: cell cap exceeded while controlling kappa oscillation");
        double mid = 0.5 * (lo + hi);
        work.emplace_back(lo, mid);
        work.emplace_back(mid, hi);
      }
    }
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.lo < b.lo; });
    st.max_subdivision = std::max(st.max_subdivision, cells.size());

    double col_sup = 0.0;
    for (const auto& c : cells) col_sup = std::max(col_sup, c.kappa_sup);
    st.kappa_sup = std::max(st.kappa_sup, col_sup);
    st.rz_defect_bound =
        std::max(st.rz_defect_bound, col_sup / static_cast<double>(ev->h));
    st.defect_lipschitz = std::max(
        st.defect_lipschitz, kTwoPi * kappa_lip / static_cast<double>(ev->h));

    for (const auto& cell : cells) {
      for (std::int64_t j = 0; j < ev->h; ++j) {
        Arc arc(CirclePoint(ev->s0 + cell.lo + frac_mul(j, theta)), cell.len);
        CirclePiece piece;
        piece.arc = arc;
        if (j == 0) {
          piece.lift = [](double) { return 0.0; };
          piece.lip_bound = 0.0;
        } else {
          double jh = static_cast<double>(j) / static_cast<double>(ev->h);
          double base_lo = cell.lo;
          double branch = cell.branch;
          std::int64_t jj = j;
          piece.lift = [ev, jh, base_lo, branch, jj](double off) {
            double k = ev->kappa(base_lo + off) - branch;
            return -jh * k + ev->partial(jj, base_lo + off);
          };
          piece.lip_bound = jh * kappa_lip + ev->partial_lipschitz(j);
        }
        disc.push_back(piece.arc.start);
        pieces.push_back(std::move(piece));
      }
    }
  }

  st.rz_defect_bound += 1e-9;  // float slack on sampling certificates
  st.chordal_defect_bound =
      2.0 * std::sin(kPi * std::min(0.5, st.rz_defect_bound));
  st.pieces = pieces.size();
  if (stats) *stats = st;
  return PiecewiseCircleMap(std::move(pieces), std::move(disc));
}

/**
 * Exact Fourier solution g of f(t) = g(t) - g(t + theta) for mean-zero trig f:
 * g_m = f_m / (1 - e^{2 pi i m theta}), g_0 = 0. Denominators below 1e-13
 * raise small_denominator_error naming the offending mode.
 */
inline TrigPoly solve_coboundary_exact(const TrigPoly& f, double theta) {
  convergents(theta, 1);  // reject theta outside (0,1) or indistinguishable from 0/1
  if (std::fabs(f.constant) > 1e-12)
    throw std::invalid_argument("solve_coboundary_exact: f must have zero mean");

  TrigPoly g;
  g.constant = 0.0;
  int deg = f.degree();
  g.cos_coeffs.assign(static_cast<std::size_t>(deg), 0.0);
  g.sin_coeffs.assign(static_cast<std::size_t>(deg), 0.0);
  for (int m = 1; m <= deg; ++m) {
    std::complex<double> c(0.5 * f.cos_coeff(m), -0.5 * f.sin_coeff(m));
    if (c == std::complex<double>(0.0, 0.0)) continue;
    std::complex<double> w = 1.0 - detail::unit(frac_mul(m, theta));
    if (std::abs(w) <= 1e-13) throw small_denominator_error(m, std::abs(w));
    std::complex<double> gm = c / w;
    g.cos_coeffs[static_cast<std::size_t>(m - 1)] = 2.0 * gm.real();
    g.sin_coeffs[static_cast<std::size_t>(m - 1)] = -2.0 * gm.imag();
  }
  return g;
}

struct CoboundaryCertificate {
  double target_eps = 0.0;
  double achieved_sup = 0.0;   // certified sup of the chordal multiplicative defect
  std::int64_t grid = 0;       // residual grid resolution
  std::int64_t winding_k = 0;  // the winding correction k
  double constant_gap = 0.0;   // ||mean(f) - k d theta||_{R/Z}
  double tail_bound = 0.0;     // truncation tail for sampled inputs (0 for trig)
};

struct WindingCoboundary {
  std::int64_t k = 0;
  TrigPoly g0;
  CoboundaryCertificate cert;
};

namespace detail {

/** Longest convergent prefix computable before the tail of the double looks rational. */
inline std::vector<RationalApprox> convergents_best_effort(double alpha, int depth) {
  for (int d = depth; d >= 1; --d) {
    try {
      return convergents(alpha, d);
    } catch (const rational_rotation_error&) {
      if (d == 1) throw;  // alpha itself is (near-)rational
    }
  }
  return {};
}

/**
 * Greedy Ostrowski descent: integer k with ||target - k alpha||_{R/Z} <= tol,
 * built from denominators of alpha's convergents (small |k| first).
 */
inline std::int64_t lattice_approx(double target, double alpha, double tol) {
  double r = centered_unit(target);
  std::int64_t k = 0;
  if (std::fabs(r) <= tol) return k;
  auto cs = convergents_best_effort(alpha, 48);
  for (const auto& c : cs) {
    double eta = static_cast<double>(c.q) * alpha - static_cast<double>(c.p);
    if (eta == 0.0) break;
    auto m = static_cast<std::int64_t>(std::nearbyint(r / eta));
    r -= static_cast<double>(m) * eta;
    k += m * c.q;
    if (std::fabs(r) <= tol) return k;
  }
  if (std::fabs(r) <= tol) return k;
  throw std::runtime_error(
      "lattice_approx: cannot reach tolerance within convergent depth");
}

}  // namespace detail

/**
 * Winding-corrected approximate coboundary: integer k and trig g0 such that
 * g(xi) = xi^{k d} e^{2 pi i g0(xi)} satisfies
 * |e^{2 pi i f(x)} g(x) conj(g(x + theta)) - 1| < eps, certified on a 2^14
 * grid with Lipschitz inflation. The constant of f is matched on the
 * {k d theta} lattice to ||.|| <= eps/(8 pi^2); the oscillating part is solved
 * exactly in Fourier space (sampled inputs are truncated first, tail in cert).
 */
inline WindingCoboundary approx_coboundary_with_winding(const RealFunction& f,
                                                        double theta, int d,
                                                        double eps) {
  if (d == 0) throw std::invalid_argument("approx_coboundary: d must be nonzero");
  if (!(eps > 0.0)) throw std::invalid_argument("approx_coboundary: eps must be > 0");
  convergents(theta, 12);

  const double a = f.mean();
  TrigPoly f0;  // mean-zero oscillating part
  double tail = 0.0;
  if (f.is_trig()) {
    f0 = f.trig();
    f0.constant = 0.0;
  } else {
    const double tail_budget = eps / (8.0 * kPi);
    int max_mode = 4;
    const int cap = 1 << 8;
    FourierResult fr;
    for (;; max_mode *= 2) {
      if (max_mode > cap ||
          2 * static_cast<std::size_t>(max_mode) >= f.samples().size())
        throw std::runtime_error(
            "approx_coboundary: cannot meet tail budget within mode cap 2^8");
      fr = fourier_coeffs(f.samples(), max_mode);
      if (fr.tail_bound <= tail_budget) break;
    }
    f0 = fr.poly;
    f0.constant = 0.0;
    tail = fr.tail_bound;
  }

  const double alpha = wrap_unit(static_cast<double>(d) * theta);
  const double ktol = eps / (8.0 * kPi * kPi);
  const std::int64_t k = detail::lattice_approx(a, alpha, ktol);

  // f0 = g0(. + theta) - g0 <=> -f0 = g0 - g0(. + theta).
  TrigPoly g0 = solve_coboundary_exact(-f0, theta);

  const std::int64_t kd = k * static_cast<std::int64_t>(d);
  const double kd_theta = frac_mul(kd, theta);
  const double const_gap = rz_norm(a - kd_theta);

  // Certify |e^{2 pi i phase} - 1| on the grid; phase = f - k d theta + g0 - g0(.+theta).
  const std::int64_t grid_n = 1 << 14;
  TrigPoly g0_shift = g0.shifted(theta);
  double raw = 0.0;
  if (f.is_trig()) {
    TrigGridEvaluator grid(static_cast<std::size_t>(grid_n));
    TrigPoly full = f.trig() + g0 - g0_shift;
    std::vector<double> vals = grid.eval(full);
    for (double v : vals)
      raw = std::max(raw, 2.0 * std::fabs(std::sin(kPi * (v - kd_theta))));
  } else {
    for (std::int64_t i = 0; i < grid_n; ++i) {
      double t = static_cast<double>(i) / static_cast<double>(grid_n);
      double phase = f.eval(t) - kd_theta + g0.eval(t) - g0.eval(t + theta);
      raw = std::max(raw, 2.0 * std::fabs(std::sin(kPi * phase)));
    }
  }
  const double phase_lip = f.lipschitz_bound() + 2.0 * g0.lipschitz_bound();
  const double inflation = kPi * phase_lip / static_cast<double>(grid_n);

  CoboundaryCertificate cert;
  cert.target_eps = eps;
  cert.achieved_sup = raw + inflation + 1e-12;
  cert.grid = grid_n;
  cert.winding_k = k;
  cert.constant_gap = const_gap;
  cert.tail_bound = tail;
  if (cert.achieved_sup >= eps)
    throw std::runtime_error(
        "approx_coboundary: certificate " + std::to_string(cert.achieved_sup) +
        " does not clear eps = " + std::to_string(eps));

  // The corrected map xi^{k d} e^{2 pi i g0} must wind exactly k*d times.
  {
    auto n = static_cast<std::int64_t>(
        std::max<std::int64_t>(4096, 8 * (std::llabs(kd) + 16 * g0.degree())));
    std::vector<CirclePoint> samples;
    samples.reserve(static_cast<std::size_t>(n));
    CircleValuedMap g(kd, RealFunction(g0));
    for (std::int64_t i = 0; i < n; ++i)
      samples.push_back(g.eval(CirclePoint(static_cast<double>(i) / n)));
    if (winding_number(samples) != kd)
      throw std::runtime_error("approx_coboundary: winding check failed");
  }

  return {k, std::move(g0), cert};
}

}  // namespace torusconj
