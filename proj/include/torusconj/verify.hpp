#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "torusconj/circle.hpp"
#include "torusconj/furstenberg.hpp"
#include "torusconj/shear.hpp"

namespace torusconj {

struct DefectReport {
  std::int64_t grid = 0;          // requested grid resolution per axis
  std::int64_t columns = 0;       // base columns actually swept
  double raw_grid_sup = 0.0;      // measured sup of dist(sigma(alpha p), beta(sigma p))
  double lipschitz_inflation = 0.0;
  double certified_sup = 0.0;     // raw + inflation, valid off discontinuity circles
};

namespace detail {

/**
 * Conjugacy defect over the base point x. Every composed transform here is
 * fiber-affine with a global fiber sign, so the defect does not depend on the
 * fiber coordinate and one evaluation per base column suffices.
 */
inline double column_defect(const TorusTransform& sigma,
                            const FurstenbergMap& alpha,
                            const FurstenbergMap& beta, CirclePoint x) {
  ColumnAction through = sigma.column_action(x.rotated(alpha.theta()));
  ColumnAction ahead = sigma.column_action(x);
  double fiber_lhs = through.fiber_sign * alpha.fiber_lift(x.value()) +
                     through.fiber_shift;
  CirclePoint base_rhs = ahead.base_out.rotated(beta.theta());
  double fiber_rhs = ahead.fiber_shift + beta.fiber_lift(ahead.base_out.value());
  return std::hypot(circle_dist(through.base_out, base_rhs),
                    circle_dist(CirclePoint(fiber_lhs), CirclePoint(fiber_rhs)));
}

}  // namespace detail

/**
 * Grid certificate for sup dist(sigma(alpha(p)), beta(sigma(p))). The sweep
 * uses max(grid, 65536) base columns (the defect is fiber-independent for
 * fiber-affine transforms, so the grid degenerates to columns; the requested
 * grid's columns are a subset of the sweep when grid divides the column
 * count). `defect_lipschitz` tightens the inflation term; without it a coarse
 * composite bound is used, which is honest but typically too large to certify
 * small eps. The certificate holds away from the transform's finitely many
 * discontinuity circles.
 */
inline DefectReport sup_defect(const TorusTransform& sigma,
                               const FurstenbergMap& alpha,
                               const FurstenbergMap& beta,
                               std::int64_t grid = 512,
                               double defect_lipschitz = -1.0) {
  if (grid < 64) throw std::invalid_argument("sup_defect: grid must be >= 64");
  DefectReport rep;
  rep.grid = grid;
  rep.columns = std::max<std::int64_t>(grid, 65536);
  while (rep.columns % grid != 0) ++rep.columns;

  double raw = 0.0;
  for (std::int64_t i = 0; i < rep.columns; ++i) {
    CirclePoint x((static_cast<double>(i) + 0.5) / static_cast<double>(rep.columns));
    raw = std::max(raw, detail::column_defect(sigma, alpha, beta, x));
  }
  double lip = defect_lipschitz;
  if (lip < 0.0) {
    double fa = std::fabs(static_cast<double>(alpha.degree())) +
                alpha.fiber_phase().lipschitz_bound();
    double fb = std::fabs(static_cast<double>(beta.degree())) +
                beta.fiber_phase().lipschitz_bound();
    lip = kTwoPi * (fa + fb + 2.0 * sigma.fiber_lipschitz_bound() + 2.0);
  }
  rep.raw_grid_sup = raw;
  rep.lipschitz_inflation = lip * 0.5 / static_cast<double>(rep.columns);
  rep.certified_sup = rep.raw_grid_sup + rep.lipschitz_inflation;
  return rep;
}

/**
 * Pushes the stratified N x N sample grid through the transform and histograms
 * into N x N cells; returns max |count - expected| / expected. Exact measure
 * preservation shows up as boundary effects only.
 */
inline double measure_preservation(const TorusTransform& sigma, std::int64_t cells) {
  if (cells < 2) throw std::invalid_argument("measure_preservation: cells must be >= 2");
  const auto n = cells;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n * n), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    CirclePoint x((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    ColumnAction a = sigma.column_action(x);
    auto ix = static_cast<std::int64_t>(a.base_out.value() * static_cast<double>(n));
    if (ix >= n) ix = n - 1;
    for (std::int64_t j = 0; j < n; ++j) {
      double t = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      double tv = wrap_unit(a.fiber_sign * t + a.fiber_shift);
      auto it = static_cast<std::int64_t>(tv * static_cast<double>(n));
      if (it >= n) it = n - 1;
      ++counts[static_cast<std::size_t>(ix * n + it)];
    }
  }
  double worst = 0.0;
  for (std::int64_t c : counts)
    worst = std::max(worst, std::fabs(static_cast<double>(c) - 1.0));
  return worst;
}

inline double measure_preservation(const ShearMap& sigma, std::int64_t cells) {
  return measure_preservation(TorusTransform({sigma}), cells);
}

struct MeasureDefectSample {
  double threshold = 0.0;
  double estimate = 0.0;     // Monte-Carlo estimate of m2{defect >= threshold}
  double error_bound = 0.0;  // two-sided 99% Hoeffding bound
};

/**
 * Monte-Carlo profile of the defect-measure function
 * a -> m2{p : dist(sigma(alpha p), beta(sigma p)) >= a}.
 */
inline std::vector<MeasureDefectSample> measure_defect_profile(
    const TorusTransform& sigma, const FurstenbergMap& alpha,
    const FurstenbergMap& beta, std::vector<double> thresholds,
    std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("measure_defect_profile: samples >= 1");
  std::sort(thresholds.begin(), thresholds.end());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::int64_t> counts(thresholds.size(), 0);
  for (std::int64_t s = 0; s < samples; ++s) {
    CirclePoint x(unif(rng));
    (void)unif(rng);  // fiber coordinate: defect is fiber-independent
    double d = detail::column_defect(sigma, alpha, beta, x);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (d >= thresholds[i]) ++counts[i];
  }
  const double bound =
      std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(samples)));
  std::vector<MeasureDefectSample> out(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    out[i] = {thresholds[i],
              static_cast<double>(counts[i]) / static_cast<double>(samples), bound};
  }
  return out;
}

}  // namespace torusconj
