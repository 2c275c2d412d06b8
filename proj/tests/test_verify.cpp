#include "torusconj/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "torusconj/conjugacy.hpp"

namespace torusconj {
namespace {

const double kGolden = 0.6180339887498949;

FurstenbergMap pair_alpha() {
  TrigPoly zero;
  return FurstenbergMap(kGolden, 1, RealFunction(zero));
}

FurstenbergMap pair_beta() {
  TrigPoly f;
  f.cos_coeffs = {0.3};
  return FurstenbergMap(kGolden, 1, RealFunction(f));
}

TEST(SupDefect, ReportFieldsAreConsistent) {
  FurstenbergMap alpha = pair_alpha(), beta = pair_beta();
  ConjugacyResult res = build_m2_conjugacy(alpha, beta, 1e-1);
  DefectReport rep = sup_defect(res.map, alpha, beta, 500, res.defect_lipschitz);
  EXPECT_EQ(rep.grid, 500);
  EXPECT_GE(rep.columns, 65536);
  EXPECT_EQ(rep.columns % rep.grid, 0);
  EXPECT_DOUBLE_EQ(rep.certified_sup, rep.raw_grid_sup + rep.lipschitz_inflation);
  EXPECT_GT(rep.lipschitz_inflation, 0.0);
  EXPECT_THROW(sup_defect(res.map, alpha, beta, 10), std::invalid_argument);
}

TEST(SupDefect, DefaultLipschitzBoundIsCoarserButStillValid) {
  FurstenbergMap alpha = pair_alpha(), beta = pair_beta();
  ConjugacyResult res = build_m2_conjugacy(alpha, beta, 1e-1);
  DefectReport tight = sup_defect(res.map, alpha, beta, 512, res.defect_lipschitz);
  DefectReport coarse = sup_defect(res.map, alpha, beta, 512);
  EXPECT_DOUBLE_EQ(tight.raw_grid_sup, coarse.raw_grid_sup);
  EXPECT_GE(coarse.lipschitz_inflation, tight.lipschitz_inflation);
}

// The defect of a fiber-affine transform cannot depend on the fiber
// coordinate: check the full two-coordinate distance directly.
TEST(SupDefect, DefectIsFiberIndependent) {
  FurstenbergMap alpha = pair_alpha(), beta = pair_beta();
  ConjugacyResult res = build_m2_conjugacy(alpha, beta, 1e-2);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DefectReport rep = sup_defect(res.map, alpha, beta, 512, res.defect_lipschitz);
  for (int i = 0; i < 64; ++i) {
    CirclePoint x(u(rng));
    double first = -1.0;
    for (int j = 0; j < 8; ++j) {
      TorusPoint p{x, CirclePoint(u(rng))};
      double d = torus_dist(res.map.apply(alpha.apply(p)),
                            beta.apply(res.map.apply(p)));
      if (first < 0.0) first = d;
      EXPECT_NEAR(d, first, 1e-12);
      EXPECT_LE(d, rep.certified_sup + 1e-12);
    }
  }
}

TEST(MeasurePreservation, AllStageKindsAreExactlyPreserving) {
  TrigPoly g0;
  g0.sin_coeffs = {0.2};
  std::vector<CirclePiece> pieces;
  CirclePiece p;
  p.arc = Arc(CirclePoint(0.0), 1.0);
  p.lift = [](double off) { return 0.3 * off; };
  p.lip_bound = 0.3;
  pieces.push_back(std::move(p));
  PiecewiseCircleMap omega(std::move(pieces), {CirclePoint(0.0)});

  EXPECT_EQ(measure_preservation(ShearMap::base_flip(), 256), 0.0);
  EXPECT_EQ(measure_preservation(ShearMap::fiber_flip(), 256), 0.0);
  EXPECT_EQ(measure_preservation(ShearMap::fiber_shear(omega), 256), 0.0);
  EXPECT_EQ(measure_preservation(
                ShearMap::fiber_multiplier(CircleValuedMap(2, RealFunction(g0))),
                256),
            0.0);
  TorusTransform composite({ShearMap::fiber_shear(omega, -1),
                            ShearMap::base_flip(), ShearMap::fiber_flip()});
  EXPECT_EQ(measure_preservation(composite, 256), 0.0);
  EXPECT_THROW(measure_preservation(composite, 1), std::invalid_argument);
}

TEST(MeasureDefectProfile, MonotoneWithHoeffdingErrorBar) {
  FurstenbergMap alpha = pair_alpha(), beta = pair_beta();
  ConjugacyResult res = build_m2_conjugacy(alpha, beta, 1e-1);
  auto prof = measure_defect_profile(res.map, alpha, beta,
                                     {5e-2, 1e-2, 1e-3, 1e-4}, 20000, 7);
  ASSERT_EQ(prof.size(), 4u);
  double expected_bound = std::sqrt(std::log(2.0 / 0.01) / (2.0 * 20000));
  for (std::size_t i = 0; i < prof.size(); ++i) {
    EXPECT_DOUBLE_EQ(prof[i].error_bound, expected_bound);
    EXPECT_GE(prof[i].estimate, 0.0);
    EXPECT_LE(prof[i].estimate, 1.0);
    if (i > 0) {
      EXPECT_LE(prof[i - 1].threshold, prof[i].threshold);
      EXPECT_GE(prof[i - 1].estimate, prof[i].estimate);
    }
  }
  // the m2 transform has defect below 1e-1 everywhere off a null set
  EXPECT_EQ(prof[0].estimate, 0.0);

  auto again = measure_defect_profile(res.map, alpha, beta,
                                      {5e-2, 1e-2, 1e-3, 1e-4}, 20000, 7);
  for (std::size_t i = 0; i < prof.size(); ++i)
    EXPECT_EQ(prof[i].estimate, again[i].estimate);
}

}  // namespace
}  // namespace torusconj
