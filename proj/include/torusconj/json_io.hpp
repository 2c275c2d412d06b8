#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torusconj/circle.hpp"
#include "torusconj/cocycle.hpp"
#include "torusconj/conjugacy.hpp"
#include "torusconj/furstenberg.hpp"
#include "torusconj/ktheory.hpp"
#include "torusconj/piecewise.hpp"
#include "torusconj/rokhlin.hpp"
#include "torusconj/shear.hpp"
#include "torusconj/trig.hpp"
#include "torusconj/verify.hpp"

// JSON bindings for the library's value types.  Objects always serialize
// with sorted keys (nlohmann's default), so reports are byte-stable across
// runs with the same inputs.

namespace torusconj {

inline void to_json(nlohmann::json& j, const TrigPoly& p) {
  j = nlohmann::json{{"constant", p.constant},
                     {"cos", p.cos_coeffs},
                     {"sin", p.sin_coeffs}};
}

inline void from_json(const nlohmann::json& j, TrigPoly& p) {
  p.constant = j.value("constant", 0.0);
  p.cos_coeffs = j.value("cos", std::vector<double>{});
  p.sin_coeffs = j.value("sin", std::vector<double>{});
}

inline void to_json(nlohmann::json& j, const SampledFunction& f) {
  j = nlohmann::json{{"n", f.values.size()},
                     {"lipschitz", f.lipschitz},
                     {"values", f.values}};
}

inline void from_json(const nlohmann::json& j, SampledFunction& f) {
  auto values = j.at("values").get<std::vector<double>>();
  double lip = j.value("lipschitz", 0.0);
  if (j.contains("n") && j.at("n").get<std::size_t>() != values.size())
    throw std::invalid_argument("SampledFunction: field n disagrees with values length");
  f = SampledFunction(std::move(values), lip);
}

inline void to_json(nlohmann::json& j, const RealFunction& f) {
  if (f.is_trig()) {
    to_json(j, f.trig());
  } else {
    to_json(j, f.samples());
  }
}

// A function value is either a trig polynomial {constant, cos, sin} or a
// sample table {n, lipschitz, values}; the presence of "values" decides.
inline void from_json(const nlohmann::json& j, RealFunction& f) {
  if (j.contains("values")) {
    SampledFunction s;
    from_json(j, s);
    f = RealFunction(std::move(s));
  } else {
    TrigPoly p;
    from_json(j, p);
    f = RealFunction(std::move(p));
  }
}

inline void to_json(nlohmann::json& j, const Arc& a) {
  j = nlohmann::json{{"start", a.start.value()}, {"length", a.length}};
}

inline void to_json(nlohmann::json& j, const RokhlinTower& t) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const TowerColumn& c : t.columns()) {
    arcs.push_back({{"start", c.base.start.value()},
                    {"length", c.base.length},
                    {"height", c.height}});
  }
  nlohmann::json exceptional = nlohmann::json::array();
  for (const CirclePoint& p : t.exceptional_points()) exceptional.push_back(p.value());
  j = nlohmann::json{{"theta", t.theta()},
                     {"arcs", std::move(arcs)},
                     {"exceptional", std::move(exceptional)},
                     {"min_height", t.min_height()},
                     {"max_height", t.max_height()},
                     {"total_mass", t.total_mass()}};
}

inline void to_json(nlohmann::json& j, const CoboundaryCertificate& c) {
  j = nlohmann::json{{"target_eps", c.target_eps},
                     {"achieved_sup", c.achieved_sup},
                     {"grid", c.grid},
                     {"winding_k", c.winding_k},
                     {"constant_gap", c.constant_gap},
                     {"tail_bound", c.tail_bound}};
}

inline void to_json(nlohmann::json& j, const WindingCoboundary& w) {
  j = nlohmann::json{{"k", w.k}, {"g0", w.g0}, {"certificate", w.cert}};
}

inline void to_json(nlohmann::json& j, const KInvariant& k) {
  j = nlohmann::json{{"theta_class", k.theta_class},
                     {"torsion_order", k.torsion_order},
                     {"k0_rank", k.k0_rank},
                     {"k1_shape", k.k1_shape()}};
}

inline void to_json(nlohmann::json& j, const ObstructionReport& r) {
  j = nlohmann::json{{"theta1", r.theta1},
                     {"theta2", r.theta2},
                     {"rotation_gap_minus", r.rotation_gap_minus},
                     {"rotation_gap_plus", r.rotation_gap_plus},
                     {"d1", r.d1},
                     {"d2", r.d2},
                     {"rotation_compatible", r.rotation_compatible},
                     {"winding_compatible", r.winding_compatible},
                     {"slice_defect_min", r.slice_defect_min},
                     {"candidates", r.candidates},
                     {"seed", r.seed}};
}

inline void to_json(nlohmann::json& j, const DefectReport& r) {
  j = nlohmann::json{{"grid", r.grid},
                     {"columns", r.columns},
                     {"raw_grid_sup", r.raw_grid_sup},
                     {"lipschitz_inflation", r.lipschitz_inflation},
                     {"certified_sup", r.certified_sup}};
}

inline void to_json(nlohmann::json& j, const MeasureDefectSample& s) {
  j = nlohmann::json{{"threshold", s.threshold},
                     {"estimate", s.estimate},
                     {"error_bound", s.error_bound}};
}

inline void to_json(nlohmann::json& j, const CircleValuedMap& g) {
  j = nlohmann::json{{"degree", g.degree}, {"phase", g.phase}};
}

// Piecewise maps carry closures, so pieces export as arcs plus a small
// table of lift samples at equispaced offsets (enough for plotting and
// for spot-checking continuity at the gap bridges).
inline void to_json(nlohmann::json& j, const PiecewiseCircleMap& omega) {
  constexpr int kSamplesPerPiece = 9;
  nlohmann::json pieces = nlohmann::json::array();
  for (const CirclePiece& p : omega.pieces()) {
    std::vector<double> lifts(kSamplesPerPiece);
    for (int i = 0; i < kSamplesPerPiece; ++i) {
      double off = p.arc.length * static_cast<double>(i) /
                   static_cast<double>(kSamplesPerPiece - 1);
      // stay inside the half-open arc
      if (i == kSamplesPerPiece - 1) off = p.arc.length * (1.0 - 1e-12);
      lifts[i] = p.lift(off);
    }
    pieces.push_back({{"arc", p.arc},
                      {"lift_samples", std::move(lifts)},
                      {"lipschitz", p.lip_bound}});
  }
  nlohmann::json disc = nlohmann::json::array();
  for (const CirclePoint& p : omega.discontinuities()) disc.push_back(p.value());
  j = nlohmann::json{{"pieces", std::move(pieces)},
                     {"discontinuities", std::move(disc)}};
}

inline void to_json(nlohmann::json& j, const ShearMap& s) {
  switch (s.kind()) {
    case ShearMap::Kind::base_flip:
      j = nlohmann::json{{"kind", "base_flip"}};
      return;
    case ShearMap::Kind::fiber_flip:
      j = nlohmann::json{{"kind", "fiber_flip"}};
      return;
    case ShearMap::Kind::fiber_shear:
      j = nlohmann::json{{"kind", "fiber_shear"},
                         {"sign", s.sign()},
                         {"omega", s.omega()}};
      return;
    case ShearMap::Kind::fiber_multiplier:
      j = nlohmann::json{{"kind", "fiber_multiplier"},
                         {"sign", s.sign()},
                         {"multiplier", s.multiplier()}};
      return;
  }
}

inline void to_json(nlohmann::json& j, const TorusTransform& t) {
  j = nlohmann::json{{"stages", t.stages()}};
}

inline void to_json(nlohmann::json& j, const ConjugacyResult& r) {
  j = nlohmann::json{{"map", r.map},
                     {"sup_defect", r.sup_defect},
                     {"defect_lipschitz", r.defect_lipschitz},
                     {"profile", r.profile},
                     {"discontinuity_measure", r.discontinuity_measure},
                     {"discontinuity_count", r.discontinuity_count},
                     {"winding_k", r.winding_k},
                     {"exact_constant", r.exact_constant},
                     {"target_eps", r.target_eps}};
}

}  // namespace torusconj

namespace nlohmann {

template <>
struct adl_serializer<torusconj::FurstenbergMap> {
  static torusconj::FurstenbergMap from_json(const json& j) {
    return torusconj::FurstenbergMap(j.at("theta").get<double>(),
                                     j.at("d").get<int>(),
                                     j.at("f").get<torusconj::RealFunction>());
  }

  static void to_json(json& j, const torusconj::FurstenbergMap& m) {
    j = json{{"theta", m.theta()}, {"d", m.degree()}, {"f", m.fiber_phase()}};
  }
};

}  // namespace nlohmann
