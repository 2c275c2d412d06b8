#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "torusconj/circle.hpp"
#include "torusconj/furstenberg.hpp"

namespace torusconj {

// Invariants of the transformation-group C*-algebra attached to a
// Furstenberg map.  Two maps with distinct records generate
// non-isomorphic crossed products, so unequal records rule out any
// topological conjugacy between the underlying systems.
//
// The record stores:
//   * theta_class   -- the rotation number up to the flip theta -> 1-theta,
//                      i.e. the coset {theta, 1-theta} canonicalised to
//                      its representative in (0, 1/2].  Traces of
//                      projections land in (Z + theta Z) mod 1, which is
//                      invariant exactly under that flip.
//   * torsion_order -- |d|.  K_1 contains a cyclic summand Z/|d|Z coming
//                      from the winding degree of the fibre cocycle.
//   * k0_rank       -- rank of K_0 (always 3 for these systems: the
//                      class of the unit, the Rieffel projection of the
//                      base rotation, and a Bott class of the fibre).
struct KInvariant {
  double theta_class = 0.0;
  std::int64_t torsion_order = 0;
  int k0_rank = 3;

  // Human-readable shape of K_1 = Z^2 + Z/|d|Z + Z.
  std::string k1_shape() const {
    return "Z + Z + Z/" + std::to_string(torsion_order) + "Z + Z";
  }
};

inline KInvariant k_invariant(const FurstenbergMap& m) {
  KInvariant inv;
  const double theta = m.theta();
  inv.theta_class = std::min(theta, 1.0 - theta);
  inv.torsion_order = std::llabs(m.degree());
  inv.k0_rank = 3;
  return inv;
}

// Whether the two records agree, i.e. whether the invariant fails to
// separate the algebras.  theta_class values are doubles produced by
// arithmetic on user input, so the comparison takes a tolerance.
inline bool isomorphic(const KInvariant& a, const KInvariant& b,
                       double tol = 1e-9) {
  return std::abs(a.theta_class - b.theta_class) <= tol &&
         a.torsion_order == b.torsion_order;
}

}  // namespace torusconj
