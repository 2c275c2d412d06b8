#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "torusconj/circle.hpp"

namespace torusconj {

/**
 * One continuity piece: a half-open arc together with a continuous real lift,
 * parametrized by the offset from the arc's start (offset in [0, length)).
 */
struct CirclePiece {
  Arc arc;
  std::function<double(double)> lift;
  double lip_bound = 0.0;  // Lipschitz bound of the lift on this piece
};

/**
 * Circle-valued map defined piecewise by continuous lifts on finitely many
 * pairwise disjoint half-open arcs covering the circle up to finitely many
 * points. Values at uncovered points default to 0 (any assignment there
 * changes the map on a null set only).
 */
class PiecewiseCircleMap {
 public:
  PiecewiseCircleMap() = default;

  explicit PiecewiseCircleMap(std::vector<CirclePiece> pieces,
                              std::vector<CirclePoint> discontinuities = {})
      : pieces_(std::move(pieces)), discontinuities_(std::move(discontinuities)) {
    build_index();
  }

  const std::vector<CirclePiece>& pieces() const { return pieces_; }
  const std::vector<CirclePoint>& discontinuities() const { return discontinuities_; }

  /** Max of the per-piece Lipschitz bounds. */
  double lipschitz_bound() const {
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max(m, p.lip_bound);
    return m;
  }

  /** Real lift at x; 0 at the finitely many uncovered points. */
  double lift_at(CirclePoint x) const {
    double v = x.value();
    auto it = std::upper_bound(index_.begin(), index_.end(), v,
                               [](double val, const Segment& s) { return val < s.lo; });
    auto eval = [&](const Segment& s) -> bool {
      return v >= s.lo - 1e-12 && v < s.hi + 1e-12;
    };
    const Segment* hit = nullptr;
    if (it != index_.begin() && eval(*std::prev(it))) hit = &*std::prev(it);
    else if (it != index_.end() && eval(*it)) hit = &*it;
    if (hit == nullptr) return 0.0;
    const CirclePiece& p = pieces_[hit->piece];
    double off = hit->arc_offset + (v - hit->lo);
    if (off < 0.0) off = 0.0;
    if (off >= p.arc.length) off = std::nextafter(p.arc.length, 0.0);
    return p.lift(off);
  }

  CirclePoint value_at(CirclePoint x) const { return CirclePoint(lift_at(x)); }

  bool covers(CirclePoint x) const {
    double v = x.value();
    auto it = std::upper_bound(index_.begin(), index_.end(), v,
                               [](double val, const Segment& s) { return val < s.lo; });
    auto inside = [&](const Segment& s) { return v >= s.lo && v < s.hi; };
    if (it != index_.begin() && inside(*std::prev(it))) return true;
    return it != index_.end() && inside(*it);
  }

  /** Total length of the circle not covered by any piece. */
  double uncovered_length() const {
    double covered = 0.0;
    for (const auto& p : pieces_) covered += p.arc.length;
    return std::max(0.0, 1.0 - covered);
  }

 private:
  struct Segment {
    double lo, hi;
    double arc_offset;
    std::size_t piece;
  };

  void build_index() {
    index_.clear();
    index_.reserve(pieces_.size() + 4);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      double s = pieces_[i].arc.start.value();
      double e = s + pieces_[i].arc.length;
      if (e <= 1.0) {
        index_.push_back({s, e, 0.0, i});
      } else {
        index_.push_back({s, 1.0, 0.0, i});
        index_.push_back({0.0, e - 1.0, 1.0 - s, i});
      }
    }
    std::sort(index_.begin(), index_.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < index_.size(); ++i) {
      if (index_[i].lo < index_[i - 1].hi - 1e-12)
        throw std::invalid_argument("PiecewiseCircleMap: overlapping pieces");
    }
  }

  std::vector<CirclePiece> pieces_;
  std::vector<CirclePoint> discontinuities_;
  std::vector<Segment> index_;
};

}  // namespace torusconj
