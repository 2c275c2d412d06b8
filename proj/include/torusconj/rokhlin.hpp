#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusconj/circle.hpp"

namespace torusconj {

/**
 * Smallest m >= 1 with y + m*theta in `base` (mod 1). `cap` bounds the search;
 * 0 means the default 10 * ceil(1 / base.length).
 */
inline std::int64_t first_return(double theta, const Arc& base, CirclePoint y,
                                 std::int64_t cap = 0) {
  if (cap <= 0)
    cap = 10 * static_cast<std::int64_t>(std::ceil(1.0 / base.length));
  const double y0 = y.value();
  // Positions come from frac_mul rather than a running sum, so the error
  // stays at ~1 ulp instead of drifting with m; cells of the return-time
  // partition can be narrower than any accumulated drift.
  for (std::int64_t m = 1; m <= cap; ++m) {
    CirclePoint z(y0 + frac_mul(m, theta));
    if (base.contains(z)) return m;
  }
  throw std::runtime_error("first_return: no return within cap " +
                           std::to_string(cap));
}

/** Base cell of constant first-return time together with that height. */
struct TowerColumn {
  Arc base;
  std::int64_t height = 0;
};

struct TowerLocation {
  std::size_t column = 0;
  std::int64_t level = 0;
  double base_offset = 0.0;  // offset within the column's base arc
};

/**
 * Rokhlin tower over the rotation by theta: finitely many disjoint columns
 * (J_i, h(i)) whose level arcs J_i + j*theta, 0 <= j < h(i), tile the circle
 * up to finitely many points. Kac mass sum h(i)|J_i| = 1.
 */
class RokhlinTower {
 public:
  RokhlinTower(double theta, std::vector<TowerColumn> columns,
               std::vector<CirclePoint> exceptional)
      : theta_(theta),
        columns_(std::move(columns)),
        exceptional_(std::move(exceptional)) {
    if (columns_.empty())
      throw std::invalid_argument("RokhlinTower: no columns");
    check_invariants();
    build_index();
  }

  double theta() const { return theta_; }
  const std::vector<TowerColumn>& columns() const { return columns_; }
  const std::vector<CirclePoint>& exceptional_points() const { return exceptional_; }

  std::int64_t min_height() const {
    std::int64_t h = columns_.front().height;
    for (const auto& c : columns_) h = std::min(h, c.height);
    return h;
  }

  std::int64_t max_height() const {
    std::int64_t h = columns_.front().height;
    for (const auto& c : columns_) h = std::max(h, c.height);
    return h;
  }

  double total_mass() const {
    double m = 0.0;
    for (const auto& c : columns_) m += static_cast<double>(c.height) * c.base.length;
    return m;
  }

  /** Level arc J_i + j*theta. */
  Arc level_arc(std::size_t column, std::int64_t level) const {
    const TowerColumn& c = columns_.at(column);
    return Arc(c.base.start.rotated(frac_mul(level, theta_)), c.base.length);
  }

  /**
   * Column/level containing x, with the offset of the corresponding base
   * point x - level*theta inside the base arc. Empty for the finitely many
   * uncovered points (and for micro-gaps from endpoint roundoff, points are
   * assigned to the adjacent segment within 1e-12).
   */
  std::optional<TowerLocation> locate(CirclePoint x) const {
    double v = x.value();
    // Rightmost segment with lo <= v.
    auto it = std::upper_bound(index_.begin(), index_.end(), v,
                               [](double val, const Segment& s) { return val < s.lo; });
    auto check = [&](const Segment& s) -> std::optional<TowerLocation> {
      if (v >= s.lo - 1e-12 && v < s.hi + 1e-12) {
        double off = s.arc_offset + (v - s.lo);
        const TowerColumn& c = columns_[s.column];
        if (off < 0.0) off = 0.0;
        if (off >= c.base.length) off = std::nextafter(c.base.length, 0.0);
        return TowerLocation{s.column, s.level, off};
      }
      return std::nullopt;
    };
    if (it != index_.begin()) {
      if (auto loc = check(*std::prev(it))) return loc;
    }
    if (it != index_.end()) {
      if (auto loc = check(*it)) return loc;
    }
    return std::nullopt;
  }

 private:
  struct Segment {
    double lo, hi;        // linear sub-interval of [0,1)
    double arc_offset;    // offset of lo within the level arc (== base offset)
    std::size_t column;
    std::int64_t level;
  };

  void check_invariants() const {
    double mass = total_mass();
    if (std::fabs(mass - 1.0) > 1e-12)
      throw std::runtime_error("RokhlinTower: Kac mass " + std::to_string(mass) +
                               " != 1");
    std::vector<std::pair<double, double>> segs;
    for (const auto& c : columns_) {
      for (std::int64_t j = 0; j < c.height; ++j) {
        double s = wrap_unit(c.base.start.value() + frac_mul(j, theta_));
        double e = s + c.base.length;
        if (e <= 1.0) {
          segs.emplace_back(s, e);
        } else {
          segs.emplace_back(s, 1.0);
          segs.emplace_back(0.0, e - 1.0);
        }
      }
    }
    std::sort(segs.begin(), segs.end());
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].first < segs[i - 1].second - 1e-12)
        throw std::runtime_error("RokhlinTower: overlapping levels");
    }
  }

  void build_index() {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const TowerColumn& c = columns_[i];
      for (std::int64_t j = 0; j < c.height; ++j) {
        double s = wrap_unit(c.base.start.value() + frac_mul(j, theta_));
        double e = s + c.base.length;
        if (e <= 1.0) {
          index_.push_back({s, e, 0.0, i, j});
        } else {
          index_.push_back({s, 1.0, 0.0, i, j});
          index_.push_back({0.0, e - 1.0, 1.0 - s, i, j});
        }
      }
    }
    std::sort(index_.begin(), index_.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  }

  double theta_;
  std::vector<TowerColumn> columns_;
  std::vector<CirclePoint> exceptional_;
  std::vector<Segment> index_;
};

/**
 * Tower over the rotation by theta whose base is the interval [0, |q_k theta - p_k|)
 * for the smallest convergent denominator q_k >= n (so every height is >= n),
 * or over `base_override` if supplied (then n only guides validation depth).
 * Cells of constant first-return time are found by cutting the base at the
 * backward orbit of its endpoints and merging equal-return cells.
 */
inline RokhlinTower build_tower(double theta, std::int64_t n,
                                std::optional<Arc> base_override = std::nullopt) {
  if (n < 2) throw std::invalid_argument("build_tower: n must be >= 2");

  Arc base = [&]() -> Arc {
    if (base_override) return *base_override;
    auto cs = convergents(theta, 48);
    for (const auto& c : cs)
      if (c.q >= n) return Arc(CirclePoint(0.0), c.error);
    throw std::runtime_error("build_tower: convergent list exhausted before q >= n");
  }();

  const double len = base.length;
  const auto cap = 10 * static_cast<std::int64_t>(std::ceil(1.0 / len));

  // Return time changes exactly where the forward orbit of a point crosses a
  // base endpoint: cut at (start - m theta) and (end - m theta) inside the base.
  std::vector<double> cuts;
  const double b0 = base.start.value();
  const double b1 = b0 + len;
  for (std::int64_t m = 1; m <= cap; ++m) {
    double shift = frac_mul(m, theta);
    for (double endpoint : {b0, b1}) {
      double off = wrap_unit(endpoint - shift - b0);
      if (off > 0.0 && off < len) cuts.push_back(off);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> uniq;
  for (double c : cuts) {
    if (uniq.empty() || c - uniq.back() > 1e-14) {
      if (!uniq.empty() && c - uniq.back() < 1e-10)
        throw std::runtime_error(
            "build_tower: breakpoints closer than 1e-10; n too large for "
            "double-precision cell resolution");
      uniq.push_back(c);
    }
  }

  std::vector<double> edges;
  edges.push_back(0.0);
  edges.insert(edges.end(), uniq.begin(), uniq.end());
  edges.push_back(len);

  std::vector<TowerColumn> cols;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    if (!(hi - lo > 0.0)) continue;
    CirclePoint mid(b0 + 0.5 * (lo + hi));
    std::int64_t r = first_return(theta, base, mid, cap);
    Arc cell(CirclePoint(b0 + lo), hi - lo);
    if (!cols.empty() && cols.back().height == r &&
        std::fabs(wrap_unit(cols.back().base.start.value() +
                            cols.back().base.length) -
                  cell.start.value()) < 1e-13) {
      cols.back() = TowerColumn{
          Arc(cols.back().base.start, cols.back().base.length + cell.length), r};
    } else {
      cols.push_back(TowerColumn{cell, r});
    }
  }

  if (!base_override) {
    for (const auto& c : cols)
      if (c.height < n)
        throw std::runtime_error("build_tower: height below n");
  }

  std::vector<CirclePoint> exceptional;
  for (const auto& c : cols) exceptional.push_back(c.base.start);
  exceptional.emplace_back(b1);

  return RokhlinTower(theta, std::move(cols), std::move(exceptional));
}

}  // namespace torusconj
