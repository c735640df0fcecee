#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treedpp {

// A point of S = R (y unused) or S = R^2 ~ C.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Half-open axis-aligned box [lo, hi). In 1D only axis 0 is meaningful.
struct Box {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  int dim = 1;

  bool contains(const Point& p) const {
    if (p.x < lo[0] || p.x >= hi[0]) return false;
    return dim == 1 || (p.y >= lo[1] && p.y < hi[1]);
  }
  double width(int axis) const { return hi[axis] - lo[axis]; }
  bool operator==(const Box&) const = default;
};

// Root j1 of a binary tree: the unit cell [x, x+1) or [x, x+1) x [y, y+1).
struct Root {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const Root&) const = default;
};

// A dyadic cell: root plus `depth` refinement bits, most significant first.
// In 2D the splits alternate axes: x on odd split numbers, y on even ones.
struct CellKey {
  Root root;
  std::uint64_t path = 0;
  int depth = 0;

  auto operator<=>(const CellKey&) const = default;

  // Level of the partition Delta(level) this cell belongs to.
  int level() const { return depth + 1; }
  CellKey child(int bit) const { return {root, (path << 1) | std::uint64_t(bit & 1), depth + 1}; }
  CellKey ancestor(int ancestorDepth) const {
    return {root, path >> (depth - ancestorDepth), ancestorDepth};
  }
  bool isWithin(const CellKey& outer) const {
    return outer.depth <= depth && outer.root == root &&
           (path >> (depth - outer.depth)) == outer.path;
  }
};

inline constexpr int kMaxDepth = 60;

Box cellBox(const CellKey& key, int dim);

// Intersection of two dyadic cells of the same tree family: the finer one if
// nested, otherwise empty.
std::optional<CellKey> intersect(const CellKey& a, const CellKey& b);

// Rectangular window of unit cells: [x0, x1) in 1D, [x0, x1) x [y0, y1) in 2D.
struct Window {
  int dim = 1;
  std::int64_t x0 = 0, x1 = 1;
  std::int64_t y0 = 0, y1 = 1;

  std::int64_t rootCount() const {
    return (x1 - x0) * (dim == 2 ? (y1 - y0) : 1);
  }
  // Roots in lexicographic order.
  std::vector<Root> roots() const;
  bool contains(const Point& p) const;
  bool contains(const Root& r) const;
  Box box() const;
  std::string toString() const;
  bool operator==(const Window&) const = default;
};

// Parses "a..b" (1D) or "a..b,c..d" (2D) with integer endpoints.
Window parseWindow(const std::string& text);

}  // namespace treedpp
