#include "treedpp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "treedpp/errors.hpp"

namespace treedpp {

namespace {

std::size_t rootPosition(const Window& w, const Root& r) {
  if (w.dim == 1) return std::size_t(r.x - w.x0);
  return std::size_t((r.x - w.x0) * (w.y1 - w.y0) + (r.y - w.y0));
}

std::uint64_t clampedOffset(double t, int bits) {
  const double scaled = std::floor(t * std::ldexp(1.0, bits));
  const double maxOffset = std::ldexp(1.0, bits) - 1.0;
  return std::uint64_t(std::clamp(scaled, 0.0, maxOffset));
}

}  // namespace

Partition Partition::coarsest(const Window& window, const ReferenceMeasure& measure) {
  if (window.dim != measure.dimension()) {
    throw std::invalid_argument("window dimension does not match the reference measure");
  }
  Partition p(window, measure, 1);
  for (const Root& r : window.roots()) {
    PartitionCell cell;
    cell.key = CellKey{r, 0, 0};
    cell.box = cellBox(cell.key, window.dim);
    if (!measure.admits(cell.box)) {
      throw PartitionError("window cell " + TreeIndex(cell.key, 1).label(window.dim) +
                           " lies outside the domain of the " + measure.name() + " measure");
    }
    cell.mass = measure.cellMass(cell.box);
    if (!(cell.mass > 0.0)) {
      throw PartitionError("cell " + TreeIndex(cell.key, 1).label(window.dim) +
                           " has zero reference mass");
    }
    p.cells_.push_back(cell);
  }
  return p;
}

Partition Partition::atLevel(const Window& window, const ReferenceMeasure& measure, int level) {
  if (level < 1 || level - 1 > kMaxDepth) throw std::invalid_argument("partition level out of range");
  Partition p = coarsest(window, measure);
  while (p.level() < level) p = refine(p);
  return p;
}

Partition refine(const Partition& partition) {
  Partition next(partition.window_, partition.measure_, partition.level_ + 1);
  next.cells_.reserve(partition.cells_.size() * 2);
  const int dim = partition.window_.dim;
  for (const auto& parent : partition.cells_) {
    for (int bit = 0; bit < 2; ++bit) {
      PartitionCell c;
      c.key = parent.key.child(bit);
      c.box = cellBox(c.key, dim);
      c.mass = partition.measure_.cellMass(c.box);
      if (!(c.mass > 0.0)) {
        throw PartitionError("refinement produced zero-mass cell " +
                             TreeIndex(c.key, c.key.level()).label(dim));
      }
      next.cells_.push_back(c);
    }
  }
  return next;
}

std::optional<std::size_t> Partition::locate(const Point& p) const {
  if (!window_.contains(p)) return std::nullopt;
  const int depth = level_ - 1;
  Root r{std::int64_t(std::floor(p.x)), window_.dim == 2 ? std::int64_t(std::floor(p.y)) : 0};
  std::uint64_t path = 0;
  if (window_.dim == 1) {
    path = clampedOffset(p.x - double(r.x), depth);
  } else {
    const int nx = (depth + 1) / 2, ny = depth / 2;
    const std::uint64_t xi = clampedOffset(p.x - double(r.x), nx);
    const std::uint64_t yi = clampedOffset(p.y - double(r.y), ny);
    for (int k = 1, ix = nx, iy = ny; k <= depth; ++k) {
      const std::uint64_t b = (k % 2 == 1) ? (xi >> --ix) & 1U : (yi >> --iy) & 1U;
      path = (path << 1) | b;
    }
  }
  return (rootPosition(window_, r) << depth) + path;
}

std::size_t Partition::position(const CellKey& key) const {
  if (key.depth != level_ - 1 || !window_.contains(key.root)) {
    throw std::invalid_argument("cell " + TreeIndex(key, key.level()).label(window_.dim) +
                                " is not a level-" + std::to_string(level_) +
                                " cell of window " + window_.toString());
  }
  return (rootPosition(window_, key.root) << key.depth) + key.path;
}

PartitionCell cellOf(const TreeIndex& index, const ReferenceMeasure& measure) {
  PartitionCell c;
  c.key = index.key();
  c.box = cellBox(c.key, measure.dimension());
  c.mass = measure.cellMass(c.box);
  return c;
}

std::vector<TreeIndex> truncatedIndexSet(int level, int rankMax, const Window& window) {
  if (level < 1) throw std::invalid_argument("level must be >= 1");
  if (rankMax < 1) throw std::invalid_argument("rankMax must be >= 1");
  if (level + rankMax - 2 > kMaxDepth) throw std::invalid_argument("truncation too deep");
  std::vector<TreeIndex> out;
  for (const Root& r : window.roots()) {
    const int blockDepth = level - 1;
    for (std::uint64_t block = 0; block < (std::uint64_t(1) << blockDepth); ++block) {
      const CellKey cell{r, block, blockDepth};
      out.emplace_back(cell, level);
      // Rank r >= 2: one Haar index (last bit 0) per descendant cell of
      // relative depth r - 2.
      for (int rank = 2; rank <= rankMax; ++rank) {
        const int rel = rank - 2;
        for (std::uint64_t d = 0; d < (std::uint64_t(1) << rel); ++d) {
          const CellKey split{r, (block << rel) | d, blockDepth + rel};
          out.emplace_back(split.child(0), level);
        }
      }
    }
  }
  return out;
}

}  // namespace treedpp
