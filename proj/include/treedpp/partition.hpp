#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "treedpp/geometry.hpp"
#include "treedpp/measure.hpp"
#include "treedpp/tree_index.hpp"

namespace treedpp {

struct PartitionCell {
  CellKey key;
  Box box;
  double mass = 0.0;

  TreeIndex index() const { return TreeIndex(key, key.level()); }
};

// The m-partition Delta(level) restricted to a window: every root cell split
// level-1 times, in canonical order (root-major, then path).
class Partition {
 public:
  static Partition coarsest(const Window& window, const ReferenceMeasure& measure);
  static Partition atLevel(const Window& window, const ReferenceMeasure& measure, int level);

  int level() const { return level_; }
  const Window& window() const { return window_; }
  const ReferenceMeasure& measure() const { return measure_; }
  const std::vector<PartitionCell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

  // Position of the unique cell containing p; nullopt outside the window.
  std::optional<std::size_t> locate(const Point& p) const;
  // Position of a cell of this level; throws if the key is not one of them.
  std::size_t position(const CellKey& key) const;

 private:
  friend Partition refine(const Partition& partition);
  Partition(Window window, ReferenceMeasure measure, int level)
      : window_(window), measure_(measure), level_(level) {}

  Window window_;
  ReferenceMeasure measure_;
  int level_ = 1;
  std::vector<PartitionCell> cells_;
};

// Replaces every cell by its two children. Throws PartitionError if a child
// has zero reference mass.
Partition refine(const Partition& partition);

// The cell addressed by the full path of an index (level = depth + 1).
PartitionCell cellOf(const TreeIndex& index, const ReferenceMeasure& measure);

// All i in the level-l basis index set with rank <= rankMax and root cell in
// the window, in canonical order.
std::vector<TreeIndex> truncatedIndexSet(int level, int rankMax, const Window& window);

}  // namespace treedpp
