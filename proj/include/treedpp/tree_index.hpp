#pragma once

#include <compare>
#include <string>

#include "treedpp/geometry.hpp"

namespace treedpp {

// Element of the tree index family at a given level context l.
//
// The full bit path (j_2, ..., j_{l+r-1}) is stored in the cell key; the
// first l-1 bits form the root block together with j_1 (a level-l cell),
// the remaining r-1 bits select a descendant. rank = r.
class TreeIndex {
 public:
  TreeIndex() = default;
  TreeIndex(CellKey key, int level);

  const CellKey& key() const { return key_; }
  const Root& root() const { return key_.root; }
  int level() const { return level_; }
  int depth() const { return key_.depth; }
  int rank() const { return key_.depth - level_ + 2; }
  int bit(int n) const;  // n-th bit of the full path, 0-based

  // Member of the basis index set at this level: rank 1, or last bit 0.
  bool inBasisSet() const { return rank() == 1 || (key_.path & 1U) == 0; }

  // Drops the last bit; requires rank >= 2.
  TreeIndex parent() const;

  // The level-l cell containing everything this index refers to.
  CellKey rootBlock() const { return key_.ancestor(level_ - 1); }

  // Support cell B_{l,i}: the cell itself at rank 1, the parent cell (the one
  // split by the Haar function) at rank >= 2.
  CellKey supportCell() const {
    return rank() == 1 ? key_ : key_.ancestor(key_.depth - 1);
  }

  // "j1:bits" in 1D, "jx,jy:bits" in 2D; bits are the full path.
  std::string label(int dim) const;
  std::string bitString() const;

  bool operator==(const TreeIndex&) const = default;

 private:
  CellKey key_;
  int level_ = 1;
};

// Canonical order: root, root-block bits, rank, remaining bits.
std::strong_ordering canonicalCompare(const TreeIndex& a, const TreeIndex& b);

struct CanonicalLess {
  bool operator()(const TreeIndex& a, const TreeIndex& b) const {
    return canonicalCompare(a, b) < 0;
  }
};

// Reinterprets a level-1 index (j_1, ..., j_{l+r-1}) as the level-l index
// (j_l-block, j_{l+1}, ..., j_{l+r-1}) of rank r. Requires rank(i) >= level.
TreeIndex shiftIndex(const TreeIndex& i, int targetLevel);
TreeIndex shiftIndexInverse(const TreeIndex& i);

TreeIndex parseTreeIndex(const std::string& label, int level, int dim);

}  // namespace treedpp
