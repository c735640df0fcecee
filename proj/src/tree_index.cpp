#include "treedpp/tree_index.hpp"

#include <charconv>
#include <stdexcept>
#include <tuple>

namespace treedpp {

TreeIndex::TreeIndex(CellKey key, int level) : key_(key), level_(level) {
  if (level < 1) throw std::invalid_argument("tree index level must be >= 1");
  if (key.depth < level - 1) {
    throw std::invalid_argument("tree index path shorter than its level's root block");
  }
  if (key.depth > kMaxDepth) throw std::invalid_argument("tree index too deep");
}

int TreeIndex::bit(int n) const {
  if (n < 0 || n >= key_.depth) throw std::out_of_range("tree index bit");
  return int((key_.path >> (key_.depth - 1 - n)) & 1U);
}

TreeIndex TreeIndex::parent() const {
  if (rank() < 2) throw std::invalid_argument("rank-1 index has no parent");
  return TreeIndex(key_.ancestor(key_.depth - 1), level_);
}

std::string TreeIndex::bitString() const {
  std::string s;
  s.reserve(std::size_t(key_.depth));
  for (int n = 0; n < key_.depth; ++n) s.push_back(char('0' + bit(n)));
  return s;
}

std::string TreeIndex::label(int dim) const {
  std::string s = std::to_string(key_.root.x);
  if (dim == 2) s += "," + std::to_string(key_.root.y);
  return s + ":" + bitString();
}

std::strong_ordering canonicalCompare(const TreeIndex& a, const TreeIndex& b) {
  if (auto c = a.root() <=> b.root(); c != 0) return c;
  const auto ba = a.rootBlock();
  const auto bb = b.rootBlock();
  if (auto c = std::tie(ba.depth, ba.path) <=> std::tie(bb.depth, bb.path); c != 0) return c;
  if (auto c = a.rank() <=> b.rank(); c != 0) return c;
  return a.key().path <=> b.key().path;
}

TreeIndex shiftIndex(const TreeIndex& i, int targetLevel) {
  if (i.level() != 1) throw std::invalid_argument("shiftIndex expects a level-1 index");
  if (targetLevel < 1) throw std::invalid_argument("shiftIndex target level must be >= 1");
  if (i.rank() < targetLevel) {
    throw std::invalid_argument("shiftIndex: rank " + std::to_string(i.rank()) +
                                " too small for level " + std::to_string(targetLevel));
  }
  return TreeIndex(i.key(), targetLevel);
}

TreeIndex shiftIndexInverse(const TreeIndex& i) { return TreeIndex(i.key(), 1); }

TreeIndex parseTreeIndex(const std::string& label, int level, int dim) {
  const auto colon = label.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("tree index label needs 'root:bits', got '" + label + "'");
  }
  auto toInt = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad root in tree index label '" + label + "'");
    }
    return v;
  };
  const std::string_view rootPart = std::string_view(label).substr(0, colon);
  CellKey key;
  if (dim == 2) {
    const auto comma = rootPart.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("2D tree index needs 'jx,jy:bits', got '" + label + "'");
    }
    key.root = {toInt(rootPart.substr(0, comma)), toInt(rootPart.substr(comma + 1))};
  } else {
    key.root = {toInt(rootPart), 0};
  }
  for (char c : label.substr(colon + 1)) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad bit in '" + label + "'");
    key = key.child(c - '0');
  }
  return TreeIndex(key, level);
}

}  // namespace treedpp
