#include "treedpp/geometry.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace treedpp {

namespace {

// Splits the interleaved path of a 2D cell into per-axis offsets.
void deinterleave(std::uint64_t path, int depth, std::uint64_t& xi, int& nx,
                  std::uint64_t& yi, int& ny) {
  xi = yi = 0;
  nx = ny = 0;
  for (int k = 1; k <= depth; ++k) {
    const std::uint64_t b = (path >> (depth - k)) & 1U;
    if (k % 2 == 1) {
      xi = (xi << 1) | b;
      ++nx;
    } else {
      yi = (yi << 1) | b;
      ++ny;
    }
  }
}

std::int64_t parseInt(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::pair<std::int64_t, std::int64_t> parseRange(std::string_view s) {
  const auto dots = s.find("..");
  if (dots == std::string_view::npos) {
    throw std::invalid_argument("expected a..b, got '" + std::string(s) + "'");
  }
  const auto a = parseInt(s.substr(0, dots));
  const auto b = parseInt(s.substr(dots + 2));
  if (b <= a) throw std::invalid_argument("empty range '" + std::string(s) + "'");
  return {a, b};
}

}  // namespace

Box cellBox(const CellKey& key, int dim) {
  Box box;
  box.dim = dim;
  if (dim == 1) {
    const double w = std::ldexp(1.0, -key.depth);
    box.lo[0] = double(key.root.x) + double(key.path) * w;
    box.hi[0] = box.lo[0] + w;
    return box;
  }
  std::uint64_t xi, yi;
  int nx, ny;
  deinterleave(key.path, key.depth, xi, nx, yi, ny);
  const double wx = std::ldexp(1.0, -nx);
  const double wy = std::ldexp(1.0, -ny);
  box.lo = {double(key.root.x) + double(xi) * wx, double(key.root.y) + double(yi) * wy};
  box.hi = {box.lo[0] + wx, box.lo[1] + wy};
  return box;
}

std::optional<CellKey> intersect(const CellKey& a, const CellKey& b) {
  if (a.isWithin(b)) return a;
  if (b.isWithin(a)) return b;
  return std::nullopt;
}

std::vector<Root> Window::roots() const {
  std::vector<Root> out;
  out.reserve(std::size_t(rootCount()));
  for (auto x = x0; x < x1; ++x) {
    if (dim == 1) {
      out.push_back({x, 0});
      continue;
    }
    for (auto y = y0; y < y1; ++y) out.push_back({x, y});
  }
  return out;
}

bool Window::contains(const Point& p) const { return box().contains(p); }

bool Window::contains(const Root& r) const {
  if (r.x < x0 || r.x >= x1) return false;
  return dim == 1 ? r.y == 0 : (r.y >= y0 && r.y < y1);
}

Box Window::box() const {
  Box b;
  b.dim = dim;
  b.lo = {double(x0), dim == 2 ? double(y0) : 0.0};
  b.hi = {double(x1), dim == 2 ? double(y1) : 0.0};
  return b;
}

std::string Window::toString() const {
  std::string s = std::to_string(x0) + ".." + std::to_string(x1);
  if (dim == 2) s += "," + std::to_string(y0) + ".." + std::to_string(y1);
  return s;
}

Window parseWindow(const std::string& text) {
  Window w;
  const auto comma = text.find(',');
  std::tie(w.x0, w.x1) = parseRange(std::string_view(text).substr(0, comma));
  if (comma == std::string::npos) {
    w.dim = 1;
    w.y0 = 0;
    w.y1 = 1;
  } else {
    w.dim = 2;
    std::tie(w.y0, w.y1) = parseRange(std::string_view(text).substr(comma + 1));
  }
  return w;
}

}  // namespace treedpp
