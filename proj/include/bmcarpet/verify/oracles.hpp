#pragma once

// Slow, direct reference implementations used only by the tests and the
// acceptance harness. None of them go through RowStream or the streaming
// labeler: cells come from enumerating words of D^k, classes from BFS over a
// dense bitmap or over all cell pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/rational.hpp"

namespace bmcarpet::verify {

struct OracleCell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const OracleCell&) const = default;
};

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// All N^k cells of Q_k, by enumerating words, sorted by (x, y).
inline std::vector<OracleCell> enumerate_cells(const DigitSet& ds, int level) {
  std::vector<OracleCell> cells{{0, 0}};
  for (int p = 0; p < level; ++p) {
    std::vector<OracleCell> next;
    next.reserve(cells.size() * ds.digits().size());
    for (const OracleCell& c : cells)
      for (const Digit& d : ds.digits()) next.push_back({c.x * ds.n() + d.i, c.y * ds.m() + d.j});
    cells.swap(next);
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

// Dense occupancy of Q_k (tilde = false) or of its 3x3 tiling (tilde = true,
// translate (0,0) at offset (n^k, m^k)). Row-major, index y * width + x.
struct Bitmap {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> bits;
  bool at(std::int64_t x, std::int64_t y) const {
    return x >= 0 && y >= 0 && x < width && y < height && bits[y * width + x];
  }
};

inline Bitmap dense_bitmap(const DigitSet& ds, int level, bool tilde = false) {
  const std::int64_t w = ipow(ds.n(), level);
  const std::int64_t h = ipow(ds.m(), level);
  Bitmap b;
  const int t = tilde ? 3 : 1;
  b.width = t * w;
  b.height = t * h;
  b.bits.assign(static_cast<std::size_t>(b.width * b.height), 0);
  for (const OracleCell& c : enumerate_cells(ds, level))
    for (int ty = 0; ty < t; ++ty)
      for (int tx = 0; tx < t; ++tx) b.bits[(c.y + ty * h) * b.width + c.x + tx * w] = 1;
  return b;
}

struct FloodComponent {
  std::int64_t cells = 0;
  std::int64_t xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

// BFS over occupied bits with |dX| <= dx, |dY| <= dy.
inline std::vector<FloodComponent> flood_fill(const Bitmap& b, std::int64_t dx = 1,
                                              std::int64_t dy = 1) {
  std::vector<std::uint8_t> seen(b.bits.size(), 0);
  std::vector<FloodComponent> out;
  for (std::int64_t y0 = 0; y0 < b.height; ++y0)
    for (std::int64_t x0 = 0; x0 < b.width; ++x0) {
      if (!b.at(x0, y0) || seen[y0 * b.width + x0]) continue;
      FloodComponent comp{0, x0, x0, y0, y0};
      std::deque<std::pair<std::int64_t, std::int64_t>> queue{{x0, y0}};
      seen[y0 * b.width + x0] = 1;
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        ++comp.cells;
        comp.xmin = std::min(comp.xmin, x);
        comp.xmax = std::max(comp.xmax, x);
        comp.ymin = std::min(comp.ymin, y);
        comp.ymax = std::max(comp.ymax, y);
        for (std::int64_t yy = y - dy; yy <= y + dy; ++yy)
          for (std::int64_t xx = x - dx; xx <= x + dx; ++xx) {
            if (!b.at(xx, yy) || seen[yy * b.width + xx]) continue;
            seen[yy * b.width + xx] = 1;
            queue.push_back({xx, yy});
          }
      }
      out.push_back(comp);
    }
  return out;
}

inline std::int64_t flood_component_count(const DigitSet& ds, int level) {
  return static_cast<std::int64_t>(flood_fill(dense_bitmap(ds, level)).size());
}

// Minimal CSC level by flood fill of the tiling; 0 when none up to k_max.
inline int brute_csc_level(const DigitSet& ds, int k_max) {
  for (int k = 1; k <= k_max; ++k) {
    const std::int64_t w = ipow(ds.n(), k);
    const std::int64_t h = ipow(ds.m(), k);
    for (const FloodComponent& c : flood_fill(dense_bitmap(ds, k, true)))
      if (c.xmin >= w && c.xmax < 2 * w && c.ymin >= h && c.ymax < 2 * h) return k;
  }
  return 0;
}

// Chebyshev gap between cells a and b at level k, as a rational. Cells are
// closed rectangles n^-k wide and m^-k tall.
inline Rational cell_distance(const OracleCell& a, const OracleCell& b, std::int64_t nk,
                              std::int64_t mk) {
  const std::int64_t gx = std::max<std::int64_t>(0, std::abs(a.x - b.x) - 1);
  const std::int64_t gy = std::max<std::int64_t>(0, std::abs(a.y - b.y) - 1);
  return std::max(Rational(BigInt(gx), BigInt(nk)), Rational(BigInt(gy), BigInt(mk)));
}

// Classes of the transitive closure of "cell distance <= delta", computed from
// the full O(cells^2) adjacency. Distances are compared as integers: the
// x gap gx n^-k is at most p/q iff gx * q <= p * n^k.
inline std::int64_t closure_classes(const std::vector<OracleCell>& cells, std::int64_t nk,
                                    std::int64_t mk, const Rational& delta) {
  const BigInt q = denominator(delta);
  const BigInt px = numerator(delta) * nk;
  const BigInt py = numerator(delta) * mk;
  auto within = [&](const OracleCell& a, const OracleCell& b) {
    const std::int64_t gx = std::max<std::int64_t>(0, std::abs(a.x - b.x) - 1);
    const std::int64_t gy = std::max<std::int64_t>(0, std::abs(a.y - b.y) - 1);
    return BigInt(gx) * q <= px && BigInt(gy) * q <= py;
  };
  const std::size_t c = cells.size();
  std::vector<std::uint8_t> seen(c, 0);
  std::int64_t classes = 0;
  for (std::size_t s = 0; s < c; ++s) {
    if (seen[s]) continue;
    ++classes;
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < c; ++v)
        if (!seen[v] && within(cells[u], cells[v])) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
  }
  return classes;
}

// Bracket of h(delta) from Q_L by the same two thresholds as h_bracket, but
// evaluated on cell distances directly: delta for the lower bound, delta minus
// two cell heights for the upper one.
struct OracleBracket {
  std::int64_t low = 0;
  std::int64_t high = 0;
};

inline OracleBracket closure_bracket(const DigitSet& ds, int level, const Rational& delta) {
  const auto cells = enumerate_cells(ds, level);
  const std::int64_t nk = ipow(ds.n(), level);
  const std::int64_t mk = ipow(ds.m(), level);
  OracleBracket b;
  b.low = closure_classes(cells, nk, mk, delta);
  const Rational cons = delta - Rational(BigInt(2), BigInt(mk));
  b.high = cons > 0 ? closure_classes(cells, nk, mk, cons) : static_cast<std::int64_t>(cells.size());
  return b;
}

// Descending MST weights between the 8-connected components of Q_k (Prim on
// the complete component graph; pair distances from all cell pairs). With
// euclidean = true the rectangle distance is Euclidean instead of Chebyshev.
inline std::vector<double> mst_weights_double(const DigitSet& ds, int level, bool euclidean) {
  const std::int64_t nk = ipow(ds.n(), level);
  const std::int64_t mk = ipow(ds.m(), level);
  const Bitmap bm = dense_bitmap(ds, level);
  std::vector<std::int64_t> label(bm.bits.size(), -1);
  std::vector<std::vector<OracleCell>> comps;
  for (std::int64_t y0 = 0; y0 < bm.height; ++y0)
    for (std::int64_t x0 = 0; x0 < bm.width; ++x0) {
      if (!bm.at(x0, y0) || label[y0 * bm.width + x0] >= 0) continue;
      const auto id = static_cast<std::int64_t>(comps.size());
      comps.emplace_back();
      std::deque<OracleCell> q{{x0, y0}};
      label[y0 * bm.width + x0] = id;
      while (!q.empty()) {
        const OracleCell c = q.front();
        q.pop_front();
        comps.back().push_back(c);
        for (std::int64_t yy = c.y - 1; yy <= c.y + 1; ++yy)
          for (std::int64_t xx = c.x - 1; xx <= c.x + 1; ++xx)
            if (bm.at(xx, yy) && label[yy * bm.width + xx] < 0) {
              label[yy * bm.width + xx] = id;
              q.push_back({xx, yy});
            }
      }
    }
  auto dist = [&](const OracleCell& a, const OracleCell& b) {
    const double gx = static_cast<double>(std::max<std::int64_t>(0, std::abs(a.x - b.x) - 1)) /
                      static_cast<double>(nk);
    const double gy = static_cast<double>(std::max<std::int64_t>(0, std::abs(a.y - b.y) - 1)) /
                      static_cast<double>(mk);
    return euclidean ? std::hypot(gx, gy) : std::max(gx, gy);
  };
  const std::size_t c = comps.size();
  std::vector<std::vector<double>> d(c, std::vector<double>(c, 0.0));
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = a + 1; b < c; ++b) {
      double best = std::numeric_limits<double>::infinity();
      for (const OracleCell& p : comps[a])
        for (const OracleCell& q : comps[b]) best = std::min(best, dist(p, q));
      d[a][b] = d[b][a] = best;
    }
  std::vector<double> weights;
  if (c == 0) return weights;
  std::vector<std::uint8_t> in(c, 0);
  std::vector<double> key(c, std::numeric_limits<double>::infinity());
  key[0] = 0.0;
  for (std::size_t it = 0; it < c; ++it) {
    std::size_t u = c;
    for (std::size_t v = 0; v < c; ++v)
      if (!in[v] && (u == c || key[v] < key[u])) u = v;
    in[u] = 1;
    if (it > 0) weights.push_back(key[u]);
    for (std::size_t v = 0; v < c; ++v)
      if (!in[v]) key[v] = std::min(key[v], d[u][v]);
  }
  std::sort(weights.begin(), weights.end(), std::greater<>());
  return weights;
}

// Exact Chebyshev MST weights as (value, multiplicity), descending: Kruskal
// over every cell pair of Q_k. Zero-length edges join touching cells, so the
// positive edges of the cell tree are the component tree.
inline std::vector<std::pair<Rational, std::int64_t>> exact_gap_oracle(const DigitSet& ds,
                                                                       int level) {
  const auto cells = enumerate_cells(ds, level);
  const std::int64_t nk = ipow(ds.n(), level);
  const std::int64_t mk = ipow(ds.m(), level);
  // Distance times n^k m^k, an integer.
  struct Edge {
    std::int64_t d;
    std::size_t a, b;
  };
  std::vector<Edge> edges;
  edges.reserve(cells.size() * (cells.size() - 1) / 2);
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const std::int64_t gx = std::max<std::int64_t>(0, std::abs(cells[a].x - cells[b].x) - 1);
      const std::int64_t gy = std::max<std::int64_t>(0, std::abs(cells[a].y - cells[b].y) - 1);
      edges.push_back({std::max(gx * mk, gy * nk), a, b});
    }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) { return l.d < r.d; });
  std::vector<std::size_t> parent(cells.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> root = [&](std::size_t v) {
    return parent[v] == v ? v : parent[v] = root(parent[v]);
  };
  std::map<Rational, std::int64_t, std::greater<>> grouped;
  for (const Edge& e : edges) {
    const std::size_t ra = root(e.a), rb = root(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    if (e.d > 0) ++grouped[Rational(BigInt(e.d), BigInt(nk) * mk)];
  }
  return {grouped.begin(), grouped.end()};
}

}  // namespace bmcarpet::verify
