#pragma once

// Gap sequences and the delta-equivalence counting function h(delta).
//
// Everything is measured in the maximum (Chebyshev) metric. At level k the
// distance between two cells is
//   max((|dX|-1)+ / n^k, (|dY|-1)+ / m^k),
// a multiple of 1/(n^k m^k), so component distances are kept as integer
// numerators over that common denominator and only become Rationals on output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <iterator>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/connectivity.hpp"
#include "bmcarpet/errors.hpp"
#include "bmcarpet/grid.hpp"
#include "bmcarpet/labeling.hpp"
#include "bmcarpet/rational.hpp"
#include "bmcarpet/union_find.hpp"
#include "json.hpp"

namespace bmcarpet {

struct GapEntry {
  Rational value;
  std::int64_t multiplicity = 0;
  friend bool operator==(const GapEntry&, const GapEntry&) = default;
};

enum class GapSource { FiniteLevel, StepFunction, Reference };

inline const char* to_string(GapSource s) {
  switch (s) {
    case GapSource::FiniteLevel: return "FiniteLevel";
    case GapSource::StepFunction: return "StepFunction";
    case GapSource::Reference: return "Reference";
  }
  return "?";
}

struct GapSequence {
  std::vector<GapEntry> entries;  // strictly descending values
  GapSource source = GapSource::FiniteLevel;
  int level = 0;                  // FiniteLevel only
  std::int64_t classes = 1;       // sum of multiplicities + 1

  std::int64_t total_multiplicity() const {
    std::int64_t t = 0;
    for (const GapEntry& e : entries) t += e.multiplicity;
    return t;
  }
};

inline nlohmann::json to_json(const GapSequence& g) {
  nlohmann::json list = nlohmann::json::array();
  for (const GapEntry& e : g.entries)
    list.push_back({{"value", to_string(e.value)}, {"multiplicity", e.multiplicity}});
  nlohmann::json j{{"source", to_string(g.source)}, {"classes", g.classes}, {"gaps", list}};
  if (g.source == GapSource::FiniteLevel) j["level"] = g.level;
  return j;
}

inline constexpr std::int64_t kDefaultMaxComponents = 1000;

namespace detail {

struct RowRuns {
  std::int64_t y;
  std::vector<Run> runs;  // sorted
};

struct ComponentGeometry {
  std::vector<std::pair<std::int64_t, Run>> cells;  // (y, run), unordered until finalized
  std::int64_t xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  std::vector<RowRuns> rows;

  static ComponentGeometry from_runs(std::int64_t y, std::span<const Run> runs) {
    ComponentGeometry g;
    for (const Run& r : runs) g.cells.emplace_back(y, r);
    g.xmin = runs.front().x0;
    g.xmax = runs.back().x1;
    g.ymin = g.ymax = y;
    return g;
  }
  void absorb(ComponentGeometry&& o) {
    if (o.cells.size() > cells.size()) std::swap(cells, o.cells);
    cells.insert(cells.end(), o.cells.begin(), o.cells.end());
    xmin = std::min(xmin, o.xmin);
    xmax = std::max(xmax, o.xmax);
    ymin = std::min(ymin, o.ymin);
    ymax = std::max(ymax, o.ymax);
  }
  void finalize() {
    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second.x0 < b.second.x0;
    });
    for (const auto& [y, r] : cells) {
      if (rows.empty() || rows.back().y != y) rows.push_back({y, {}});
      rows.back().runs.push_back(r);
    }
    cells.clear();
    cells.shrink_to_fit();
  }
};

inline std::int64_t cell_gap(std::int64_t lo_hi, std::int64_t hi_lo) {
  // cells strictly between the end `lo_hi` of one interval and start `hi_lo` of another
  return std::max<std::int64_t>(0, hi_lo - lo_hi - 1);
}

// min over runs of the horizontal cell gap between two sorted run lists.
inline std::int64_t min_run_gap(const std::vector<Run>& a, const std::vector<Run>& b) {
  std::int64_t best = INT64_MAX;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const Run& ra = a[i];
    const Run& rb = b[j];
    if (ra.x1 < rb.x0) {
      best = std::min(best, cell_gap(ra.x1, rb.x0));
      ++i;
    } else if (rb.x1 < ra.x0) {
      best = std::min(best, cell_gap(rb.x1, ra.x0));
      ++j;
    } else {
      return 0;
    }
  }
  return best;
}

struct Scale {
  std::int64_t nk;  // n^k
  std::int64_t mk;  // m^k
  // distance numerator over n^k m^k
  std::int64_t key(std::int64_t gx, std::int64_t gy) const { return std::max(gx * mk, gy * nk); }
};

inline std::int64_t bbox_key(const ComponentGeometry& a, const ComponentGeometry& b, Scale s) {
  const std::int64_t gx =
      a.xmax < b.xmin ? cell_gap(a.xmax, b.xmin) : (b.xmax < a.xmin ? cell_gap(b.xmax, a.xmin) : 0);
  const std::int64_t gy =
      a.ymax < b.ymin ? cell_gap(a.ymax, b.ymin) : (b.ymax < a.ymin ? cell_gap(b.ymax, a.ymin) : 0);
  return s.key(gx, gy);
}

// Exact set distance numerator; `floor_key` is a known lower bound that
// allows an early exit.
inline std::int64_t exact_key(const ComponentGeometry& a, const ComponentGeometry& b, Scale s,
                              std::int64_t floor_key) {
  std::int64_t best = INT64_MAX;
  for (const RowRuns& ra : a.rows) {
    // rows of b ordered outward from ra.y
    auto mid = std::lower_bound(b.rows.begin(), b.rows.end(), ra.y,
                                [](const RowRuns& r, std::int64_t y) { return r.y < y; });
    auto up = mid;
    auto down = mid;
    while (up != b.rows.end() || down != b.rows.begin()) {
      const RowRuns* next = nullptr;
      if (up != b.rows.end() &&
          (down == b.rows.begin() || up->y - ra.y <= ra.y - std::prev(down)->y)) {
        next = &*up;
        ++up;
      } else {
        --down;
        next = &*down;
      }
      const std::int64_t gy = std::max<std::int64_t>(0, std::abs(next->y - ra.y) - 1);
      if (gy * s.nk >= best) break;  // rows only get farther
      const std::int64_t key = s.key(min_run_gap(ra.runs, next->runs), gy);
      best = std::min(best, key);
      if (best <= floor_key) return best;
    }
  }
  return best;
}

}  // namespace detail

// Single-linkage (minimum spanning tree) weights between the components of
// Q_k, grouped into a descending gap sequence.
inline GapSequence component_gap_sequence(const DigitSet& ds, int level,
                                          std::int64_t max_components = kDefaultMaxComponents,
                                          StreamLimits limits = {}) {
  using detail::ComponentGeometry;
  RowStream stream(ds, level, Window::plain(), limits);
  const detail::Scale scale{stream.tile_width(), stream.tile_height()};
  if (scale.nk > (std::int64_t{1} << 62) / scale.mk)
    throw CapExceeded("n^k m^k exceeds 2^62", static_cast<long double>(scale.nk) * scale.mk,
                      static_cast<long double>(std::int64_t{1} << 62));
  std::vector<ComponentGeometry> comps;
  label_stream<ComponentGeometry>(stream, Reach{1, 1}, &ComponentGeometry::from_runs,
                                  [&](ComponentGeometry&& g) {
                                    if (static_cast<std::int64_t>(comps.size()) >= max_components)
                                      throw CapExceeded(
                                          "more than " + std::to_string(max_components) +
                                              " components at level " + std::to_string(level),
                                          static_cast<long double>(comps.size() + 1),
                                          static_cast<long double>(max_components));
                                    comps.push_back(std::move(g));
                                  });
  for (auto& c : comps) c.finalize();

  // Lazy Kruskal: bounding-box distances are lower bounds; a pair is only
  // measured exactly when it reaches the front of the queue.
  struct Item {
    std::int64_t key;
    bool exact;
    std::uint32_t a, b;
    bool operator>(const Item& o) const {
      if (key != o.key) return key > o.key;
      if (exact != o.exact) return !exact;  // exact first on ties
      return std::tie(a, b) > std::tie(o.a, o.b);
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  const auto count = static_cast<std::uint32_t>(comps.size());
  for (std::uint32_t a = 0; a < count; ++a)
    for (std::uint32_t b = a + 1; b < count; ++b)
      queue.push({detail::bbox_key(comps[a], comps[b], scale), false, a, b});

  UnionFind uf(count);
  std::vector<std::int64_t> weights;
  while (!queue.empty() && uf.set_count() > 1) {
    Item it = queue.top();
    queue.pop();
    if (uf.find(it.a) == uf.find(it.b)) continue;
    if (!it.exact) {
      const std::int64_t k = detail::exact_key(comps[it.a], comps[it.b], scale, it.key);
      if (k > it.key) {
        queue.push({k, true, it.a, it.b});
        continue;
      }
    }
    uf.unite(it.a, it.b);
    weights.push_back(it.key);
  }

  GapSequence out;
  out.source = GapSource::FiniteLevel;
  out.level = level;
  out.classes = count;
  std::sort(weights.begin(), weights.end(), std::greater<>());
  const BigInt denom = BigInt(scale.nk) * scale.mk;
  for (std::size_t i = 0; i < weights.size();) {
    std::size_t j = i;
    while (j < weights.size() && weights[j] == weights[i]) ++j;
    out.entries.push_back({Rational(BigInt(weights[i]), denom), static_cast<std::int64_t>(j - i)});
    i = j;
  }
  return out;
}

// Reach of the relation "cell rectangles within Chebyshev distance delta" at
// level L: |dX| <= floor(delta n^L) + 1 and |dY| <= floor(delta m^L) + 1.
// A positive x_level replaces L in the first bound.
inline Reach reach_for(const DigitSet& ds, int level, const Rational& delta, int x_level = 0) {
  const int lx = x_level > 0 ? x_level : level;
  const BigInt rx = floor_of(delta * big_pow(ds.n(), lx)) + 1;
  const BigInt ry = floor_of(delta * big_pow(ds.m(), level)) + 1;
  constexpr std::int64_t kMax = std::int64_t{1} << 62;
  auto clamp = [&](const BigInt& v) { return v > kMax ? kMax : v.convert_to<std::int64_t>(); };
  return {clamp(rx), clamp(ry)};
}

// h of the finite union Q_k itself: number of delta-equivalence classes.
inline std::int64_t h_of_approximation(const DigitSet& ds, int level, const Rational& delta,
                                       StreamLimits limits = {}) {
  if (delta <= 0) throw DomainError("delta must be positive");
  RowStream stream(ds, level, Window::plain(), limits);
  return count_classes(stream, reach_for(ds, level, delta));
}

struct HBracket {
  Rational delta;
  int level = 0;
  int x_level = 0;  // equals level unless mixed-level rectangles were used
  std::int64_t h_low = 0;
  std::int64_t h_high = 0;
  // false when h_high is the occupied-cell fallback and delta is below the longer
  // cell side, where one cell may hold several classes and the fallback is not a bound.
  bool upper_certified = true;
};

struct HBracketOptions {
  std::int64_t max_runs = 200'000'000;
};

// Every cell meets the carpet and the cells cover it, so classes of cells
// within delta (liberal) can only merge carpet classes, while cells within
// delta' = delta - 2 s (conservative, s the longer cell side) hold points that
// are all within delta. x_level > 0 uses the mixed-level rectangles of RowStream.
inline HBracket h_bracket(const DigitSet& ds, int level, const Rational& delta,
                          HBracketOptions opts = {}, int x_level = 0) {
  if (level < 1) throw DomainError("level must be >= 1");
  if (x_level < 0 || x_level > level) throw DomainError("x_level must lie in [1, level]");
  if (delta <= 0) throw DomainError("delta must be positive");
  const int lx = x_level > 0 ? x_level : level;
  const StreamLimits limits{-1, opts.max_runs};
  HBracket out;
  out.delta = delta;
  out.level = level;
  out.x_level = lx;
  {
    RowStream stream(ds, level, Window::plain(), limits, lx);
    out.h_low = count_classes(stream, reach_for(ds, level, delta, lx));
  }
  const Rational side = std::max(Rational(BigInt(1), big_pow(ds.n(), lx)),
                                 Rational(BigInt(1), big_pow(ds.m(), level)));
  const Rational conservative = delta - 2 * side;
  if (conservative > 0) {
    RowStream stream(ds, level, Window::plain(), limits, lx);
    out.h_high = count_classes(stream, reach_for(ds, level, conservative, lx));
  } else {
    out.h_high = occupied_cell_count(ds, level, 1, lx);
    out.upper_certified = delta >= side;
  }
  return out;
}

inline nlohmann::json to_json(const HBracket& b) {
  return {{"delta", to_string(b.delta)}, {"level", b.level},   {"x_level", b.x_level},
          {"h_low", b.h_low},            {"h_high", b.h_high}, {"upper_certified", b.upper_certified}};
}

struct HStep {
  Rational delta;
  std::int64_t h = 0;
};

// Jump points (delta_j, h(delta_j)) in descending delta; h is constant on
// [delta_{j+1}, delta_j). The last entry only contributes its h value (the
// level below the smallest listed jump), so its delta may be 0.
inline GapSequence gap_from_h(std::span<const HStep> steps) {
  if (steps.empty()) throw DomainError("empty step function");
  if (steps.front().h != 1) throw DomainError("step function must start at h = 1");
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (!(steps[i].delta < steps[i - 1].delta))
      throw DomainError("step deltas must be strictly descending");
    if (steps[i].h <= steps[i - 1].h) throw DomainError("h must strictly increase as delta falls");
  }
  GapSequence out;
  out.source = GapSource::StepFunction;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    out.entries.push_back({steps[i].delta, steps[i + 1].h - steps[i].h});
  out.classes = steps.back().h;
  return out;
}

// Step function induced by a gap sequence: (delta_j, 1 + sum_{i<j} m_i),
// closed by (0, classes).
inline std::vector<HStep> steps_from_gaps(const GapSequence& g) {
  std::vector<HStep> steps;
  std::int64_t h = 1;
  for (const GapEntry& e : g.entries) {
    steps.push_back({e.value, h});
    h += e.multiplicity;
  }
  steps.push_back({Rational(0), h});
  return steps;
}

// Gaps of the self-similar Cantor set K(n, {0..n0-1}):
// delta_j = (n - n0) / ((n - 1) n^j), h(delta_j) = n0^(j-1).
inline GapSequence cantor_gap_reference(std::int64_t n, std::int64_t n0, int j_max) {
  if (n0 < 2 || n0 > n - 1) throw DomainError("cantor reference needs 2 <= n0 <= n-1");
  if (j_max < 1) throw DomainError("j_max must be >= 1");
  GapSequence out;
  out.source = GapSource::Reference;
  BigInt npow = 1;
  BigInt hprev = 1;  // n0^(j-1)
  for (int j = 1; j <= j_max; ++j) {
    npow *= n;
    const BigInt hnext = hprev * n0;
    out.entries.push_back({Rational(BigInt(n - n0), BigInt(n - 1) * npow),
                           (hnext - hprev).convert_to<std::int64_t>()});
    hprev = hnext;
  }
  out.classes = hprev.convert_to<std::int64_t>();
  return out;
}

struct ExponentSample {
  HBracket bracket;
  bool used = false;  // tight enough to enter the regression
};

struct ExponentReport {
  double fitted_gamma = 0.0;
  double stderr_gamma = 0.0;
  std::vector<ExponentSample> samples;
  PredictedExponent predicted;
  std::optional<double> relative_error;
};

inline constexpr double kMaxBracketRatio = 2.0;

// Least-squares slope of log h against log(1/delta), h the geometric mean of
// the bracket. Brackets with h_high / h_low > 2 or an uncertified upper
// bound are excluded.
inline ExponentReport fit_h_exponent(std::span<const HBracket> samples,
                                     PredictedExponent predicted = {}) {
  ExponentReport rep;
  rep.predicted = predicted;
  std::vector<double> xs, ys;
  for (const HBracket& b : samples) {
    const bool tight = b.upper_certified && b.h_low >= 1 && b.h_high >= b.h_low &&
                       static_cast<double>(b.h_high) <= kMaxBracketRatio * b.h_low;
    rep.samples.push_back({b, tight});
    if (!tight) continue;
    xs.push_back(-std::log(to_double(b.delta)));
    ys.push_back(0.5 * (std::log(static_cast<double>(b.h_low)) +
                        std::log(static_cast<double>(b.h_high))));
  }
  if (xs.size() < 3)
    throw DomainError("exponent fit needs at least 3 tight samples, have " +
                      std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0) throw DomainError("exponent fit needs samples at distinct deltas");
  rep.fitted_gamma = sxy / sxx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + rep.fitted_gamma * (xs[i] - mx));
    sse += r * r;
  }
  rep.stderr_gamma = xs.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
  if (predicted.defined())
    rep.relative_error = std::abs(rep.fitted_gamma - predicted.gamma) / predicted.gamma;
  return rep;
}

inline nlohmann::json to_json(const ExponentReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const ExponentSample& s : r.samples) {
    nlohmann::json j = to_json(s.bracket);
    j["used"] = s.used;
    samples.push_back(std::move(j));
  }
  nlohmann::json j{{"fitted_gamma", r.fitted_gamma},
                   {"stderr", r.stderr_gamma},
                   {"predicted", to_json(r.predicted)},
                   {"samples", std::move(samples)}};
  j["relative_error"] = r.relative_error ? nlohmann::json(*r.relative_error) : nlohmann::json(nullptr);
  return j;
}

// Smallest L with m^L >= n^k: level-L cells are then no taller than n^-k.
inline int matching_row_level(const DigitSet& ds, int k) {
  const BigInt target = big_pow(ds.n(), k);
  BigInt v = 1;
  int L = 0;
  while (v < target) {
    v *= ds.m();
    ++L;
  }
  return L;
}

struct ExponentPlan {
  int k_min = 1;
  int k_max = 4;
  int level_offset = 1;  // x level l >= k + offset, row level = matching_row_level(l)
  // Gap values tend to sit on the lattice n^-k, where h jumps and the bracket
  // is loose; sampling just below it keeps the bracket tight.
  Rational delta_scale{2, 3};
  HBracketOptions bracket;
};

// Brackets at delta = delta_scale n^-k for k in [k_min, k_max], on rectangles
// that are about n^-(k + offset) on each side.
inline std::vector<HBracket> exponent_samples(const DigitSet& ds, const ExponentPlan& plan) {
  if (plan.k_min < 1 || plan.k_max < plan.k_min) throw DomainError("bad k range");
  if (plan.level_offset < 1) throw DomainError("level offset must be >= 1");
  if (plan.delta_scale <= 0) throw DomainError("delta scale must be positive");
  std::vector<HBracket> out;
  for (int k = plan.k_min; k <= plan.k_max; ++k) {
    const Rational delta = plan.delta_scale / big_pow(ds.n(), k);
    // Raise the column level until the conservative threshold delta - 2 n^-l
    // keeps at least half of delta; with small n the offset alone can leave
    // it at zero.
    int lx = k + plan.level_offset;
    while (4 * Rational(BigInt(1), big_pow(ds.n(), lx)) > delta) ++lx;
    out.push_back(h_bracket(ds, matching_row_level(ds, lx), delta, plan.bracket, lx));
  }
  return out;
}

}  // namespace bmcarpet
