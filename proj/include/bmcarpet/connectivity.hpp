#pragma once

// Connected components of Q_k and Q~_k, boundary diagnostics, component
// separation certificates and the finite / infinite component verdict.
//
// Cells are closed rectangles, so two occupied cells are connected iff
// |dX| <= 1 and |dY| <= 1. All tests here are exact integer comparisons.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/grid.hpp"
#include "bmcarpet/labeling.hpp"
#include "json.hpp"

namespace bmcarpet {

enum class Domain { Plain, Tilde };

inline const char* to_string(Domain d) { return d == Domain::Plain ? "Plain" : "Tilde"; }

struct BoundaryFlags {
  bool left = false;
  bool right = false;
  bool top = false;
  bool bottom = false;

  bool any() const noexcept { return left || right || top || bottom; }
  bool vertical() const noexcept { return top && bottom; }
  bool horizontal() const noexcept { return left && right; }
};

enum class Orientation { Vertical, Horizontal, Neither, Mixed };

inline const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::Vertical: return "Vertical";
    case Orientation::Horizontal: return "Horizontal";
    case Orientation::Neither: return "Neither";
    case Orientation::Mixed: return "Mixed";
  }
  return "?";
}

// Per-component aggregate carried through the labeler.
struct ComponentStats {
  std::int64_t anchor_x = 0;  // minimal (Y, X) cell
  std::int64_t anchor_y = 0;
  std::int64_t xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  std::int64_t cells = 0;

  static ComponentStats from_runs(std::int64_t y, std::span<const Run> runs) {
    ComponentStats s;
    s.anchor_x = runs.front().x0;
    s.anchor_y = y;
    s.xmin = runs.front().x0;
    s.xmax = runs.back().x1;
    s.ymin = s.ymax = y;
    for (const Run& r : runs) s.cells += r.length();
    return s;
  }

  void absorb(ComponentStats&& o) noexcept {
    if (o.anchor_y < anchor_y || (o.anchor_y == anchor_y && o.anchor_x < anchor_x)) {
      anchor_x = o.anchor_x;
      anchor_y = o.anchor_y;
    }
    xmin = std::min(xmin, o.xmin);
    xmax = std::max(xmax, o.xmax);
    ymin = std::min(ymin, o.ymin);
    ymax = std::max(ymax, o.ymax);
    cells += o.cells;
  }
};

struct ComponentInfo {
  std::int64_t anchor_x = 0;
  std::int64_t anchor_y = 0;
  std::int64_t cells = 0;
  BoundaryFlags flags;
};

struct ComponentSummary {
  int level = 0;
  Domain domain = Domain::Plain;
  std::int64_t component_count = 0;
  std::int64_t occupied_cells = 0;
  std::int64_t vertical_count = 0;
  std::int64_t horizontal_count = 0;
  std::int64_t vertical_or_horizontal_count = 0;
  std::int64_t boundary_touching_count = 0;
  // Components touching at least one side of the domain, ordered by anchor (Y, X).
  std::vector<ComponentInfo> boundary_components;
  Orientation orientation = Orientation::Neither;
};

inline Orientation orientation_of(const ComponentSummary& s) {
  if (s.component_count > 0 && s.vertical_count == s.component_count) return Orientation::Vertical;
  if (s.component_count > 0 && s.horizontal_count == s.component_count)
    return Orientation::Horizontal;
  if (s.vertical_or_horizontal_count == 0) return Orientation::Neither;
  return Orientation::Mixed;
}

// Boundary flags are taken against the full extent of the labeled domain: the
// unit square for Plain, [-1, 2]^2 for Tilde.
inline ComponentSummary count_components(const DigitSet& ds, int level,
                                         Domain domain = Domain::Plain,
                                         StreamLimits limits = {}) {
  RowStream stream(ds, level, domain == Domain::Plain ? Window::plain() : Window::tilde(), limits);
  ComponentSummary out;
  out.level = level;
  out.domain = domain;
  const std::int64_t w = stream.width();
  const std::int64_t h = stream.height();
  out.component_count = label_stream<ComponentStats>(
      stream, Reach{1, 1}, &ComponentStats::from_runs, [&](ComponentStats&& c) {
        BoundaryFlags f{c.xmin == 0, c.xmax == w - 1, c.ymax == h - 1, c.ymin == 0};
        out.occupied_cells += c.cells;
        out.vertical_count += f.vertical();
        out.horizontal_count += f.horizontal();
        out.vertical_or_horizontal_count += f.vertical() || f.horizontal();
        if (f.any()) {
          ++out.boundary_touching_count;
          out.boundary_components.push_back({c.anchor_x, c.anchor_y, c.cells, f});
        }
      });
  std::sort(out.boundary_components.begin(), out.boundary_components.end(),
            [](const ComponentInfo& a, const ComponentInfo& b) {
              return a.anchor_y != b.anchor_y ? a.anchor_y < b.anchor_y : a.anchor_x < b.anchor_x;
            });
  out.orientation = orientation_of(out);
  return out;
}

inline nlohmann::json to_json(const BoundaryFlags& f) {
  return {{"left", f.left}, {"right", f.right}, {"top", f.top}, {"bottom", f.bottom}};
}

inline nlohmann::json to_json(const ComponentSummary& s, bool list_components = false) {
  nlohmann::json j{{"level", s.level},
                   {"domain", to_string(s.domain)},
                   {"component_count", s.component_count},
                   {"occupied_cells", s.occupied_cells},
                   {"vertical_count", s.vertical_count},
                   {"horizontal_count", s.horizontal_count},
                   {"boundary_touching_count", s.boundary_touching_count},
                   {"orientation", to_string(s.orientation)}};
  if (list_components) {
    nlohmann::json list = nlohmann::json::array();
    for (const ComponentInfo& c : s.boundary_components)
      list.push_back({{"anchor", {c.anchor_x, c.anchor_y}},
                      {"cells", c.cells},
                      {"boundary", to_json(c.flags)}});
    j["boundary_components"] = std::move(list);
  }
  return j;
}

// A component of Q_k0 that is also a component of Q~_k0. Cell coordinates
// are plain level-k0 indices.
struct CscCertificate {
  int level = 0;
  std::int64_t anchor_x = 0;
  std::int64_t anchor_y = 0;
  std::int64_t cells = 0;
  std::int64_t xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

struct CscSearch {
  std::optional<CscCertificate> certificate;
  int levels_searched = 0;  // levels fully examined
  bool cap_hit = false;
  std::string cap_message;
};

// The components of Q~_k lying inside the centre translate are exactly the
// components of Q_k that are also components of Q~_k.
inline std::optional<CscCertificate> csc_certificate_at(const DigitSet& ds, int level,
                                                        StreamLimits limits = {}) {
  RowStream stream(ds, level, Window::tilde(), limits);
  const std::int64_t w = stream.tile_width();
  const std::int64_t h = stream.tile_height();
  std::optional<ComponentStats> best;
  label_stream<ComponentStats>(stream, Reach{1, 1}, &ComponentStats::from_runs,
                               [&](ComponentStats&& c) {
                                 const bool inside = c.xmin >= w && c.xmax < 2 * w &&
                                                     c.ymin >= h && c.ymax < 2 * h;
                                 if (!inside) return;
                                 if (!best || c.anchor_y < best->anchor_y ||
                                     (c.anchor_y == best->anchor_y && c.anchor_x < best->anchor_x))
                                   best = c;
                               });
  if (!best) return std::nullopt;
  return CscCertificate{level,          best->anchor_x - w, best->anchor_y - h, best->cells,
                        best->xmin - w, best->xmax - w,     best->ymin - h,     best->ymax - h};
}

inline CscSearch find_csc_certificate(const DigitSet& ds, int k_max, StreamLimits limits = {}) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  CscSearch out;
  for (int k = 1; k <= k_max; ++k) {
    try {
      out.certificate = csc_certificate_at(ds, k, limits);
    } catch (const CapExceeded& e) {
      out.cap_hit = true;
      out.cap_message = e.what();
      return out;
    }
    out.levels_searched = k;
    if (out.certificate) return out;
  }
  return out;
}

// Independent re-check of a certificate: flood fill from the anchor over the
// occupancy predicate of Q~_k (digit test, no streaming), requiring the fill
// to stay inside the centre translate, to have the claimed size and to have
// the anchor as its minimal (Y, X) cell. `max_cells` bounds the fill.
inline bool verify_csc_certificate(const DigitSet& ds, const CscCertificate& cert,
                                   std::int64_t max_cells = 10'000'000) {
  const int k = cert.level;
  const std::int64_t w = checked_pow(ds.n(), k);
  const std::int64_t h = checked_pow(ds.m(), k);
  auto occupied_tilde = [&](std::int64_t x, std::int64_t y) {
    if (x < -w || x >= 2 * w || y < -h || y >= 2 * h) return false;
    const std::int64_t px = ((x % w) + w) % w;
    const std::int64_t py = ((y % h) + h) % h;
    return is_occupied(ds, k, px, py);
  };
  if (!occupied_tilde(cert.anchor_x, cert.anchor_y)) return false;

  struct Key {
    std::int64_t x, y;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& c) const noexcept {
      return std::hash<std::int64_t>{}(c.x * 0x9E3779B97F4A7C15ULL ^ c.y);
    }
  };
  std::unordered_set<Key, Hash> seen{{cert.anchor_x, cert.anchor_y}};
  std::deque<Key> queue{{cert.anchor_x, cert.anchor_y}};
  while (!queue.empty()) {
    const Key c = queue.front();
    queue.pop_front();
    if (c.x < 0 || c.x >= w || c.y < 0 || c.y >= h) return false;  // leaked out of Q_k
    if (c.y < cert.anchor_y || (c.y == cert.anchor_y && c.x < cert.anchor_x)) return false;
    for (std::int64_t dy = -1; dy <= 1; ++dy)
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const Key nb{c.x + dx, c.y + dy};
        if ((dx == 0 && dy == 0) || seen.count(nb) || !occupied_tilde(nb.x, nb.y)) continue;
        seen.insert(nb);
        if (static_cast<std::int64_t>(seen.size()) > max_cells) return false;
        queue.push_back(nb);
      }
  }
  return static_cast<std::int64_t>(seen.size()) == cert.cells;
}

inline nlohmann::json to_json(const CscCertificate& c) {
  return {{"level", c.level},
          {"anchor", {c.anchor_x, c.anchor_y}},
          {"cells", c.cells},
          {"bbox", {{"xmin", c.xmin}, {"xmax", c.xmax}, {"ymin", c.ymin}, {"ymax", c.ymax}}}};
}

inline nlohmann::json to_json(const CscSearch& s) {
  nlohmann::json j{{"found", s.certificate.has_value()},
                   {"levels_searched", s.levels_searched},
                   {"cap_hit", s.cap_hit}};
  j["certificate"] = s.certificate ? to_json(*s.certificate) : nlohmann::json(nullptr);
  if (s.cap_hit) j["cap_message"] = s.cap_message;
  return j;
}

enum class Evidence { CscCertificate, LinearRule, FullSquare, GrowthObservation };

inline const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::CscCertificate: return "CscCertificate";
    case Evidence::LinearRule: return "LinearRule";
    case Evidence::FullSquare: return "FullSquare";
    case Evidence::GrowthObservation: return "GrowthObservation";
  }
  return "?";
}

struct CardinalityVerdict {
  Cardinality verdict = Cardinality::Unknown;
  std::int64_t finite_count = 0;  // meaningful for Finite
  Evidence evidence = Evidence::GrowthObservation;
  std::optional<CscCertificate> certificate;
  std::vector<std::int64_t> observed_counts;  // #C(Q_k), k = 1..
  int levels_searched = 0;
};

inline constexpr int kDefaultCscLevels = 6;

inline CardinalityVerdict infer_component_cardinality(const DigitSet& ds,
                                                      const Classification& cls,
                                                      int k_max = kDefaultCscLevels,
                                                      StreamLimits limits = {}) {
  CardinalityVerdict v;
  if (cls.N == static_cast<std::int64_t>(ds.n()) * ds.m()) {
    v.verdict = Cardinality::Finite;
    v.finite_count = 1;
    v.evidence = Evidence::FullSquare;
    return v;
  }
  if (cls.is_linear) {
    // A x [0,1] (or [0,1] x B): one segment/strip when the factor is a single
    // digit, otherwise a Cantor set times an interval.
    v.evidence = Evidence::LinearRule;
    if (cls.product_factor_size == 1) {
      v.verdict = Cardinality::Finite;
      v.finite_count = 1;
    } else {
      v.verdict = Cardinality::Infinite;
    }
    return v;
  }
  const CscSearch search = find_csc_certificate(ds, k_max, limits);
  v.levels_searched = search.levels_searched;
  if (search.certificate) {
    v.verdict = Cardinality::Infinite;
    v.evidence = Evidence::CscCertificate;
    v.certificate = search.certificate;
    return v;
  }
  v.verdict = Cardinality::Unknown;
  v.evidence = Evidence::GrowthObservation;
  for (int k = 1; k <= k_max; ++k) {
    try {
      v.observed_counts.push_back(count_components(ds, k, Domain::Plain, limits).component_count);
    } catch (const CapExceeded&) {
      break;
    }
  }
  return v;
}

inline nlohmann::json to_json(const CardinalityVerdict& v) {
  nlohmann::json j{{"verdict", to_string(v.verdict)},
                   {"evidence", to_string(v.evidence)},
                   {"levels_searched", v.levels_searched}};
  j["count"] = v.verdict == Cardinality::Finite ? nlohmann::json(v.finite_count)
                                                 : nlohmann::json(nullptr);
  j["certificate"] = v.certificate ? to_json(*v.certificate) : nlohmann::json(nullptr);
  j["observed_counts"] = v.observed_counts;
  return j;
}

}  // namespace bmcarpet
