#include <algorithm>

#include "bmcarpet/connectivity.hpp"
#include "bmcarpet/verify/acceptance.hpp"
#include "bmcarpet/verify/oracles.hpp"
#include "catch_amalgamated.hpp"

using namespace bmcarpet;

namespace {

DigitSet corpus(const char* name) {
  return load_digit_set(std::string(BMCARPET_CORPUS_DIR) + "/" + name);
}

// Column 0 and row 0 of a 3x3 grid: every Q_k is connected, so the counts
// stay at 1 while no component of Q_k is isolated in the tiling.
DigitSet l_shape() { return DigitSet::make(3, 3, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {2, 0}}); }

bool small(const DigitSet& ds, int k, std::int64_t cells = 10000) {
  return verify::ipow(ds.size(), k) <= cells;
}

}  // namespace

TEST_CASE("component counts of corpus examples", "[connectivity]") {
  const ComponentSummary d1 = count_components(corpus("d1.json"), 1);
  CHECK(d1.component_count == 6);
  CHECK(d1.occupied_cells == 8);
  // The chain in column 8 touches right, top and bottom.
  const auto chain = std::find_if(d1.boundary_components.begin(), d1.boundary_components.end(),
                                  [](const ComponentInfo& c) { return c.cells == 3; });
  REQUIRE(chain != d1.boundary_components.end());
  CHECK(chain->anchor_x == 8);
  CHECK(chain->anchor_y == 0);
  CHECK(chain->flags.right);
  CHECK(chain->flags.vertical());
  CHECK(d1.vertical_count == 1);
  CHECK(d1.orientation == Orientation::Mixed);

  for (int k = 1; k <= 4; ++k) {
    const auto full = count_components(corpus("full_square.json"), k);
    CHECK(full.component_count == 1);
    CHECK(full.orientation == Orientation::Vertical);
    CHECK(count_components(corpus("full_square.json"), k, Domain::Tilde).component_count == 1);
  }
  for (int k = 1; k <= 6; ++k) {
    CHECK(count_components(corpus("e3_standin.json"), k).component_count == verify::ipow(2, k));
    const auto ss = count_components(corpus("strong_separation.json"), k);
    CHECK(ss.component_count == verify::ipow(2, k));
    CHECK(ss.occupied_cells == ss.component_count);
  }
}

TEST_CASE("csc certificate examples", "[connectivity][csc]") {
  const DigitSet ss = corpus("strong_separation.json");
  const CscSearch s = find_csc_certificate(ss, 4);
  REQUIRE(s.certificate);
  CHECK(s.certificate->level == 1);
  CHECK(s.certificate->anchor_x == 0);
  CHECK(s.certificate->anchor_y == 0);
  CHECK(s.certificate->cells == 1);
  CHECK(verify_csc_certificate(ss, *s.certificate));

  const CscSearch full = find_csc_certificate(corpus("full_square.json"), 5);
  CHECK_FALSE(full.certificate);
  CHECK(full.levels_searched == 5);
  CHECK_FALSE(full.cap_hit);

  const DigitSet d1 = corpus("d1.json");
  const CscSearch c1 = find_csc_certificate(d1, 5);
  REQUIRE(c1.certificate);
  CHECK(c1.certificate->level == verify::brute_csc_level(d1, 3));
  CHECK(c1.certificate->level == 2);
  CHECK(verify_csc_certificate(d1, *c1.certificate));

  CHECK_THROWS_AS(find_csc_certificate(d1, 0), DomainError);
  const CscSearch capped = find_csc_certificate(l_shape(), 6, StreamLimits{2000, -1});
  CHECK(capped.cap_hit);
  CHECK(capped.levels_searched == 3);
}

TEST_CASE("tampered certificates are rejected", "[connectivity][csc]") {
  const DigitSet d1 = corpus("d1.json");
  const CscCertificate good = *find_csc_certificate(d1, 5).certificate;
  CscCertificate wrong_size = good;
  wrong_size.cells += 1;
  CHECK_FALSE(verify_csc_certificate(d1, wrong_size));
  CHECK(good.cells == 1);
  CscCertificate empty = good;
  empty.anchor_x = 11;  // digit (2, 0) is not in D
  CHECK_FALSE(verify_csc_certificate(d1, empty));
  CscCertificate on_boundary = good;
  on_boundary.anchor_x = 80;  // (8, 0)(8, 0) touches the right side
  CHECK_FALSE(verify_csc_certificate(d1, on_boundary));
  CscCertificate elsewhere = good;
  elsewhere.anchor_x = 12;  // (1, 0)(3, 0): another isolated cell, still a valid witness
  CHECK(verify_csc_certificate(d1, elsewhere));
  // A component of Q_1 that reaches the boundary is not separated in the tiling.
  CHECK_FALSE(verify_csc_certificate(d1, CscCertificate{1, 8, 0, 3, 8, 8, 0, 2}));
}

TEST_CASE("cardinality ladder", "[connectivity][cardinality]") {
  const DigitSet full = corpus("full_square.json");
  const auto vf = infer_component_cardinality(full, classify(full));
  CHECK(vf.verdict == Cardinality::Finite);
  CHECK(vf.finite_count == 1);
  CHECK(vf.evidence == Evidence::FullSquare);

  const DigitSet e3 = corpus("e3_standin.json");
  const auto v3 = infer_component_cardinality(e3, classify(e3));
  CHECK(v3.verdict == Cardinality::Infinite);
  CHECK(v3.evidence == Evidence::LinearRule);

  const DigitSet column = DigitSet::make(5, 3, {{2, 0}, {2, 1}, {2, 2}});
  const auto vc = infer_component_cardinality(column, classify(column));
  CHECK(vc.verdict == Cardinality::Finite);
  CHECK(vc.finite_count == 1);
  CHECK(vc.evidence == Evidence::LinearRule);

  const DigitSet d2 = corpus("d2.json");
  const auto v2 = infer_component_cardinality(d2, classify(d2));
  CHECK(v2.verdict == Cardinality::Infinite);
  CHECK(v2.evidence == Evidence::CscCertificate);
  REQUIRE(v2.certificate);
  CHECK(v2.certificate->level == 2);

  const DigitSet l = l_shape();
  const auto vl = infer_component_cardinality(l, classify(l), 4);
  CHECK(vl.verdict == Cardinality::Unknown);
  CHECK(vl.evidence == Evidence::GrowthObservation);
  CHECK(vl.levels_searched == 4);
  CHECK(vl.observed_counts == std::vector<std::int64_t>{1, 1, 1, 1});
}

TEST_CASE("streaming labeling equals flood fill", "[connectivity][oracle]") {
  for (const DigitSet& ds : verify::random_digit_sets(120, 41)) {
    for (int k = 1; k <= 5 && small(ds, k); ++k) {
      const auto flood = verify::flood_fill(verify::dense_bitmap(ds, k));
      const ComponentSummary s = count_components(ds, k);
      REQUIRE(s.component_count == static_cast<std::int64_t>(flood.size()));
      const std::int64_t w = verify::ipow(ds.n(), k), h = verify::ipow(ds.m(), k);
      std::int64_t touching = 0, vertical = 0, horizontal = 0;
      for (const auto& c : flood) {
        const bool l = c.xmin == 0, r = c.xmax == w - 1, b = c.ymin == 0, t = c.ymax == h - 1;
        touching += l || r || b || t;
        vertical += t && b;
        horizontal += l && r;
      }
      CHECK(s.boundary_touching_count == touching);
      CHECK(s.vertical_count == vertical);
      CHECK(s.horizontal_count == horizontal);
      CHECK(s.boundary_components.size() == static_cast<std::size_t>(touching));
      if (small(ds, k, 1100))
        CHECK(count_components(ds, k, Domain::Tilde).component_count ==
              static_cast<std::int64_t>(verify::flood_fill(verify::dense_bitmap(ds, k, true)).size()));
    }
  }
}

TEST_CASE("summary invariants", "[connectivity][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(120, 42)) {
    for (int k = 1; k <= 4 && small(ds, k, 100000); ++k) {
      const ComponentSummary s = count_components(ds, k);
      CHECK(s.component_count >= 1);
      CHECK(s.component_count <= s.occupied_cells);
      CHECK(std::is_sorted(s.boundary_components.begin(), s.boundary_components.end(),
                           [](const ComponentInfo& a, const ComponentInfo& b) {
                             return a.anchor_y != b.anchor_y ? a.anchor_y < b.anchor_y
                                                             : a.anchor_x < b.anchor_x;
                           }));
      if (s.vertical_or_horizontal_count == s.component_count)
        CHECK(s.orientation != Orientation::Mixed);
    }
  }
}

TEST_CASE("component counts never decrease with the level", "[connectivity][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(150, 43)) {
    std::int64_t prev = 0;
    for (int k = 1; k <= 6 && small(ds, k, 300000); ++k) {
      const std::int64_t c = count_components(ds, k).component_count;
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("the tiling has at most nine times the components", "[connectivity][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(150, 44)) {
    for (int k = 1; k <= 5 && small(ds, k, 30000); ++k)
      CHECK(count_components(ds, k, Domain::Tilde).component_count <=
            9 * count_components(ds, k).component_count);
  }
}

TEST_CASE("a certificate at k0 forces N^(k-k0) components", "[connectivity][property]") {
  int certified = 0;
  for (const DigitSet& ds : verify::random_digit_sets(200, 45)) {
    if (!small(ds, 3, 1000)) continue;
    const CscSearch s = find_csc_certificate(ds, 3);
    const int brute = verify::brute_csc_level(ds, 3);
    CHECK((s.certificate ? s.certificate->level : 0) == brute);
    if (!s.certificate) continue;
    ++certified;
    CHECK(verify_csc_certificate(ds, *s.certificate));
    const int k0 = s.certificate->level;
    for (int k = k0 + 1; k <= 6 && small(ds, k, 300000); ++k) {
      const std::int64_t c = count_components(ds, k).component_count;
      CHECK(c >= verify::ipow(ds.size(), k - k0));
      CHECK(c <= verify::ipow(ds.size(), k));
    }
  }
  CHECK(certified >= 20);
}

TEST_CASE("certificates match the flood-filled tiling", "[connectivity][csc]") {
  for (const DigitSet& ds : verify::random_digit_sets(120, 46)) {
    for (int k = 1; k <= 3 && small(ds, k, 1000); ++k) {
      const auto cert = csc_certificate_at(ds, k);
      if (!cert) continue;
      const std::int64_t w = verify::ipow(ds.n(), k), h = verify::ipow(ds.m(), k);
      const verify::Bitmap bm = verify::dense_bitmap(ds, k, true);
      const auto comps = verify::flood_fill(bm);
      const auto hit = std::find_if(comps.begin(), comps.end(), [&](const verify::FloodComponent& c) {
        return c.xmin == cert->xmin + w && c.xmax == cert->xmax + w && c.ymin == cert->ymin + h &&
               c.ymax == cert->ymax + h && c.cells == cert->cells;
      });
      REQUIRE(hit != comps.end());
      // Dilating the witness by one cell must not reach any other occupied cell:
      // the witness is the whole flood component, so every occupied neighbour is inside it.
      CHECK(hit->xmin >= w);
      CHECK(hit->xmax < 2 * w);
      CHECK(hit->ymin >= h);
      CHECK(hit->ymax < 2 * h);
    }
  }
}

TEST_CASE("separated first-level pieces multiply the count by N", "[connectivity][property]") {
  int tested = 0;
  for (const DigitSet& ds : verify::random_digit_sets(400, 47)) {
    const bool top = !ds.columns_in_row(ds.m() - 1).empty();
    const bool right = std::any_of(ds.digits().begin(), ds.digits().end(),
                                   [&](const Digit& d) { return d.i == ds.n() - 1; });
    if (top || right) continue;
    ++tested;
    const std::int64_t c1 = count_components(ds, 1).component_count;
    for (int k = 2; k <= 6 && small(ds, k, 300000); ++k)
      CHECK(count_components(ds, k).component_count == c1 * verify::ipow(ds.size(), k - 1));
    if (c1 == ds.size())
      for (int k = 2; k <= 6 && small(ds, k, 300000); ++k)
        CHECK(count_components(ds, k).component_count == verify::ipow(ds.size(), k));
  }
  CHECK(tested >= 10);
}
