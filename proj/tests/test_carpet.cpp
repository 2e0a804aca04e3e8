#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/connectivity.hpp"
#include "bmcarpet/verify/acceptance.hpp"
#include "catch_amalgamated.hpp"

using namespace bmcarpet;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

DigitSet corpus(const char* name) {
  return load_digit_set(std::string(BMCARPET_CORPUS_DIR) + "/" + name);
}

DigitSet full_square(int n, int m) {
  std::vector<Digit> all;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) all.push_back({i, j});
  return DigitSet::make(n, m, all);
}

DigitSet reflect(const DigitSet& ds) {
  std::vector<Digit> out;
  for (const Digit& d : ds.digits()) out.push_back({ds.n() - 1 - d.i, ds.m() - 1 - d.j});
  return DigitSet::make(ds.n(), ds.m(), out);
}

DigitSet permute_columns(const DigitSet& ds, std::mt19937& rng) {
  std::vector<int> perm(ds.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Digit> out;
  for (const Digit& d : ds.digits()) out.push_back({perm[d.i], d.j});
  return DigitSet::make(ds.n(), ds.m(), out);
}

}  // namespace

TEST_CASE("parse accepts D_1 and canonicalizes order", "[carpet][parse]") {
  const auto a = parse_digit_set(
      R"({"n":9,"m":3,"digits":[[1,0],[3,0],[8,0],[8,1],[0,2],[2,2],[4,2],[8,2]]})");
  const auto b = parse_digit_set(
      R"({ "digits": [[8,2],[4,2],[2,2],[0,2],[8,1],[8,0],[3,0],[1,0]], "m": 3, "n": 9 })");
  CHECK(a.n() == 9);
  CHECK(a.m() == 3);
  CHECK(a.size() == 8);
  CHECK(a == b);
  CHECK(a == corpus("d1.json"));
  CHECK(a.contains(8, 1));
  CHECK_FALSE(a.contains(7, 1));
  CHECK(a.columns_in_row(0) == std::vector<int>{1, 3, 8});
}

TEST_CASE("parse rejects invalid digit sets", "[carpet][parse]") {
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":2,"digits":[[0,0]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":4,"digits":[[0,0],[1,1]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":2,"digits":[[0,0],[3,0]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":2,"digits":[[0,0],[0,-1]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":2,"digits":[[0,0],[1,1],[0,0]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":1,"digits":[[0,0],[1,0]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":2,"digits":[[0,0],[1]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"digits":[[0,0],[1,1]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3.5,"m":2,"digits":[[0,0],[1,1]]})"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"({"n":3,"m":2,"digits":[[0,0],[1,1]])"), ParseError);
  CHECK_THROWS_AS(parse_digit_set(R"([3,2])"), ParseError);
  CHECK_THROWS_AS(load_digit_set("/nonexistent/dir/d.json"), IoError);
}

TEST_CASE("to_json round-trips through the parser", "[carpet][parse]") {
  for (const auto& name : verify::corpus_files()) {
    const DigitSet ds = corpus(name.c_str());
    CHECK(parse_digit_set(to_json(ds).dump()) == ds);
  }
}

TEST_CASE("classify D_1", "[carpet][classify]") {
  const Classification c = classify(corpus("d1.json"));
  CHECK(c.N == 8);
  CHECK(c.M == 3);
  CHECK(c.row_counts == std::vector<std::int64_t>{3, 1, 4});
  CHECK(c.empty_rows.empty());
  CHECK(c.has_full_rows);
  CHECK_FALSE(c.is_linear);
  CHECK_FALSE(c.is_one_sided);
}

TEST_CASE("classify the full square", "[carpet][classify]") {
  const Classification c = classify(full_square(4, 3));
  CHECK(c.is_linear);
  CHECK(c.M == 3);
  CHECK(c.empty_rows.empty());
  CHECK(c.has_full_rows);
}

TEST_CASE("classify the strong-separation set", "[carpet][classify]") {
  const Classification c = classify(corpus("strong_separation.json"));
  CHECK(c.N == 2);
  CHECK(c.M == 2);
  CHECK(c.empty_rows == std::vector<int>{2});
  CHECK_FALSE(c.is_linear);
  CHECK_FALSE(c.is_one_sided);
  CHECK_FALSE(c.has_full_rows);
}

TEST_CASE("linearity is detected in both orientations", "[carpet][classify]") {
  const Classification col = classify(corpus("e3_standin.json"));
  CHECK(col.is_linear);
  CHECK(col.column_product);
  CHECK_FALSE(col.row_product);
  CHECK(col.product_factor_size == 2);

  // {0..4} x {0, 2}
  std::vector<Digit> rows;
  for (int i = 0; i < 5; ++i) rows.insert(rows.end(), {{i, 0}, {i, 2}});
  const Classification row = classify(DigitSet::make(5, 3, rows));
  CHECK(row.is_linear);
  CHECK(row.row_product);
  CHECK_FALSE(row.column_product);
  CHECK(row.product_factor_size == 2);
  CHECK(row.empty_rows == std::vector<int>{1});

  CHECK_FALSE(classify(DigitSet::make(5, 3, {{0, 0}, {0, 1}, {1, 0}})).is_linear);
}

TEST_CASE("one-sided detection reports the side", "[carpet][classify]") {
  auto side = [](int n, int m, std::vector<Digit> d) { return classify(DigitSet::make(n, m, d)).one_sided_side; };
  CHECK(side(5, 3, {{0, 0}, {3, 0}}) == Side::Bottom);
  CHECK(side(5, 3, {{1, 2}, {3, 2}}) == Side::Top);
  CHECK(side(5, 3, {{0, 1}, {0, 2}}) == Side::Left);
  CHECK(side(5, 3, {{4, 1}, {4, 2}}) == Side::Right);
  CHECK_FALSE(side(5, 3, {{1, 1}, {4, 2}}).has_value());
}

TEST_CASE("box dimension examples", "[carpet][dimension]") {
  CHECK_THAT(box_dimension(corpus("e1_standin.json")),
             WithinRel(1.0 + std::log(2.0) / std::log(7.0), 1e-12));
  CHECK_THAT(box_dimension(7, 3, 6, 3), WithinAbs(1.35621, 1e-5));
  CHECK_THAT(box_dimension(full_square(5, 3)), WithinRel(2.0, 1e-12));
  CHECK_THAT(box_dimension(corpus("d2.json")), WithinRel(std::log(24.0) / (2 * std::log(3.0)), 1e-12));
  CHECK_THAT(box_dimension(corpus("d1.json")), WithinRel(box_dimension(corpus("d2.json")), 1e-12));
}

TEST_CASE("hausdorff dimension examples", "[carpet][dimension]") {
  const double expected = std::log(3.0 + std::sqrt(3.0)) / std::log(3.0);
  CHECK_THAT(hausdorff_dimension(corpus("d1.json")), WithinRel(expected, 1e-12));
  CHECK_THAT(hausdorff_dimension(corpus("d2.json")), WithinRel(expected, 1e-12));
  CHECK_THAT(hausdorff_dimension(full_square(5, 3)), WithinRel(2.0, 1e-12));
  CHECK_THAT(hausdorff_dimension(DigitSet::make(2, 2, {{0, 0}, {0, 1}})), WithinRel(1.0, 1e-12));
}

TEST_CASE("predicted exponent examples", "[carpet][exponent]") {
  const DigitSet e1 = corpus("e1_standin.json");
  const auto p1 = predicted_exponent(classify(e1), e1, Cardinality::Infinite);
  CHECK(p1.case_tag == ExponentCase::NonlinearFullRows);
  CHECK_THAT(p1.gamma, WithinRel(std::log(6.0) / std::log(7.0), 1e-12));

  const DigitSet e3 = corpus("e3_standin.json");
  const auto p3 = predicted_exponent(classify(e3), e3, Cardinality::Infinite);
  CHECK(p3.case_tag == ExponentCase::Linear);
  CHECK_THAT(p3.gamma, WithinRel(std::log(2.0) / std::log(7.0), 1e-12));

  const DigitSet d2 = corpus("d2.json");
  const auto p2 = predicted_exponent(classify(d2), d2, Cardinality::Infinite);
  CHECK(p2.case_tag == ExponentCase::NonlinearPartialRows);
  CHECK_THAT(p2.gamma, WithinRel(box_dimension(d2), 1e-12));

  const DigitSet full = full_square(3, 2);
  CHECK_FALSE(predicted_exponent(classify(full), full, Cardinality::Finite).defined());
  CHECK_FALSE(predicted_exponent(classify(e1), e1, Cardinality::Unknown).defined());
}

TEST_CASE("row counts sum to N and M counts nonempty rows", "[carpet][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(200, 11)) {
    const Classification c = classify(ds);
    CHECK(std::accumulate(c.row_counts.begin(), c.row_counts.end(), std::int64_t{0}) == c.N);
    CHECK(c.M == std::count_if(c.row_counts.begin(), c.row_counts.end(), [](auto k) { return k > 0; }));
    CHECK(c.M + static_cast<int>(c.empty_rows.size()) == ds.m());
    CHECK(c.has_full_rows == (c.M == ds.m()));
    if (c.column_product)
      for (auto k : c.row_counts) CHECK((k == 0 || k == c.product_factor_size));
    if (c.row_product)
      for (auto k : c.row_counts) CHECK((k == 0 || k == ds.n()));
  }
}

TEST_CASE("box dimension dominates hausdorff dimension", "[carpet][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(300, 12)) {
    const Classification c = classify(ds);
    const double b = box_dimension(ds);
    const double h = hausdorff_dimension(ds);
    CHECK(b >= h - 1e-12);
    std::vector<std::int64_t> nonzero;
    for (auto k : c.row_counts)
      if (k > 0) nonzero.push_back(k);
    if (std::adjacent_find(nonzero.begin(), nonzero.end(), std::not_equal_to<>()) == nonzero.end())
      CHECK_THAT(h, WithinRel(b, 1e-12));
  }
}

TEST_CASE("dimensions and exponents are invariant under column permutation and reflection",
          "[carpet][property]") {
  std::mt19937 rng(7);
  for (const DigitSet& ds : verify::random_digit_sets(150, 13)) {
    const DigitSet r = reflect(ds);
    const DigitSet p = permute_columns(ds, rng);
    for (const DigitSet* t : {&r, &p}) {
      CHECK_THAT(box_dimension(*t), WithinRel(box_dimension(ds), 1e-12));
      CHECK_THAT(hausdorff_dimension(*t), WithinRel(hausdorff_dimension(ds), 1e-12));
      const Classification ct = classify(*t);
      const Classification c = classify(ds);
      CHECK(ct.is_linear == c.is_linear);
      for (Cardinality card : {Cardinality::Infinite, Cardinality::Finite}) {
        const auto a = predicted_exponent(c, ds, card);
        const auto b = predicted_exponent(ct, *t, card);
        CHECK(a.case_tag == b.case_tag);
        if (a.defined()) CHECK_THAT(b.gamma, WithinRel(a.gamma, 1e-12));
      }
    }
    // Reflection is an isometry, so the inferred cardinality carries over too.
    const auto va = infer_component_cardinality(ds, classify(ds), 3);
    const auto vr = infer_component_cardinality(r, classify(r), 3);
    CHECK(va.verdict == vr.verdict);
    const auto pa = predicted_exponent(classify(ds), ds, va.verdict);
    const auto pr = predicted_exponent(classify(r), r, vr.verdict);
    CHECK(pa.case_tag == pr.case_tag);
    if (pa.defined()) CHECK_THAT(pr.gamma, WithinRel(pa.gamma, 1e-12));
  }
}

TEST_CASE("for n = m the nonlinear branches agree", "[carpet][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(300, 14)) {
    if (ds.n() != ds.m()) continue;
    const Classification c = classify(ds);
    if (c.is_linear) continue;
    const auto p = predicted_exponent(c, ds, Cardinality::Infinite);
    CHECK_THAT(p.gamma, WithinRel(std::log(static_cast<double>(c.N)) / std::log(ds.n()), 1e-12));
  }
}

TEST_CASE("predicted exponent is positive when defined", "[carpet][property]") {
  for (const DigitSet& ds : verify::random_digit_sets(200, 15)) {
    const Classification c = classify(ds);
    const auto v = infer_component_cardinality(ds, c, 3);
    const auto p = predicted_exponent(c, ds, v.verdict);
    CHECK(p.defined() == (v.verdict == Cardinality::Infinite));
    if (p.defined()) CHECK(p.gamma > 0);
  }
}
