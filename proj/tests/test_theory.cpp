#include <cmath>

#include "bmcarpet/gaps.hpp"
#include "bmcarpet/theory.hpp"
#include "bmcarpet/verify/acceptance.hpp"
#include "catch_amalgamated.hpp"

using namespace bmcarpet;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

DigitSet corpus(const char* name) {
  return load_digit_set(std::string(BMCARPET_CORPUS_DIR) + "/" + name);
}

CardinalityVerdict card(const DigitSet& ds, int k_max = 4) {
  return infer_component_cardinality(ds, classify(ds), k_max);
}

ComparabilityVerdict verdict(const DigitSet& a, const DigitSet& b) {
  return comparability_verdict(a, b, card(a), card(b));
}

DigitSet columns(int n, int m, std::vector<int> cols) {
  std::vector<Digit> d;
  for (int i : cols)
    for (int j = 0; j < m; ++j) d.push_back({i, j});
  return DigitSet::make(n, m, d);
}

}  // namespace

TEST_CASE("perfect powers and log forms", "[theory]") {
  CHECK(minimal_base(9).base == 3);
  CHECK(minimal_base(9).power == 2);
  CHECK(minimal_base(8).base == 2);
  CHECK(minimal_base(8).power == 3);
  CHECK(minimal_base(64).base == 2);
  CHECK(minimal_base(64).power == 6);
  CHECK(minimal_base(12).base == 12);
  CHECK(minimal_base(12).power == 1);

  // log 24 / (2 log 3) both ways
  const auto form = box_dimension_form(9, 3, 12, 2);
  REQUIRE(form);
  CHECK(form->base == 3);
  CHECK(form->scale == 2);
  CHECK(form->key == 24);
  const auto same = box_dimension_form(9, 3, 8, 3);
  REQUIRE(same);
  CHECK(forms_equal(*form, *same) == std::optional<bool>(true));
  CHECK_FALSE(box_dimension_form(7, 3, 6, 3));

  CHECK(forms_equal(LogForm{2, 1, Rational(3)}, LogForm{2, 2, Rational(9)}) == std::optional<bool>(true));
  CHECK(forms_equal(LogForm{2, 1, Rational(3)}, LogForm{2, 2, Rational(8)}) == std::optional<bool>(false));
  CHECK_FALSE(forms_equal(LogForm{2, 1, Rational(3)}, LogForm{3, 1, Rational(3)}).has_value());
}

TEST_CASE("radical sums decide equal row-count sums", "[theory]") {
  const auto s1 = radical_sum({3, 1, 4}, 2);
  const auto s2 = radical_sum({9, 0, 3}, 2);
  CHECK(s1 == s2);
  CHECK(s1 == std::map<std::int64_t, std::int64_t>{{1, 3}, {3, 1}});
  CHECK(describe_radical_sum(s1, 2) == "3 + 3^(1/2)");
  CHECK(radical_sum({8, 2}, 3) == std::map<std::int64_t, std::int64_t>{{1, 2}, {2, 1}});
  CHECK(radical_sum({2, 2}, 2) != radical_sum({1, 3}, 2));
  CHECK(integer_log(9, 3) == std::optional<int>(2));
  CHECK(integer_log(27, 3) == std::optional<int>(3));
  CHECK_FALSE(integer_log(7, 3));
}

TEST_CASE("comparability examples", "[theory]") {
  const DigitSet d1 = corpus("d1.json");
  const DigitSet d2 = corpus("d2.json");
  const ComparabilityVerdict v = verdict(d1, d2);
  CHECK(v.verdict == Comparability::NotComparable);
  CHECK(v.exact);
  CHECK_FALSE(v.near_tie);
  CHECK_THAT(v.first.gamma, WithinRel(std::log(8.0) / std::log(9.0), 1e-12));
  CHECK_THAT(v.second.gamma, WithinRel(std::log(24.0) / (2 * std::log(3.0)), 1e-12));

  const ComparabilityVerdict self = verdict(d1, d1);
  CHECK(self.verdict == Comparability::Comparable);
  CHECK(self.exact);

  const DigitSet a = columns(7, 3, {0, 3});
  const DigitSet b = columns(7, 3, {0, 2});
  const ComparabilityVerdict lin = verdict(a, b);
  CHECK(lin.verdict == Comparability::Comparable);
  CHECK(lin.exact);
  CHECK(lin.first.case_tag == ExponentCase::Linear);
  CHECK_THAT(lin.first.gamma, WithinRel(std::log(2.0) / std::log(7.0), 1e-12));

  const ComparabilityVerdict lin3 = verdict(a, columns(7, 3, {0, 2, 4}));
  CHECK(lin3.verdict == Comparability::NotComparable);
  CHECK(lin3.exact);

  const DigitSet full = corpus("full_square.json");
  const ComparabilityVerdict unknown = verdict(full, d1);
  CHECK(unknown.verdict == Comparability::Unknown);
  CHECK_FALSE(unknown.first.defined());
}

TEST_CASE("floating comparisons across unrelated bases", "[theory]") {
  const ComparabilityVerdict v = verdict(corpus("e1_standin.json"), corpus("d1.json"));
  CHECK(v.verdict == Comparability::NotComparable);
  CHECK_FALSE(v.exact);
  CHECK_FALSE(v.near_tie);
  CHECK_THAT(v.basis, ContainsSubstring("floating"));
}

TEST_CASE("lipschitz report for the example pair", "[theory]") {
  const LipschitzReport r = lipschitz_report(corpus("d1.json"), corpus("d2.json"));
  CHECK(r.first.classification.N == 8);
  CHECK(r.first.classification.M == 3);
  CHECK(r.second.classification.N == 12);
  CHECK(r.second.classification.M == 2);
  CHECK(r.box_dimensions_equal);
  CHECK(r.box_dimensions_exact);
  REQUIRE(r.box_witness);
  CHECK_THAT(*r.box_witness, ContainsSubstring("M1*N1 = 24, M2*N2 = 24"));
  CHECK(r.hausdorff_dimensions_equal);
  CHECK(r.hausdorff_dimensions_exact);
  REQUIRE(r.first.hausdorff_sum);
  CHECK(*r.first.hausdorff_sum == "3 + 3^(1/2)");
  CHECK(r.first.classification.has_full_rows);
  CHECK_FALSE(r.second.classification.has_full_rows);
  CHECK(r.full_rows_differ);
  CHECK(r.full_rows_rule_applies);
  CHECK(r.comparability.verdict == Comparability::NotComparable);
  CHECK_THAT(r.conclusion, ContainsSubstring("not Lipschitz equivalent"));
  CHECK_THAT(r.first.box_dimension, WithinRel(std::log(24.0) / (2 * std::log(3.0)), 1e-12));
  CHECK_THAT(r.first.hausdorff_dimension,
             WithinRel(std::log(3.0 + std::sqrt(3.0)) / std::log(3.0), 1e-12));
}

TEST_CASE("lipschitz report for identical full squares", "[theory]") {
  const DigitSet full = corpus("full_square.json");
  const LipschitzReport r = lipschitz_report(full, full);
  CHECK(r.box_dimensions_equal);
  CHECK(r.hausdorff_dimensions_equal);
  CHECK_FALSE(r.full_rows_differ);
  CHECK_FALSE(r.full_rows_rule_applies);
  // One component each: no gap sequence to compare.
  CHECK(r.comparability.verdict == Comparability::Unknown);
  CHECK_THAT(r.conclusion, !ContainsSubstring("not Lipschitz equivalent"));
}

TEST_CASE("lipschitz report for the linear pair", "[theory]") {
  const LipschitzReport r = lipschitz_report(columns(7, 3, {0, 3}), columns(7, 3, {0, 2}));
  CHECK(r.comparability.verdict == Comparability::Comparable);
  CHECK(r.first.exponent.case_tag == ExponentCase::Linear);
  CHECK(r.second.exponent.case_tag == ExponentCase::Linear);
  CHECK_THAT(r.first.exponent.gamma, WithinRel(r.second.exponent.gamma, 1e-12));
  CHECK_THAT(r.conclusion, ContainsSubstring("not decided"));
}

TEST_CASE("comparability is symmetric and exact verdicts agree with floating point",
          "[theory][property]") {
  const auto sets = verify::random_digit_sets(40, 61);
  std::vector<CardinalityVerdict> cards;
  for (const DigitSet& ds : sets) cards.push_back(card(ds, 3));
  int exact = 0;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < sets.size(); ++j) {
      const auto ab = comparability_verdict(sets[i], sets[j], cards[i], cards[j]);
      const auto ba = comparability_verdict(sets[j], sets[i], cards[j], cards[i]);
      CHECK(ab.verdict == ba.verdict);
      CHECK(ab.exact == ba.exact);
      if (ab.verdict != Comparability::Unknown) {
        CHECK(cards[i].verdict == Cardinality::Infinite);
        CHECK(cards[j].verdict == Cardinality::Infinite);
      }
      if (!ab.exact) continue;
      ++exact;
      CHECK_FALSE(ab.near_tie);
      const double rel = std::abs(ab.first.gamma - ab.second.gamma) /
                         std::max(ab.first.gamma, ab.second.gamma);
      if (ab.verdict == Comparability::Comparable)
        CHECK(rel <= kExponentTolerance);
      else
        CHECK(rel > kExponentTolerance);
    }
  CHECK(exact > 0);
}

TEST_CASE("theory branch and fitted exponent agree across the corpus", "[theory][property]") {
  for (const auto& name : verify::corpus_files()) {
    CAPTURE(name);
    const DigitSet ds = corpus(name.c_str());
    const Classification cls = classify(ds);
    const CardinalityVerdict v = card(ds, 5);
    const PredictedExponent p = predicted_exponent(cls, ds, v.verdict);
    if (v.verdict != Cardinality::Infinite) {
      CHECK_FALSE(p.defined());
      continue;
    }
    if (cls.is_linear)
      CHECK(p.case_tag == ExponentCase::Linear);
    else if (cls.M == ds.m())
      CHECK(p.case_tag == ExponentCase::NonlinearFullRows);
    else
      CHECK(p.case_tag == ExponentCase::NonlinearPartialRows);

    ExponentPlan plan;
    plan.k_max = 5;
    const ExponentReport rep = fit_h_exponent(exponent_samples(ds, plan), p);
    REQUIRE(rep.relative_error);
    CHECK(*rep.relative_error <= 0.15);
  }
}
