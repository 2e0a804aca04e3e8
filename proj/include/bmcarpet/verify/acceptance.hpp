#pragma once

// The eight acceptance criteria as runnable checks. Shared by the acceptance
// test binary and the `reproduce` command. Each check records what it measured
// next to the expected value and tolerance, plus its wall time against the
// budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bmcarpet/bmcarpet.hpp"
#include "bmcarpet/verify/oracles.hpp"
#include "json.hpp"

namespace bmcarpet::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string expected;
  std::string tolerance;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::vector<std::string> failures;  // first few mismatches, for diagnosis
};

namespace detail {

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failed_;
    if (messages_.size() < 8) messages_.push_back(what);
  }
  bool ok() const { return failed_ == 0; }
  std::vector<std::string> messages() const { return messages_; }

 private:
  int failed_ = 0;
  std::vector<std::string> messages_;
};

inline std::string fmt(double v, int digits = 12) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

inline CriterionResult start(int id, std::string name, double budget_seconds) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.budget_seconds = budget_seconds;
  return r;
}

inline Rational pow_frac(std::int64_t base, int e) { return Rational(BigInt(1), big_pow(base, e)); }

}  // namespace detail

inline const std::vector<std::string>& corpus_files() {
  static const std::vector<std::string> files{
      "cantor_product.json", "d1.json",           "d2.json",
      "e1_standin.json",     "e2_standin.json",   "e3_standin.json",
      "full_square.json",    "strong_separation.json"};
  return files;
}

// 1. Cantor gaps, reference formula and level-8 finite sequence.
inline CriterionResult criterion_cantor(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(1, "Cantor gap formula (exact)", 5);
  detail::Check c;
  const DigitSet ds = load_digit_set(corpus / "cantor_product.json");
  const GapSequence ref = cantor_gap_reference(3, 2, 6);
  c.expect(ref.entries.size() == 6, "reference length");
  for (int j = 1; j <= 6 && j <= static_cast<int>(ref.entries.size()); ++j) {
    const Rational want(BigInt(1), BigInt(2) * big_pow(3, j));
    c.expect(ref.entries[j - 1].value == want, "reference delta_" + std::to_string(j));
    c.expect(ref.entries[j - 1].multiplicity == (std::int64_t{1} << (j - 1)),
             "reference multiplicity " + std::to_string(j));
  }
  const int k = 8;
  const GapSequence g = component_gap_sequence(ds, k);
  c.expect(g.entries.size() == 7, "level-8 sequence has " + std::to_string(g.entries.size()) +
                                      " distinct values, want 7");
  c.expect(g.classes == 128, "level-8 classes " + std::to_string(g.classes));
  const GapSequence ref7 = cantor_gap_reference(3, 2, 7);
  Rational worst = 0;
  for (int j = 1; j <= 7 && j <= static_cast<int>(g.entries.size()); ++j) {
    const Rational want = (detail::pow_frac(3, j) - detail::pow_frac(3, k)) / 2;
    c.expect(g.entries[j - 1].value == want, "level-8 gap j=" + std::to_string(j) + " is " +
                                                 to_string(g.entries[j - 1].value));
    c.expect(g.entries[j - 1].multiplicity == (std::int64_t{1} << (j - 1)),
             "level-8 multiplicity j=" + std::to_string(j));
    const Rational err = abs(g.entries[j - 1].value - ref7.entries[j - 1].value);
    if (err > worst) worst = err;
  }
  c.expect(worst <= detail::pow_frac(3, k) / 2, "error above 3^-k/2");
  r.measured = "level-8 values (3^-j - 3^-8)/2, multiplicities 2^(j-1), j<=7; max |g_j - delta_j| = " +
               to_string(worst);
  r.expected = "delta_j = 1/(2*3^j), mult 2^(j-1) (j<=6); level-8 error <= " +
               to_string(detail::pow_frac(3, k) / 2);
  r.tolerance = "exact";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// 2. Linear stand-in has 2^k components.
inline CriterionResult criterion_linear_growth(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(2, "Component growth, linear stand-in", 30);
  detail::Check c;
  const DigitSet ds = load_digit_set(corpus / "e3_standin.json");
  std::string counts;
  for (int k = 1; k <= 6; ++k) {
    const std::int64_t got = count_components(ds, k).component_count;
    counts += (k > 1 ? "," : "") + std::to_string(got);
    c.expect(got == (std::int64_t{1} << k), "k=" + std::to_string(k) + ": " + std::to_string(got));
  }
  r.measured = "#C(Q_k), k=1..6: " + counts;
  r.expected = "2,4,8,16,32,64";
  r.tolerance = "exact";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// 3. Strong separation: N^k components, CSC at level 1, Infinite.
inline CriterionResult criterion_strong_separation(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(3, "Strong-separation exactness", 10);
  detail::Check c;
  const DigitSet ds = load_digit_set(corpus / "strong_separation.json");
  std::string counts;
  for (int k = 1; k <= 10; ++k) {
    const std::int64_t got = count_components(ds, k).component_count;
    counts += (k > 1 ? "," : "") + std::to_string(got);
    c.expect(got == (std::int64_t{1} << k), "k=" + std::to_string(k) + ": " + std::to_string(got));
  }
  const CscSearch search = find_csc_certificate(ds, kDefaultCscLevels);
  const int level = search.certificate ? search.certificate->level : 0;
  c.expect(level == 1, "CSC level " + std::to_string(level));
  c.expect(search.certificate && verify_csc_certificate(ds, *search.certificate),
           "certificate fails independent check");
  const CardinalityVerdict v = infer_component_cardinality(ds, classify(ds));
  c.expect(v.verdict == Cardinality::Infinite, "cardinality " + std::string(to_string(v.verdict)));
  r.measured = "#C(Q_k)=" + counts + "; CSC level " + std::to_string(level) + "; " +
               to_string(v.verdict);
  r.expected = "2^k for k=1..10; CSC level 1; Infinite";
  r.tolerance = "exact";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// 4. The equal-dimension pair that is not Lipschitz equivalent.
inline CriterionResult criterion_example_pair(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(4, "Example pair D1/D2", 1);
  detail::Check c;
  const DigitSet a = load_digit_set(corpus / "d1.json");
  const DigitSet b = load_digit_set(corpus / "d2.json");
  const Classification ca = classify(a);
  const Classification cb = classify(b);
  c.expect(ca.N == 8 && ca.M == 3, "D1 N, M");
  c.expect(cb.N == 12 && cb.M == 2, "D2 N, M");
  const double bdim = std::log(24.0) / (2.0 * std::log(3.0));
  const double hdim = std::log(3.0 + std::sqrt(3.0)) / std::log(3.0);
  const double da = box_dimension(a), db = box_dimension(b);
  const double ha = hausdorff_dimension(a), hb = hausdorff_dimension(b);
  c.expect(std::abs(da - bdim) <= 1e-12 && std::abs(db - bdim) <= 1e-12, "box dimensions");
  c.expect(std::abs(ha - hdim) <= 1e-12 && std::abs(hb - hdim) <= 1e-12, "Hausdorff dimensions");
  const LipschitzReport rep = lipschitz_report(a, b);
  c.expect(rep.box_dimensions_equal && rep.hausdorff_dimensions_equal, "report dimension equality");
  c.expect(ca.has_full_rows && !cb.has_full_rows, "full-rows flags");
  c.expect(rep.comparability.verdict == Comparability::NotComparable,
           std::string("verdict ") + to_string(rep.comparability.verdict));
  c.expect(rep.conclusion.find("not Lipschitz equivalent") != std::string::npos, "conclusion text");
  const std::int64_t q1 = count_components(a, 1).component_count;
  c.expect(q1 == 6, "#C(Q_1) of D1 = " + std::to_string(q1));
  r.measured = "N=(" + std::to_string(ca.N) + "," + std::to_string(cb.N) + ") M=(" +
               std::to_string(ca.M) + "," + std::to_string(cb.M) + ") bdim=(" + detail::fmt(da, 17) +
               "," + detail::fmt(db, 17) + ") hdim=(" + detail::fmt(ha, 17) + "," +
               detail::fmt(hb, 17) + ") full_rows=(" + (ca.has_full_rows ? "true" : "false") + "," +
               (cb.has_full_rows ? "true" : "false") + ") " + to_string(rep.comparability.verdict) +
               "; #C(Q_1)=" + std::to_string(q1);
  r.expected = "N=(8,12) M=(3,2) bdim=" + detail::fmt(bdim, 17) + " hdim=" + detail::fmt(hdim, 17) +
               " full_rows=(true,false) NotComparable, not Lipschitz equivalent; #C(Q_1)=6";
  r.tolerance = "1e-12 on dimensions, exact otherwise";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// 5. CSC implies N^(k-k0) <= #C(Q_k) <= N^k.
inline CriterionResult criterion_csc_erc(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(5, "CSC implies ERC bounds", 600);
  detail::Check c;
  std::string measured;
  for (const char* file : {"d1.json", "d2.json"}) {
    const DigitSet ds = load_digit_set(corpus / file);
    const int k0 = brute_csc_level(ds, 5);
    const CscSearch search = find_csc_certificate(ds, 5);
    const int lib = search.certificate ? search.certificate->level : 0;
    c.expect(k0 >= 1, std::string(file) + ": no CSC level up to 5");
    c.expect(lib == k0, std::string(file) + ": library CSC level " + std::to_string(lib) +
                            " vs brute force " + std::to_string(k0));
    measured += std::string(measured.empty() ? "" : "; ") + file + " k0=" + std::to_string(k0) + ":";
    if (k0 < 1) continue;
    const auto N = static_cast<std::int64_t>(ds.size());
    for (int k = k0 + 1; k <= 6; ++k) {
      const std::int64_t got = count_components(ds, k).component_count;
      const std::int64_t lo = verify::ipow(N, k - k0);
      const std::int64_t hi = verify::ipow(N, k);
      measured += " " + std::to_string(got);
      c.expect(lo <= got && got <= hi, std::string(file) + " k=" + std::to_string(k) + ": " +
                                           std::to_string(got) + " outside [" +
                                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }
  r.measured = measured;
  r.expected = "N^(k-k0) <= #C(Q_k) <= N^k for k0 < k <= 6";
  r.tolerance = "exact";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// 6. Fitted h exponents against the predicted ones.
inline CriterionResult criterion_exponent_fit(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(6, "Exponent fit vs prediction", 900);
  detail::Check c;
  std::string measured;
  for (const char* file : {"d2.json", "strong_separation.json"}) {
    const DigitSet ds = load_digit_set(corpus / file);
    const Classification cls = classify(ds);
    const CardinalityVerdict card = infer_component_cardinality(ds, cls);
    const PredictedExponent pred = predicted_exponent(cls, ds, card.verdict);
    ExponentPlan plan;
    plan.k_min = 1;
    plan.k_max = 5;
    const auto samples = exponent_samples(ds, plan);
    const ExponentReport rep = fit_h_exponent(samples, pred);
    const double rel = rep.relative_error.value_or(INFINITY);
    c.expect(pred.case_tag == ExponentCase::NonlinearPartialRows, std::string(file) + " branch");
    c.expect(rel <= 0.15, std::string(file) + ": relative error " + detail::fmt(rel, 6));
    measured += std::string(measured.empty() ? "" : "; ") + file + " gamma=" +
                detail::fmt(rep.fitted_gamma, 6) + " (rel " + detail::fmt(rel, 4) + ")";
  }
  r.measured = measured;
  r.expected = "d2: " + detail::fmt(std::log(24.0) / (2 * std::log(3.0)), 6) +
               ", strong separation: " + detail::fmt(std::log(2.0) / std::log(3.0), 6);
  r.tolerance = "15% relative";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// Deterministic generator for the random digit sets (raw mt19937 output, so
// the sets do not depend on the standard library's distributions).
inline std::vector<DigitSet> random_digit_sets(int count, std::uint32_t seed = 20240607u) {
  std::mt19937 rng(seed);
  auto below = [&](std::uint32_t bound) { return static_cast<int>(rng() % bound); };
  std::vector<DigitSet> out;
  while (static_cast<int>(out.size()) < count) {
    const int n = 2 + below(4);
    const int m = 2 + below(static_cast<std::uint32_t>(std::min(n, 4) - 1));
    const int cap = std::min(8, n * m);
    const int N = 2 + below(static_cast<std::uint32_t>(cap - 1));
    std::vector<Digit> all;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) all.push_back({i, j});
    for (int t = 0; t < N; ++t) std::swap(all[t], all[t + below(static_cast<std::uint32_t>(all.size() - t))]);
    all.resize(N);
    out.push_back(DigitSet::make(n, m, all));
  }
  return out;
}

// Thresholds probing both sides of every gap of Q_k plus a few fixed ones.
inline std::vector<Rational> probe_deltas(const std::vector<std::pair<Rational, std::int64_t>>& gaps,
                                          std::int64_t nk, std::int64_t mk) {
  std::vector<Rational> out{Rational(1), Rational(1, 2), Rational(1, 5)};
  const Rational eps(BigInt(1), BigInt(4) * nk * mk);
  for (const auto& [g, mult] : gaps) {
    out.push_back(g);
    out.push_back(g + eps);
    if (g > eps) out.push_back(g - eps);
  }
  return out;
}

// 7. Streaming results against the slow oracles on random sets.
inline CriterionResult criterion_oracles(const std::filesystem::path&) {
  CriterionResult r = detail::start(7, "Oracle equivalence (50 random sets)", 120);
  detail::Check c;
  std::int64_t ccl = 0, brackets = 0, trips = 0;
  const auto sets = random_digit_sets(50);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const DigitSet& ds = sets[s];
    const std::string tag = "set " + std::to_string(s) + " " + to_json(ds).dump();
    for (int k = 1; k <= 3; ++k) {
      const std::int64_t stream = count_components(ds, k).component_count;
      const std::int64_t flood = flood_component_count(ds, k);
      c.expect(stream == flood, tag + " k=" + std::to_string(k) + ": CCL " + std::to_string(stream) +
                                    " vs flood " + std::to_string(flood));
      ++ccl;

      const auto oracle_gaps = exact_gap_oracle(ds, k);
      const GapSequence g = component_gap_sequence(ds, k);
      bool same = g.entries.size() == oracle_gaps.size();
      for (std::size_t i = 0; same && i < oracle_gaps.size(); ++i)
        same = g.entries[i].value == oracle_gaps[i].first &&
               g.entries[i].multiplicity == oracle_gaps[i].second;
      c.expect(same, tag + " k=" + std::to_string(k) + ": gap sequence differs from MST oracle");
      const auto steps = steps_from_gaps(g);
      const GapSequence back = gap_from_h(steps);
      c.expect(back.entries == g.entries && back.classes == g.classes,
               tag + " k=" + std::to_string(k) + ": round trip");
      ++trips;

      for (const Rational& delta :
           probe_deltas(oracle_gaps, verify::ipow(ds.n(), k), verify::ipow(ds.m(), k))) {
        const HBracket b = h_bracket(ds, k, delta);
        const OracleBracket o = closure_bracket(ds, k, delta);
        c.expect(b.h_low == o.low && b.h_high == o.high,
                 tag + " L=" + std::to_string(k) + " delta=" + to_string(delta) + ": (" +
                     std::to_string(b.h_low) + "," + std::to_string(b.h_high) + ") vs (" +
                     std::to_string(o.low) + "," + std::to_string(o.high) + ")");
        ++brackets;
      }
    }
  }
  r.measured = std::to_string(ccl) + " CCL comparisons, " + std::to_string(brackets) +
               " bracket comparisons, " + std::to_string(trips) + " gap/round-trip checks";
  r.expected = "all equal";
  r.tolerance = "exact";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

// Largest level whose occupied-cell count stays within `cells`.
inline int level_within(const DigitSet& ds, std::int64_t cells, int k_max) {
  int k = 1;
  while (k < k_max && occupied_cell_count(ds, k + 1) <= cells) ++k;
  return k;
}

// 8. Monotonicity and symmetry properties over the corpus.
inline CriterionResult criterion_properties(const std::filesystem::path& corpus) {
  CriterionResult r = detail::start(8, "Property suite over the corpus", 60);
  detail::Check c;
  std::vector<DigitSet> sets;
  std::vector<CardinalityVerdict> cards;
  for (const std::string& f : corpus_files()) {
    sets.push_back(load_digit_set(corpus / f));
    cards.push_back(infer_component_cardinality(sets.back(), classify(sets.back())));
  }
  std::int64_t checks = 0;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const DigitSet& ds = sets[s];
    const std::string& name = corpus_files()[s];
    const int kc = level_within(ds, 2'000'000, 8);
    std::int64_t prev = 0;
    std::vector<std::int64_t> counts;
    for (int k = 1; k <= kc; ++k) {
      const std::int64_t got = count_components(ds, k).component_count;
      c.expect(got >= prev, name + ": #C(Q_" + std::to_string(k) + ") decreased");
      prev = got;
      counts.push_back(got);
      ++checks;
    }

    const int L = level_within(ds, 200'000, 6);
    const std::vector<Rational> deltas{Rational(1),           Rational(1, 2), Rational(1, 3),
                                       detail::pow_frac(ds.n(), 1), Rational(1, 2 * ds.n()),
                                       detail::pow_frac(ds.n(), 2), detail::pow_frac(ds.m(), L)};
    std::int64_t lo_prev = 0, hi_prev = 0;
    for (const Rational& d : deltas) {
      const HBracket b = h_bracket(ds, L, d);
      c.expect(b.h_low <= b.h_high, name + ": h_low > h_high at " + to_string(d));
      c.expect(b.h_low >= lo_prev && b.h_high >= hi_prev,
               name + ": bracket increased with delta at " + to_string(d));
      lo_prev = b.h_low;
      hi_prev = b.h_high;
      ++checks;
    }

    int kg = 1;
    for (int k = 1; k <= kc; ++k)
      if (counts[k - 1] <= kDefaultMaxComponents && occupied_cell_count(ds, k) <= 200'000) kg = k;
    const GapSequence g = component_gap_sequence(ds, kg);
    for (std::size_t i = 0; i < g.entries.size(); ++i) {
      c.expect(g.entries[i].multiplicity >= 1, name + ": multiplicity < 1");
      if (i > 0) c.expect(g.entries[i].value < g.entries[i - 1].value, name + ": not descending");
    }
    c.expect(g.total_multiplicity() + 1 == counts[kg - 1], name + ": sum of multiplicities");
    ++checks;
  }
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = 0; b < sets.size(); ++b) {
      const auto ab = comparability_verdict(sets[a], sets[b], cards[a], cards[b]);
      const auto ba = comparability_verdict(sets[b], sets[a], cards[b], cards[a]);
      c.expect(ab.verdict == ba.verdict, corpus_files()[a] + " vs " + corpus_files()[b] +
                                             ": verdict not symmetric");
      c.expect(!(ab.exact && ab.near_tie), "exact verdict flagged as near tie");
      ++checks;
    }
  r.measured = std::to_string(checks) + " property checks over " + std::to_string(sets.size()) +
               " corpus sets";
  r.expected = "monotone counts and brackets, descending gaps, symmetric verdicts";
  r.tolerance = "exact";
  r.passed = c.ok();
  r.failures = c.messages();
  return r;
}

using CriterionFn = std::function<CriterionResult(const std::filesystem::path&)>;

inline const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> all{criterion_cantor,          criterion_linear_growth,
                                            criterion_strong_separation, criterion_example_pair,
                                            criterion_csc_erc,         criterion_exponent_fit,
                                            criterion_oracles,         criterion_properties};
  return all;
}

// Runs one criterion, timing it; exceptions count as failures.
inline CriterionResult run_criterion(std::size_t index, const std::filesystem::path& corpus) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = criteria().at(index)(corpus);
  } catch (const std::exception& e) {
    r.id = static_cast<int>(index + 1);
    r.name = "criterion " + std::to_string(index + 1);
    r.passed = false;
    r.failures.push_back(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
    r.passed = false;
    r.failures.push_back("runtime " + detail::fmt(r.seconds, 4) + " s over budget " +
                         detail::fmt(r.budget_seconds, 4) + " s");
  }
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const std::filesystem::path& corpus) {
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < criteria().size(); ++i) out.push_back(run_criterion(i, corpus));
  return out;
}

// Timing is left out so the JSON is reproducible byte for byte.
inline nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id},
          {"name", r.name},
          {"passed", r.passed},
          {"measured", r.measured},
          {"expected", r.expected},
          {"tolerance", r.tolerance},
          {"budget_seconds", r.budget_seconds},
          {"failures", r.failures}};
}

}  // namespace bmcarpet::verify
