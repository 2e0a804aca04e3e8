#pragma once

// Executable verdicts built on the gap-exponent formulas: comparability of
// gap sequences for a pair of carpets and a Lipschitz (non-)equivalence report.
//
// Exponents of the form gamma = log K / (s log b) with b an integer that is
// not a perfect power compare exactly: gamma_1 = gamma_2 iff K_1^s_2 = K_2^s_1.
// This covers every branch whenever n and m are powers of a common base, and
// linear or full-rows carpets over any bases. Anything else falls back to a
// double comparison at relative tolerance 1e-12, flagged as a near tie.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/connectivity.hpp"
#include "bmcarpet/rational.hpp"
#include "json.hpp"

namespace bmcarpet {

inline constexpr double kExponentTolerance = 1e-12;

// v = base^power with base not a perfect power (base 1 for v = 1).
struct PerfectPower {
  std::int64_t base = 1;
  int power = 1;
};

inline PerfectPower minimal_base(std::int64_t v) {
  for (int p = 62; p >= 2; --p) {
    const auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / p)));
    for (std::int64_t b = std::max<std::int64_t>(2, guess - 1); b <= guess + 1; ++b) {
      BigInt acc = 1;
      for (int i = 0; i < p && acc <= v; ++i) acc *= b;
      if (acc == v) return {b, p};
    }
  }
  return {v, 1};
}

// gamma = log(key) / (scale * log(base)), exactly.
struct LogForm {
  std::int64_t base = 1;
  std::int64_t scale = 1;
  Rational key;
};

// log(key)/(s log b) representation of log(value)/log(B) with B an integer.
inline LogForm log_over(const Rational& value, std::int64_t B) {
  const PerfectPower pp = minimal_base(B);
  return {pp.base, pp.power, value};
}

// Exact form of the box dimension when n and m are powers of one base b:
// n = b^p, m = b^q gives bdim = log((N/M)^q M^p) / (p q log b).
inline std::optional<LogForm> box_dimension_form(std::int64_t n, std::int64_t m, std::int64_t N,
                                                 std::int64_t M) {
  const PerfectPower pn = minimal_base(n);
  const PerfectPower pm = minimal_base(m);
  if (pn.base != pm.base) return std::nullopt;
  const Rational ratio{BigInt(N), BigInt(M)};
  Rational key = 1;
  for (int i = 0; i < pm.power; ++i) key *= ratio;
  for (int i = 0; i < pn.power; ++i) key *= M;
  return LogForm{pn.base, static_cast<std::int64_t>(pn.power) * pm.power, key};
}

inline std::optional<LogForm> exponent_form(const DigitSet& ds, const Classification& cls,
                                            const PredictedExponent& pe) {
  switch (pe.case_tag) {
    case ExponentCase::NonlinearFullRows:
      return log_over(Rational(cls.N), ds.n());
    case ExponentCase::Linear:
      if (cls.column_product) return log_over(Rational(cls.product_factor_size), ds.n());
      return log_over(Rational(cls.product_factor_size), ds.m());
    case ExponentCase::NonlinearPartialRows:
      return box_dimension_form(ds.n(), ds.m(), cls.N, cls.M);
    case ExponentCase::Undefined:
      break;
  }
  return std::nullopt;
}

inline Rational rational_pow(const Rational& q, std::int64_t e) {
  Rational r = 1;
  for (std::int64_t i = 0; i < e; ++i) r *= q;
  return r;
}

// nullopt when the forms are over different bases.
inline std::optional<bool> forms_equal(const LogForm& a, const LogForm& b) {
  if (a.base != b.base) return std::nullopt;
  if (a.scale == b.scale) return a.key == b.key;
  return rational_pow(a.key, b.scale) == rational_pow(b.key, a.scale);
}

inline std::string describe(const LogForm& f) {
  std::ostringstream os;
  const std::string key = boost::multiprecision::denominator(f.key) == 1
                              ? boost::multiprecision::numerator(f.key).str()
                              : to_string(f.key);
  os << "log(" << key << ")/(" << f.scale << "*log " << f.base << ")";
  return os.str();
}

enum class Comparability { Comparable, NotComparable, Unknown };

inline const char* to_string(Comparability c) {
  switch (c) {
    case Comparability::Comparable: return "Comparable";
    case Comparability::NotComparable: return "NotComparable";
    case Comparability::Unknown: return "Unknown";
  }
  return "?";
}

struct ComparabilityVerdict {
  Comparability verdict = Comparability::Unknown;
  PredictedExponent first;
  PredictedExponent second;
  std::string basis;
  std::optional<std::string> exact_witness;
  bool exact = false;      // decided by an integer identity
  bool near_tie = false;   // equal only within floating tolerance
};

inline ComparabilityVerdict comparability_verdict(const DigitSet& a, const DigitSet& b,
                                                  const CardinalityVerdict& card_a,
                                                  const CardinalityVerdict& card_b) {
  const Classification ca = classify(a);
  const Classification cb = classify(b);
  ComparabilityVerdict v;
  v.first = predicted_exponent(ca, a, card_a.verdict);
  v.second = predicted_exponent(cb, b, card_b.verdict);
  if (card_a.verdict != Cardinality::Infinite || card_b.verdict != Cardinality::Infinite) {
    v.basis = "component cardinality not established as infinite for both carpets";
    return v;
  }
  if (!v.first.defined() || !v.second.defined()) {
    v.basis = "exponent undefined";
    return v;
  }
  const std::string branches =
      std::string(to_string(v.first.case_tag)) + " vs " + to_string(v.second.case_tag);

  const auto fa = exponent_form(a, ca, v.first);
  const auto fb = exponent_form(b, cb, v.second);
  if (fa && fb) {
    if (const auto eq = forms_equal(*fa, *fb)) {
      v.exact = true;
      v.verdict = *eq ? Comparability::Comparable : Comparability::NotComparable;
      v.exact_witness = describe(*fa) + (*eq ? " == " : " != ") + describe(*fb);
      v.basis = branches + "; exponents compared by integer identity";
      return v;
    }
  }
  const double rel = std::abs(v.first.gamma - v.second.gamma) /
                     std::max(std::abs(v.first.gamma), std::abs(v.second.gamma));
  if (rel <= kExponentTolerance) {
    v.verdict = Comparability::Comparable;
    v.near_tie = true;
  } else {
    v.verdict = Comparability::NotComparable;
  }
  v.basis = branches + "; exponents compared in floating point";
  return v;
}

inline nlohmann::json to_json(const ComparabilityVerdict& v) {
  nlohmann::json j{{"verdict", to_string(v.verdict)},
                   {"gamma_pair", {to_json(v.first), to_json(v.second)}},
                   {"basis", v.basis},
                   {"exact", v.exact},
                   {"near_tie", v.near_tie}};
  j["exact_witness"] = v.exact_witness ? nlohmann::json(*v.exact_witness) : nlohmann::json(nullptr);
  return j;
}

// sum_j M_j^(1/r) in canonical form {radicand c: coefficient}, with each
// M_j = a^r c and c free of r-th powers. Distinct r-th-power-free radicands
// are linearly independent over Q, so equal maps mean equal sums.
inline std::map<std::int64_t, std::int64_t> radical_sum(const std::vector<std::int64_t>& counts,
                                                        int r) {
  std::map<std::int64_t, std::int64_t> out;
  for (std::int64_t v : counts) {
    if (v == 0) continue;
    std::int64_t a = 1;
    std::int64_t c = 1;
    std::int64_t rest = v;
    for (std::int64_t p = 2; p * p <= rest; ++p) {
      int e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      for (int i = 0; i < e / r; ++i) a *= p;
      for (int i = 0; i < e % r; ++i) c *= p;
    }
    if (rest > 1) (r == 1 ? a : c) *= rest;
    out[c] += a;
  }
  return out;
}

inline std::string describe_radical_sum(const std::map<std::int64_t, std::int64_t>& sum, int r) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [c, a] : sum) {
    if (!first) os << " + ";
    first = false;
    if (c == 1) {
      os << a;
    } else {
      if (a != 1) os << a << "*";
      os << c << "^(1/" << r << ")";
    }
  }
  return first ? "0" : os.str();
}

// r with n = m^r, if any.
inline std::optional<int> integer_log(std::int64_t n, std::int64_t m) {
  std::int64_t v = 1;
  for (int r = 0; r <= 62; ++r) {
    if (v == n) return r;
    if (v > n / m) break;
    v *= m;
  }
  return std::nullopt;
}

struct CarpetFacts {
  DigitSet digits;
  Classification classification;
  double box_dimension = 0.0;
  double hausdorff_dimension = 0.0;
  std::optional<LogForm> box_form;
  std::optional<std::string> hausdorff_sum;  // symbolic, when n = m^r
  CardinalityVerdict cardinality;
  PredictedExponent exponent;
};

struct LipschitzReport {
  CarpetFacts first;
  CarpetFacts second;
  bool box_dimensions_equal = false;
  bool box_dimensions_exact = false;
  std::optional<std::string> box_witness;
  bool hausdorff_dimensions_equal = false;
  bool hausdorff_dimensions_exact = false;
  bool full_rows_differ = false;
  bool full_rows_rule_applies = false;  // both nonlinear, both infinite, exactly one full-rows
  ComparabilityVerdict comparability;
  std::string conclusion;
};

inline CarpetFacts carpet_facts(const DigitSet& ds, int k_max, StreamLimits limits) {
  CarpetFacts f{ds, classify(ds), box_dimension(ds), hausdorff_dimension(ds), {}, {}, {}, {}};
  f.box_form = box_dimension_form(ds.n(), ds.m(), f.classification.N, f.classification.M);
  if (const auto r = integer_log(ds.n(), ds.m()))
    f.hausdorff_sum = describe_radical_sum(radical_sum(f.classification.row_counts, *r), *r);
  f.cardinality = infer_component_cardinality(ds, f.classification, k_max, limits);
  f.exponent = predicted_exponent(f.classification, ds, f.cardinality.verdict);
  return f;
}

inline bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kExponentTolerance * std::max(std::abs(a), std::abs(b));
}

inline LipschitzReport lipschitz_report(const DigitSet& a, const DigitSet& b,
                                        int k_max = kDefaultCscLevels, StreamLimits limits = {}) {
  LipschitzReport rep{carpet_facts(a, k_max, limits), carpet_facts(b, k_max, limits),
                      false, false, std::nullopt, false, false, false, false, {}, {}};
  const auto& ca = rep.first.classification;
  const auto& cb = rep.second.classification;

  if (rep.first.box_form && rep.second.box_form) {
    if (const auto eq = forms_equal(*rep.first.box_form, *rep.second.box_form)) {
      rep.box_dimensions_exact = true;
      rep.box_dimensions_equal = *eq;
      rep.box_witness = "bdim = " + describe(*rep.first.box_form) + (*eq ? " == " : " != ") +
                        describe(*rep.second.box_form);
      if (a.n() == b.n() && a.m() == b.m() && integer_log(a.n(), a.m()) == 2)
        rep.box_witness = *rep.box_witness + "; M1*N1 = " + std::to_string(ca.M * ca.N) +
                          ", M2*N2 = " + std::to_string(cb.M * cb.N);
    }
  }
  if (!rep.box_dimensions_exact)
    rep.box_dimensions_equal = nearly_equal(rep.first.box_dimension, rep.second.box_dimension);

  if (a.n() == b.n() && a.m() == b.m()) {
    if (const auto r = integer_log(a.n(), a.m())) {
      rep.hausdorff_dimensions_exact = true;
      rep.hausdorff_dimensions_equal =
          radical_sum(ca.row_counts, *r) == radical_sum(cb.row_counts, *r);
    }
  }
  if (!rep.hausdorff_dimensions_exact)
    rep.hausdorff_dimensions_equal =
        nearly_equal(rep.first.hausdorff_dimension, rep.second.hausdorff_dimension);

  rep.full_rows_differ = ca.has_full_rows != cb.has_full_rows;
  rep.full_rows_rule_applies = rep.full_rows_differ && !ca.is_linear && !cb.is_linear &&
                               rep.first.cardinality.verdict == Cardinality::Infinite &&
                               rep.second.cardinality.verdict == Cardinality::Infinite;
  rep.comparability =
      comparability_verdict(a, b, rep.first.cardinality, rep.second.cardinality);
  switch (rep.comparability.verdict) {
    case Comparability::NotComparable:
      rep.conclusion = "gap sequences are not comparable, so the carpets are not Lipschitz equivalent";
      break;
    case Comparability::Comparable:
      rep.conclusion = "gap sequences are comparable; Lipschitz equivalence is not decided here";
      break;
    case Comparability::Unknown:
      rep.conclusion = "undetermined: component cardinality or exponent unavailable";
      break;
  }
  return rep;
}

inline nlohmann::json to_json(const CarpetFacts& f) {
  nlohmann::json j{{"digit_set", to_json(f.digits)},
                   {"classification", to_json(f.classification)},
                   {"box_dimension", f.box_dimension},
                   {"hausdorff_dimension", f.hausdorff_dimension},
                   {"cardinality", to_json(f.cardinality)},
                   {"predicted_exponent", to_json(f.exponent)}};
  j["box_dimension_exact"] = f.box_form ? nlohmann::json(describe(*f.box_form)) : nlohmann::json(nullptr);
  j["hausdorff_row_sum"] = f.hausdorff_sum ? nlohmann::json(*f.hausdorff_sum) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const LipschitzReport& r) {
  nlohmann::json j{{"a", to_json(r.first)},
                   {"b", to_json(r.second)},
                   {"box_dimensions_equal", r.box_dimensions_equal},
                   {"box_dimensions_exact", r.box_dimensions_exact},
                   {"hausdorff_dimensions_equal", r.hausdorff_dimensions_equal},
                   {"hausdorff_dimensions_exact", r.hausdorff_dimensions_exact},
                   {"full_rows", {r.first.classification.has_full_rows, r.second.classification.has_full_rows}},
                   {"full_rows_rule_applies", r.full_rows_rule_applies},
                   {"comparability", to_json(r.comparability)},
                   {"verdict", to_string(r.comparability.verdict)},
                   {"conclusion", r.conclusion}};
  j["box_witness"] = r.box_witness ? nlohmann::json(*r.box_witness) : nlohmann::json(nullptr);
  return j;
}

}  // namespace bmcarpet
