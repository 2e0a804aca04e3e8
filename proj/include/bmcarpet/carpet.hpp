#pragma once

// Digit-set model of a Bedford-McMullen carpet, its combinatorial
// classification and the closed-form dimension / gap-exponent formulas.
//
// Convention: digit (i, j) is column i (x, base n) and row j (y, base m), with
// y increasing upward. The IFS maps are x -> diag(1/n, 1/m)(x + (i, j)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bmcarpet/errors.hpp"
#include "json.hpp"

namespace bmcarpet {

struct Digit {
  int i = 0;  // column
  int j = 0;  // row
  friend auto operator<=>(const Digit&, const Digit&) = default;
};

class DigitSet {
 public:
  // Validates and canonicalizes (digits sorted by (i, j)). Throws ParseError.
  static DigitSet make(int n, int m, std::vector<Digit> digits) {
    if (m < 2) throw ParseError("m must be at least 2");
    if (n < m) throw ParseError("n must be at least m (got n=" + std::to_string(n) +
                                ", m=" + std::to_string(m) + ")");
    if (static_cast<std::int64_t>(n) * m > (1 << 20)) throw ParseError("n*m too large");
    for (const Digit& d : digits) {
      if (d.i < 0 || d.i >= n || d.j < 0 || d.j >= m)
        throw ParseError("digit (" + std::to_string(d.i) + "," + std::to_string(d.j) +
                         ") out of range");
    }
    std::sort(digits.begin(), digits.end());
    if (std::adjacent_find(digits.begin(), digits.end()) != digits.end())
      throw ParseError("duplicate digit");
    if (digits.size() <= 1) throw ParseError("a digit set needs at least two digits");
    return DigitSet(n, m, std::move(digits));
  }

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  const std::vector<Digit>& digits() const noexcept { return digits_; }
  std::int64_t size() const noexcept { return static_cast<std::int64_t>(digits_.size()); }

  bool contains(int i, int j) const noexcept {
    if (i < 0 || i >= n_ || j < 0 || j >= m_) return false;
    return member_[static_cast<std::size_t>(j) * n_ + i] != 0;
  }
  bool contains(Digit d) const noexcept { return contains(d.i, d.j); }

  // Sorted columns A_j = {i : (i, j) in D}.
  const std::vector<int>& columns_in_row(int j) const { return columns_by_row_.at(j); }

  // Sorted rows {j : (i, j) in D for some i}.
  const std::vector<int>& nonempty_rows() const noexcept { return nonempty_rows_; }

  friend bool operator==(const DigitSet& a, const DigitSet& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.digits_ == b.digits_;
  }

 private:
  DigitSet(int n, int m, std::vector<Digit> digits)
      : n_(n), m_(m), digits_(std::move(digits)),
        member_(static_cast<std::size_t>(n) * m, 0), columns_by_row_(m) {
    for (const Digit& d : digits_) {
      member_[static_cast<std::size_t>(d.j) * n_ + d.i] = 1;
      columns_by_row_[d.j].push_back(d.i);
    }
    for (int j = 0; j < m_; ++j) {
      std::sort(columns_by_row_[j].begin(), columns_by_row_[j].end());
      if (!columns_by_row_[j].empty()) nonempty_rows_.push_back(j);
    }
  }

  int n_;
  int m_;
  std::vector<Digit> digits_;
  std::vector<unsigned char> member_;
  std::vector<std::vector<int>> columns_by_row_;
  std::vector<int> nonempty_rows_;
};

// {"n": int, "m": int, "digits": [[i, j], ...]}
inline DigitSet parse_digit_set(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("digit set must be a JSON object");
  auto int_field = [&](const char* key) -> int {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number_integer())
      throw ParseError(std::string("missing or non-integer field '") + key + "'");
    return it->get<int>();
  };
  const int n = int_field("n");
  const int m = int_field("m");
  auto it = doc.find("digits");
  if (it == doc.end() || !it->is_array()) throw ParseError("missing array field 'digits'");
  std::vector<Digit> digits;
  for (const auto& pair : *it) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer())
      throw ParseError("each digit must be a pair [i, j] of integers");
    digits.push_back({pair[0].get<int>(), pair[1].get<int>()});
  }
  return DigitSet::make(n, m, std::move(digits));
}

inline DigitSet load_digit_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return parse_digit_set(text.str());
}

inline nlohmann::json to_json(const DigitSet& ds) {
  nlohmann::json digits = nlohmann::json::array();
  for (const Digit& d : ds.digits()) digits.push_back({d.i, d.j});
  return {{"n", ds.n()}, {"m", ds.m()}, {"digits", std::move(digits)}};
}

enum class Side { Bottom, Top, Left, Right };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
    case Side::Left: return "left";
    case Side::Right: return "right";
  }
  return "?";
}

struct Classification {
  std::int64_t N = 0;                   // #D
  int M = 0;                            // nonempty rows
  std::vector<std::int64_t> row_counts; // M_j, j = 0..m-1
  std::vector<int> empty_rows;
  bool is_linear = false;
  bool column_product = false;          // D = A x {0..m-1}
  bool row_product = false;             // D = {0..n-1} x B
  int product_factor_size = 0;          // #A (column form) or #B (row form)
  bool is_one_sided = false;
  std::optional<Side> one_sided_side;   // first matching of bottom, top, left, right
  bool has_full_rows = false;
};

inline Classification classify(const DigitSet& ds) {
  Classification c;
  const int n = ds.n();
  const int m = ds.m();
  c.N = ds.size();
  c.row_counts.assign(m, 0);
  std::vector<std::int64_t> col_counts(n, 0);
  for (const Digit& d : ds.digits()) {
    ++c.row_counts[d.j];
    ++col_counts[d.i];
  }
  for (int j = 0; j < m; ++j) {
    if (c.row_counts[j] > 0)
      ++c.M;
    else
      c.empty_rows.push_back(j);
  }
  c.has_full_rows = c.M == m;

  c.column_product = std::all_of(col_counts.begin(), col_counts.end(),
                                 [m](std::int64_t k) { return k == 0 || k == m; });
  c.row_product = std::all_of(c.row_counts.begin(), c.row_counts.end(),
                              [n](std::int64_t k) { return k == 0 || k == n; });
  c.is_linear = c.column_product || c.row_product;
  if (c.column_product)
    c.product_factor_size = static_cast<int>(
        std::count_if(col_counts.begin(), col_counts.end(), [](std::int64_t k) { return k > 0; }));
  else if (c.row_product)
    c.product_factor_size = c.M;

  auto all_digits = [&](auto pred) {
    return std::all_of(ds.digits().begin(), ds.digits().end(), pred);
  };
  if (all_digits([](Digit d) { return d.j == 0; }))
    c.one_sided_side = Side::Bottom;
  else if (all_digits([m](Digit d) { return d.j == m - 1; }))
    c.one_sided_side = Side::Top;
  else if (all_digits([](Digit d) { return d.i == 0; }))
    c.one_sided_side = Side::Left;
  else if (all_digits([n](Digit d) { return d.i == n - 1; }))
    c.one_sided_side = Side::Right;
  c.is_one_sided = c.one_sided_side.has_value();
  return c;
}

inline nlohmann::json to_json(const Classification& c) {
  nlohmann::json j{{"N", c.N},
                   {"M", c.M},
                   {"row_counts", c.row_counts},
                   {"empty_rows", c.empty_rows},
                   {"is_linear", c.is_linear},
                   {"column_product", c.column_product},
                   {"row_product", c.row_product},
                   {"is_one_sided", c.is_one_sided},
                   {"has_full_rows", c.has_full_rows}};
  j["one_sided_side"] = c.one_sided_side ? nlohmann::json(to_string(*c.one_sided_side))
                                         : nlohmann::json(nullptr);
  if (c.is_linear) j["product_factor_size"] = c.product_factor_size;
  return j;
}

inline double box_dimension(std::int64_t n, std::int64_t m, std::int64_t N, std::int64_t M) {
  if (n == m) return std::log(static_cast<double>(N)) / std::log(static_cast<double>(n));
  const double ln = std::log(static_cast<double>(n));
  const double lm = std::log(static_cast<double>(m));
  return (std::log(static_cast<double>(N)) - std::log(static_cast<double>(M))) / ln +
         std::log(static_cast<double>(M)) / lm;
}

inline double box_dimension(const DigitSet& ds) {
  const Classification c = classify(ds);
  return box_dimension(ds.n(), ds.m(), c.N, c.M);
}

// log_m sum_j M_j^(log m / log n)
inline double hausdorff_dimension(const DigitSet& ds) {
  const Classification c = classify(ds);
  const double lm = std::log(static_cast<double>(ds.m()));
  const double ratio = lm / std::log(static_cast<double>(ds.n()));
  double sum = 0.0;
  for (std::int64_t k : c.row_counts)
    if (k > 0) sum += std::pow(static_cast<double>(k), ratio);
  return std::log(sum) / lm;
}

enum class Cardinality { Finite, Infinite, Unknown };

inline const char* to_string(Cardinality c) {
  switch (c) {
    case Cardinality::Finite: return "Finite";
    case Cardinality::Infinite: return "Infinite";
    case Cardinality::Unknown: return "Unknown";
  }
  return "?";
}

enum class ExponentCase { Linear, NonlinearFullRows, NonlinearPartialRows, Undefined };

inline const char* to_string(ExponentCase c) {
  switch (c) {
    case ExponentCase::Linear: return "Linear";
    case ExponentCase::NonlinearFullRows: return "NonlinearFullRows";
    case ExponentCase::NonlinearPartialRows: return "NonlinearPartialRows";
    case ExponentCase::Undefined: return "Undefined";
  }
  return "?";
}

// gamma with h_E(delta) ~ delta^-gamma, equivalently g_k(E) ~ k^(-1/gamma).
struct PredictedExponent {
  double gamma = 0.0;
  ExponentCase case_tag = ExponentCase::Undefined;
  bool defined() const noexcept { return case_tag != ExponentCase::Undefined; }
};

inline PredictedExponent predicted_exponent(const Classification& cls, const DigitSet& ds,
                                            Cardinality cardinality) {
  if (cardinality != Cardinality::Infinite) return {};
  const double bdim = box_dimension(ds.n(), ds.m(), cls.N, cls.M);
  if (cls.is_linear) return {bdim - 1.0, ExponentCase::Linear};
  if (cls.M == ds.m())
    return {std::log(static_cast<double>(cls.N)) / std::log(static_cast<double>(ds.n())),
            ExponentCase::NonlinearFullRows};
  return {bdim, ExponentCase::NonlinearPartialRows};
}

inline nlohmann::json to_json(const PredictedExponent& p) {
  nlohmann::json j{{"case", to_string(p.case_tag)}};
  j["gamma"] = p.defined() ? nlohmann::json(p.gamma) : nlohmann::json(nullptr);
  return j;
}

}  // namespace bmcarpet
