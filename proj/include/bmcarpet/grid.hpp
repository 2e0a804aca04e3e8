#pragma once

// Level-k approximations Q_k (and the 3x3 tiling Q~_k) as integer cell grids,
// streamed row by row as run-length encoded occupancy.
//
// Cell (X, Y) at level k is the rectangle [X n^-k, (X+1) n^-k] x [Y m^-k, (Y+1) m^-k].
// It is occupied iff every (base-n digit of X, base-m digit of Y) pair, most
// significant first, lies in D.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/errors.hpp"
#include "bmcarpet/rational.hpp"

namespace bmcarpet {

inline constexpr std::int64_t kDefaultMaxCells = 50'000'000;

struct Cell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  int level = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline Cell cell_from_word(const DigitSet& ds, std::span<const Digit> word) {
  if (word.empty()) throw DomainError("word must have length >= 1");
  Cell c;
  c.level = static_cast<int>(word.size());
  for (const Digit& d : word) {
    if (!ds.contains(d))
      throw DomainError("digit (" + std::to_string(d.i) + "," + std::to_string(d.j) +
                        ") is not in D");
    c.x = c.x * ds.n() + d.i;
    c.y = c.y * ds.m() + d.j;
  }
  return c;
}

// Direct digit test, O(k). Coordinates are plain (un-offset) level-k indices.
inline bool is_occupied(const DigitSet& ds, int level, std::int64_t x, std::int64_t y) {
  for (int p = 0; p < level; ++p) {
    const auto i = static_cast<int>(x % ds.n());
    const auto j = static_cast<int>(y % ds.m());
    if (!ds.contains(i, j)) return false;
    x /= ds.n();
    y /= ds.m();
  }
  return x == 0 && y == 0;
}

// Inclusive run [x0, x1] of occupied cells in one row.
struct Run {
  std::int64_t x0 = 0;
  std::int64_t x1 = 0;
  std::int64_t length() const noexcept { return x1 - x0 + 1; }
  friend bool operator==(const Run&, const Run&) = default;
};

struct Row {
  std::int64_t y = 0;
  std::vector<Run> runs;  // sorted, disjoint, non-touching
};

// Which integer translates (i, j) in {-1,0,1}^2 of Q_k are present.
// tiles[j + 1][i + 1] is translate (i, j).
struct Window {
  std::array<std::array<bool, 3>, 3> tiles{};

  static Window plain() {
    Window w;
    w.tiles[1][1] = true;
    return w;
  }
  static Window tilde() {
    Window w;
    for (auto& row : w.tiles) row.fill(true);
    return w;
  }
  bool is_plain() const noexcept {
    int count = 0;
    for (const auto& row : tiles)
      for (bool t : row) count += t;
    return count == 1 && tiles[1][1];
  }
  int tile_count() const noexcept {
    int count = 0;
    for (const auto& row : tiles)
      for (bool t : row) count += t;
    return count;
  }
};

struct StreamLimits {
  std::int64_t max_cells = kDefaultMaxCells;
  // Upper bound on the runs materialized over the whole stream; negative disables.
  std::int64_t max_runs = -1;
};

// Exact number of occupied cells N^k times the number of tiles, saturating at int64 max.
// With x_level < level the cells are the mixed-level rectangles of RowStream,
// N^x_level M^(level - x_level) of them.
inline std::int64_t occupied_cell_count(const DigitSet& ds, int level, int tiles = 1,
                                        int x_level = 0) {
  if (x_level <= 0 || x_level > level) x_level = level;
  BigInt total = big_pow(ds.size(), static_cast<unsigned>(x_level)) *
                 big_pow(static_cast<std::int64_t>(ds.nonempty_rows().size()),
                         static_cast<unsigned>(level - x_level)) *
                 tiles;
  if (total > std::numeric_limits<std::int64_t>::max())
    return std::numeric_limits<std::int64_t>::max();
  return total.convert_to<std::int64_t>();
}

// Single-consumer row stream over Q_k restricted to a window of translates.
//
// Coordinates are nonnegative: for non-plain windows every X is offset by n^k
// and every Y by m^k, so the translate (0, 0) occupies
// [n^k, 2 n^k) x [m^k, 2 m^k). Plain windows have no offset.
//
// A positive x_level l < k switches to mixed-level rectangles of size
// n^-l x m^-k: rectangle (X, Y) is occupied iff the first l digit pairs lie in
// D and the remaining row digits of Y name nonempty rows. Each such rectangle
// meets the carpet and together they cover it.
class RowStream {
 public:
  RowStream(const DigitSet& ds, int level, Window window = Window::plain(),
            StreamLimits limits = {}, int x_level = 0)
      : ds_(&ds), level_(level), window_(window), limits_(limits) {
    if (level < 1) throw DomainError("level must be >= 1");
    if (x_level < 0 || x_level > level) throw DomainError("x_level must lie in [1, level]");
    x_level_ = x_level == 0 ? level : x_level;
    if (window.tile_count() == 0) throw DomainError("window selects no translate");
    const std::int64_t cells = occupied_cell_count(ds, level, window.tile_count(), x_level_);
    if (limits.max_cells >= 0 && cells > limits.max_cells)
      throw CapExceeded("level " + std::to_string(level) + " needs " + std::to_string(cells) +
                            " occupied cells, cap is " + std::to_string(limits.max_cells),
                        static_cast<long double>(cells),
                        static_cast<long double>(limits.max_cells));
    tile_w_ = checked_pow(ds.n(), x_level_);
    tile_h_ = checked_pow(ds.m(), level);
    if (tile_w_ > (std::int64_t{1} << 60) / 3 || tile_h_ > (std::int64_t{1} << 60) / 3)
      throw CapExceeded("grid extent too large", static_cast<long double>(tile_w_),
                        static_cast<long double>((std::int64_t{1} << 60) / 3));
    plain_ = window.is_plain();
    for (int b : ds.nonempty_rows()) row_digits_.push_back(b);
    digits_.assign(level, 0);
    tile_row_ = plain_ ? 1 : 0;
    advance_tile_row();
  }

  int level() const noexcept { return level_; }
  int x_level() const noexcept { return x_level_; }
  const DigitSet& digit_set() const noexcept { return *ds_; }
  const Window& window() const noexcept { return window_; }
  bool plain() const noexcept { return plain_; }
  std::int64_t tile_width() const noexcept { return tile_w_; }
  std::int64_t tile_height() const noexcept { return tile_h_; }
  std::int64_t offset_x() const noexcept { return plain_ ? 0 : tile_w_; }
  std::int64_t offset_y() const noexcept { return plain_ ? 0 : tile_h_; }
  std::int64_t width() const noexcept { return plain_ ? tile_w_ : 3 * tile_w_; }
  std::int64_t height() const noexcept { return plain_ ? tile_h_ : 3 * tile_h_; }
  std::int64_t runs_emitted() const noexcept { return runs_emitted_; }

  // Fills `out` with the next nonempty row in ascending Y; false at end.
  bool next(Row& out) {
    while (tile_row_ <= (plain_ ? 1 : 2)) {
      if (!have_base_row_) {
        ++tile_row_;
        advance_tile_row();
        continue;
      }
      build_base_runs();
      const std::int64_t base_y = current_base_y();
      step_odometer();

      out.runs.clear();
      out.y = plain_ ? base_y : tile_row_ * tile_h_ + base_y;
      if (plain_) {
        out.runs = base_runs_;
      } else {
        for (int tx = 0; tx < 3; ++tx) {
          if (!window_.tiles[tile_row_][tx]) continue;
          const std::int64_t shift = tx * tile_w_;
          for (const Run& r : base_runs_) push_merged(out.runs, {r.x0 + shift, r.x1 + shift});
        }
        if (out.runs.empty()) continue;
      }
      runs_emitted_ += static_cast<std::int64_t>(out.runs.size());
      if (limits_.max_runs >= 0 && runs_emitted_ > limits_.max_runs)
        throw CapExceeded("run budget exhausted at " + std::to_string(runs_emitted_) + " runs",
                          static_cast<long double>(runs_emitted_),
                          static_cast<long double>(limits_.max_runs));
      return true;
    }
    return false;
  }

 private:
  static void push_merged(std::vector<Run>& runs, Run r) {
    if (!runs.empty() && runs.back().x1 + 1 >= r.x0)
      runs.back().x1 = std::max(runs.back().x1, r.x1);
    else
      runs.push_back(r);
  }

  void advance_tile_row() {
    // Skip tile rows with no selected translate.
    const int last = plain_ ? 1 : 2;
    while (tile_row_ <= last) {
      const auto& tr = window_.tiles[tile_row_];
      if (tr[0] || tr[1] || tr[2]) break;
      ++tile_row_;
    }
    std::fill(digits_.begin(), digits_.end(), 0);
    have_base_row_ = tile_row_ <= last && !row_digits_.empty();
  }

  std::int64_t current_base_y() const {
    std::int64_t y = 0;
    for (int idx : digits_) y = y * ds_->m() + row_digits_[idx];
    return y;
  }

  void step_odometer() {
    for (int p = level_ - 1; p >= 0; --p) {
      if (++digits_[p] < static_cast<int>(row_digits_.size())) return;
      digits_[p] = 0;
    }
    have_base_row_ = false;
  }

  // Runs of the row with base-m digits b_1..b_k: built from the least
  // significant paired digit up, each step placing copies at a * n^(l-p).
  void build_base_runs() {
    scratch_.assign(1, Run{0, 0});
    std::int64_t scale = 1;
    for (int p = x_level_ - 1; p >= 0; --p) {
      const auto& cols = ds_->columns_in_row(row_digits_[digits_[p]]);
      base_runs_.clear();
      for (int a : cols) {
        const std::int64_t shift = a * scale;
        for (const Run& r : scratch_) push_merged(base_runs_, {r.x0 + shift, r.x1 + shift});
      }
      scratch_.swap(base_runs_);
      scale *= ds_->n();
    }
    base_runs_.swap(scratch_);
  }

  const DigitSet* ds_;
  int level_;
  int x_level_ = 0;
  Window window_;
  StreamLimits limits_;
  bool plain_ = true;
  std::int64_t tile_w_ = 0;
  std::int64_t tile_h_ = 0;
  std::vector<int> row_digits_;  // D^Y, sorted
  std::vector<int> digits_;      // odometer indices into row_digits_
  int tile_row_ = 0;
  bool have_base_row_ = false;
  std::vector<Run> base_runs_;
  std::vector<Run> scratch_;
  std::int64_t runs_emitted_ = 0;
};

inline RowStream stream_rows(const DigitSet& ds, int level, Window window = Window::plain(),
                             StreamLimits limits = {}) {
  return RowStream(ds, level, window, limits);
}

// Calls fn(x, y) for every occupied cell in stream order.
template <typename Fn>
void for_each_cell(RowStream& stream, Fn&& fn) {
  Row row;
  while (stream.next(row))
    for (const Run& r : row.runs)
      for (std::int64_t x = r.x0; x <= r.x1; ++x) fn(x, row.y);
}

}  // namespace bmcarpet
