#pragma once

// Streaming union-find labeling over run-length encoded rows.
//
// Two cells are related when |dX| <= reach.dx and |dY| <= reach.dy; the labeler
// counts classes of the transitive closure. reach = (1, 1) is 8-connectivity,
// i.e. connected components of a union of closed cells. Larger reaches give
// single-linkage classes at a distance threshold.
//
// Within a row, runs whose gap is at most dx are related, so each row is first
// collapsed into clusters. Two clusters in rows at most dy apart are related iff
// their spans come within dx of each other (every gap inside a cluster is
// shorter than the 2*dx+1 wide search interval, so a span hit is a cell hit).
//
// Only the last dy rows are kept. Memory is O(clusters in the window + live
// labels); labels are compacted whenever rows leave the window, and a class is
// reported the moment no window row carries it any more.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "bmcarpet/errors.hpp"
#include "bmcarpet/grid.hpp"
#include "bmcarpet/union_find.hpp"

namespace bmcarpet {

struct Reach {
  std::int64_t dx = 1;
  std::int64_t dy = 1;
};

template <typename P>
concept ComponentPayload = std::movable<P> && requires(P& p, P&& q) { p.absorb(std::move(q)); };

struct NoPayload {
  void absorb(NoPayload&&) noexcept {}
};

template <ComponentPayload Payload>
class StreamingLabeler {
 public:
  explicit StreamingLabeler(Reach reach) : reach_(reach) {
    if (reach.dx < 1 || reach.dy < 1) throw DomainError("reach must be at least 1 in each axis");
  }

  // make(y, runs_of_cluster) -> Payload; emit(Payload&&) for each finished class.
  template <typename Make, typename Emit>
  void push_row(std::int64_t y, std::span<const Run> runs, Make&& make, Emit&& emit) {
    if (have_row_ && y <= last_y_) throw DomainError("rows must arrive in increasing y");
    have_row_ = true;
    last_y_ = y;

    std::size_t drop = 0;
    while (drop < window_.size() && window_[drop].y < y - reach_.dy) ++drop;
    if (drop > 0 || uf_.size() > 2 * live_segments_ + 256) compact(drop, emit);

    WindowRow cur;
    cur.y = y;
    for (std::size_t i = 0; i < runs.size();) {
      std::size_t j = i;
      while (j + 1 < runs.size() && runs[j + 1].x0 - runs[j].x1 <= reach_.dx) ++j;
      const std::uint32_t node = uf_.add();
      payload_.push_back(make(y, runs.subspan(i, j - i + 1)));
      cur.segs.push_back({runs[i].x0, runs[j].x1, node});
      i = j + 1;
    }

    for (WindowRow& prev : window_) {
      std::size_t p = 0;
      for (const Segment& s : cur.segs) {
        const std::int64_t lo = s.x0 - reach_.dx;
        const std::int64_t hi = s.x1 + reach_.dx;
        while (p < prev.segs.size() && prev.segs[p].x1 < lo) ++p;
        for (std::size_t q = p; q < prev.segs.size() && prev.segs[q].x0 <= hi; ++q)
          join(s.node, prev.segs[q].node);
      }
    }
    live_segments_ += cur.segs.size();
    window_.push_back(std::move(cur));
  }

  template <typename Emit>
  void finish(Emit&& emit) {
    compact(window_.size(), emit);
    have_row_ = false;
  }

  std::int64_t components() const noexcept { return components_; }

 private:
  struct Segment {
    std::int64_t x0;
    std::int64_t x1;
    std::uint32_t node;
  };
  struct WindowRow {
    std::int64_t y = 0;
    std::vector<Segment> segs;
  };

  void join(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t ra = uf_.find(a);
    const std::uint32_t rb = uf_.find(b);
    if (ra == rb) return;
    const std::uint32_t root = uf_.unite(ra, rb);
    const std::uint32_t other = root == ra ? rb : ra;
    payload_[root].absorb(std::move(payload_[other]));
  }

  // Emits classes carried only by the first `drop` window rows, drops those
  // rows, and renumbers surviving roots densely.
  template <typename Emit>
  void compact(std::size_t drop, Emit& emit) {
    constexpr std::int64_t kUnseen = -1;
    constexpr std::int64_t kEmitted = -2;
    remap_.assign(uf_.size(), kUnseen);
    std::vector<Payload> kept_payload;
    std::uint32_t next = 0;
    for (std::size_t r = drop; r < window_.size(); ++r) {
      for (Segment& s : window_[r].segs) {
        const std::uint32_t root = uf_.find(s.node);
        if (remap_[root] == kUnseen) {
          remap_[root] = next++;
          kept_payload.push_back(std::move(payload_[root]));
        }
        s.node = static_cast<std::uint32_t>(remap_[root]);
      }
    }
    for (std::size_t r = 0; r < drop; ++r) {
      for (const Segment& s : window_[r].segs) {
        const std::uint32_t root = uf_.find(s.node);
        if (remap_[root] == kUnseen) {
          remap_[root] = kEmitted;
          ++components_;
          emit(std::move(payload_[root]));
        }
      }
      live_segments_ -= window_[r].segs.size();
    }
    window_.erase(window_.begin(), window_.begin() + static_cast<std::ptrdiff_t>(drop));
    uf_.reset(next);
    payload_ = std::move(kept_payload);
  }

  Reach reach_;
  std::deque<WindowRow> window_;
  UnionFind uf_;
  std::vector<Payload> payload_;
  std::vector<std::int64_t> remap_;
  std::size_t live_segments_ = 0;
  std::int64_t components_ = 0;
  std::int64_t last_y_ = 0;
  bool have_row_ = false;
};

// Labels every row of `stream`; returns the number of classes.
template <ComponentPayload Payload, typename Make, typename Emit>
std::int64_t label_stream(RowStream& stream, Reach reach, Make&& make, Emit&& emit) {
  StreamingLabeler<Payload> labeler(reach);
  Row row;
  while (stream.next(row)) labeler.push_row(row.y, row.runs, make, emit);
  labeler.finish(emit);
  return labeler.components();
}

inline std::int64_t count_classes(RowStream& stream, Reach reach) {
  return label_stream<NoPayload>(
      stream, reach, [](std::int64_t, std::span<const Run>) { return NoPayload{}; },
      [](NoPayload&&) {});
}

}  // namespace bmcarpet
