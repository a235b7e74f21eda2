#pragma once

// Dichotomous word/boundary sequence model.
//
// A sentence is an alternating sequence of word symbols and non-word
// boundary tokens.  Each boundary is either bound (it glues its two
// neighbours into one segment) or broken (it separates them).  Binding
// probabilities are estimated per (left symbol, boundary surface, right
// symbol) triple from gold-standard counts; thresholding them partitions
// a sentence into segments.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "boundseg/errors.hpp"

namespace boundseg {

/// Symbol channel a sequence or count table belongs to.
enum class Channel { Surface, Pos };

inline std::string_view channel_name(Channel c) {
  return c == Channel::Surface ? "SURFACE" : "POS";
}

enum class BoundaryState : std::uint8_t { Broken = 0, Bound = 1 };

/// Reserved boundary surface marking a gap inside a discontiguous MWE.
/// No corpus token may carry this value.
inline constexpr std::string_view kGapMarker = "__GAP__";

/// A non-word token between two word symbols.  The state is empty until
/// a partitioning function (or gold annotation) assigns it.
struct Boundary {
  std::string surface;
  std::optional<BoundaryState> state;
};

/// Probability threshold in [0,1].
class Threshold {
 public:
  explicit Threshold(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
      throw std::invalid_argument("threshold out of [0,1]: " +
                                  std::to_string(value));
  }
  double value() const noexcept { return value_; }

  friend bool operator==(Threshold a, Threshold b) noexcept {
    return a.value_ == b.value_;
  }

 private:
  double value_;
};

/// Alternating word/boundary sequence: n word symbols, n-1 boundaries.
/// The first and last items are always word symbols.
class SymbolSequence {
 public:
  SymbolSequence(Channel channel, std::vector<std::string> symbols,
                 std::vector<Boundary> boundaries)
      : channel_(channel),
        symbols_(std::move(symbols)),
        boundaries_(std::move(boundaries)) {
    if (symbols_.empty())
      throw Error("symbol sequence must contain at least one word symbol");
    if (boundaries_.size() + 1 != symbols_.size())
      throw Error("broken alternation: " + std::to_string(symbols_.size()) +
                  " symbols vs " + std::to_string(boundaries_.size()) +
                  " boundaries");
  }

  Channel channel() const noexcept { return channel_; }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<Boundary>& boundaries() const noexcept {
    return boundaries_;
  }
  std::vector<Boundary>& boundaries() noexcept { return boundaries_; }

  std::size_t size() const noexcept { return symbols_.size(); }

 private:
  Channel channel_;
  std::vector<std::string> symbols_;
  std::vector<Boundary> boundaries_;
};

struct BoundaryCounts {
  std::uint64_t bound = 0;
  std::uint64_t broken = 0;

  friend bool operator==(const BoundaryCounts&,
                         const BoundaryCounts&) = default;
};

namespace detail {

struct TripleKey {
  std::string left;
  std::string boundary;
  std::string right;

  friend bool operator==(const TripleKey&, const TripleKey&) = default;
};

struct TripleView {
  std::string_view left;
  std::string_view boundary;
  std::string_view right;
};

struct TripleHash {
  using is_transparent = void;

  static std::size_t mix(std::string_view l, std::string_view b,
                         std::string_view r) {
    std::hash<std::string_view> h;
    std::size_t seed = h(l);
    seed ^= h(b) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= h(r) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
  std::size_t operator()(const TripleKey& k) const {
    return mix(k.left, k.boundary, k.right);
  }
  std::size_t operator()(const TripleView& k) const {
    return mix(k.left, k.boundary, k.right);
  }
};

struct TripleEq {
  using is_transparent = void;

  static bool eq(std::string_view al, std::string_view ab, std::string_view ar,
                 std::string_view bl, std::string_view bb,
                 std::string_view br) {
    return al == bl && ab == bb && ar == br;
  }
  bool operator()(const TripleKey& a, const TripleKey& b) const {
    return eq(a.left, a.boundary, a.right, b.left, b.boundary, b.right);
  }
  bool operator()(const TripleKey& a, const TripleView& b) const {
    return eq(a.left, a.boundary, a.right, b.left, b.boundary, b.right);
  }
  bool operator()(const TripleView& a, const TripleKey& b) const {
    return eq(a.left, a.boundary, a.right, b.left, b.boundary, b.right);
  }
};

}  // namespace detail

/// Frequency table f(left, boundary, right) -> (n_bound, n_broken) for one
/// symbol channel.  Tables for the same channel merge by entry-wise sum.
class BindingStats {
 public:
  using Map = std::unordered_map<detail::TripleKey, BoundaryCounts,
                                 detail::TripleHash, detail::TripleEq>;

  explicit BindingStats(Channel channel) : channel_(channel) {}

  Channel channel() const noexcept { return channel_; }

  void add(std::string_view left, std::string_view boundary,
           std::string_view right, BoundaryState state, std::uint64_t n = 1) {
    auto& counts = entry(left, boundary, right);
    if (state == BoundaryState::Bound)
      counts.bound += n;
    else
      counts.broken += n;
    total_ += n;
  }

  const BoundaryCounts* find(std::string_view left, std::string_view boundary,
                             std::string_view right) const {
    auto it = counts_.find(detail::TripleView{left, boundary, right});
    return it == counts_.end() ? nullptr : &it->second;
  }

  /// Entry-wise sum; the argument's channel must match.
  void merge(const BindingStats& other) {
    if (other.channel_ != channel_)
      throw MismatchError("cannot merge stats across channels");
    for (const auto& [key, counts] : other.counts_) {
      auto& mine = counts_[key];
      mine.bound += counts.bound;
      mine.broken += counts.broken;
    }
    total_ += other.total_;
  }

  /// Number of boundary observations ingested so far.
  std::uint64_t total_observations() const noexcept { return total_; }

  std::size_t entry_count() const noexcept { return counts_.size(); }
  const Map& entries() const noexcept { return counts_; }

  friend bool operator==(const BindingStats& a, const BindingStats& b) {
    return a.channel_ == b.channel_ && a.counts_ == b.counts_;
  }

 private:
  BoundaryCounts& entry(std::string_view left, std::string_view boundary,
                        std::string_view right) {
    auto it = counts_.find(detail::TripleView{left, boundary, right});
    if (it != counts_.end()) return it->second;
    return counts_[detail::TripleKey{std::string(left), std::string(boundary),
                                     std::string(right)}];
  }

  Channel channel_;
  Map counts_;
  std::uint64_t total_ = 0;
};

/// Accumulates one gold-annotated sequence into the count table.  Every
/// boundary must carry a state.
inline void observe(BindingStats& stats, const SymbolSequence& seq) {
  if (seq.channel() != stats.channel())
    throw MismatchError("sequence channel does not match stats channel");
  const auto& symbols = seq.symbols();
  const auto& boundaries = seq.boundaries();
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!boundaries[i].state)
      throw Error("cannot observe a boundary without a state");
    stats.add(symbols[i], boundaries[i].surface, symbols[i + 1],
              *boundaries[i].state);
  }
}

/// q_i = n_bound / (n_bound + n_broken).  Unseen triples and all-zero
/// entries yield 0 (broken bias; no smoothing).
inline double binding_probability(const BindingStats& stats,
                                  std::string_view left,
                                  std::string_view boundary,
                                  std::string_view right) {
  const BoundaryCounts* c = stats.find(left, boundary, right);
  if (!c) return 0.0;
  const std::uint64_t denom = c->bound + c->broken;
  if (denom == 0) return 0.0;
  return static_cast<double>(c->bound) / static_cast<double>(denom);
}

/// Supervised partition: each boundary becomes Bound iff its binding
/// probability strictly exceeds q.  Input states are ignored.
inline SymbolSequence partition(const BindingStats& stats, SymbolSequence seq,
                                Threshold q) {
  if (seq.channel() != stats.channel())
    throw MismatchError("sequence channel does not match stats channel");
  const auto& symbols = seq.symbols();
  auto& boundaries = seq.boundaries();
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const double qi = binding_probability(stats, symbols[i],
                                          boundaries[i].surface,
                                          symbols[i + 1]);
    boundaries[i].state = qi > q.value() ? BoundaryState::Bound
                                         : BoundaryState::Broken;
  }
  return seq;
}

/// Original unsupervised variant: per boundary, draw u ~ Uniform(0,1) and
/// bind iff u > q.  The generator is std::mt19937_64 seeded with `seed`;
/// each boundary consumes exactly one 64-bit draw mapped to [0,1) via
/// (x >> 11) * 2^-53.  Identical (seq, q, seed) give identical output on
/// every platform.
inline SymbolSequence stochastic_partition(SymbolSequence seq, Threshold q,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& b : seq.boundaries()) {
    const double u =
        static_cast<double>(rng() >> 11) * 0x1.0p-53;  // 53-bit mantissa
    b.state = u > q.value() ? BoundaryState::Bound : BoundaryState::Broken;
  }
  return seq;
}

/// Half-open range [begin, end) of word-symbol positions forming one
/// maximal bound run.
struct SegmentRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - begin; }
  friend bool operator==(const SegmentRange&, const SegmentRange&) = default;
};

/// Splits a fully-partitioned sequence at its broken boundaries.
inline std::vector<SegmentRange> segments_of(const SymbolSequence& seq) {
  std::vector<SegmentRange> out;
  const auto& boundaries = seq.boundaries();
  std::size_t start = 0;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!boundaries[i].state)
      throw Error("segments_of requires every boundary state to be assigned");
    if (*boundaries[i].state == BoundaryState::Broken) {
      out.push_back({start, i + 1});
      start = i + 1;
    }
  }
  out.push_back({start, seq.size()});
  return out;
}

/// Word symbols of one segment joined with their original boundary
/// surfaces, reconstructing that slice of the text.
inline std::string segment_text(const SymbolSequence& seq,
                                const SegmentRange& range) {
  std::string out;
  for (std::size_t i = range.begin; i < range.end; ++i) {
    if (i != range.begin) out += seq.boundaries()[i - 1].surface;
    out += seq.symbols()[i];
  }
  return out;
}

}  // namespace boundseg
