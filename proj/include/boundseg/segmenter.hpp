#pragma once

// End-to-end MWE segmentation: surface and POS channels, gap search,
// LFD pruning, and the anomalous single-token rule.
//
// The model is immutable once trained; segment() is pure per sentence,
// so callers may fan sentences out across threads freely.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "boundseg/annotated.hpp"
#include "boundseg/core.hpp"
#include "boundseg/errors.hpp"
#include "boundseg/lfd.hpp"

namespace boundseg {

// The reserved POS tag standing in for a space boundary on the tag channel.
inline constexpr std::string_view kSpacePosTag = "SP";

struct AnomalousCount {
  std::uint64_t n_anomalous = 0;  // occurrences annotated as a lone MWE
  std::uint64_t n_total = 0;      // occurrences overall

  bool operator==(const AnomalousCount&) const = default;
};

struct SegmenterModel {
  BindingStats surface_stats{Channel::Surface};
  std::optional<BindingStats> pos_stats;
  Threshold q_tok{0.5};
  std::optional<Threshold> q_pos;
  Lexicon lexicon;
  std::map<std::string, AnomalousCount> anomalous;
  std::size_t gap_window = 3;
  bool lowercase = false;

  void validate() const {
    if (pos_stats.has_value() != q_pos.has_value())
      throw Error("model must carry q_pos exactly when it has a POS channel");
    if (gap_window < 1) throw Error("gap_window must be >= 1");
  }
};

namespace detail {

inline std::string ascii_lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
  return s;
}

inline std::vector<std::string> effective_surfaces(
    const AnnotatedSentence& sent, bool lowercase) {
  std::vector<std::string> out = sent.surfaces();
  if (lowercase)
    for (std::string& s : out) s = ascii_lower(std::move(s));
  return out;
}

}  // namespace detail

struct BoundaryAssignment {
  std::vector<BoundaryState> states;  // one per inter-token boundary
  // links between non-adjacent members of the same span, as token indices
  std::vector<std::pair<std::size_t, std::size_t>> gap_links;
};

namespace detail {

// Boundary semantics alone: a boundary is BOUND iff its two tokens are
// adjacent members of some span, and every non-adjacent member pair is a
// gap link (once per span that carries it).  Checks per-span shape only,
// so corpora with shared-token spans still train.
inline BoundaryAssignment boundary_assignment(const std::string& sent_id,
                                              std::size_t n_tokens,
                                              const std::vector<MweSpan>& spans) {
  BoundaryAssignment out;
  out.states.assign(n_tokens >= 1 ? n_tokens - 1 : 0, BoundaryState::Broken);
  for (const MweSpan& span : spans) {
    const auto& idx = span.indices;
    if (idx.empty()) throw Error("sentence '" + sent_id + "': empty MweSpan");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= n_tokens)
        throw Error("sentence '" + sent_id + "': MweSpan index out of range");
      if (k > 0 && idx[k] <= idx[k - 1])
        throw Error("sentence '" + sent_id +
                    "': MweSpan indices must be strictly increasing");
    }
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (idx[k] == idx[k - 1] + 1)
        out.states[idx[k - 1]] = BoundaryState::Bound;
      else
        out.gap_links.emplace_back(idx[k - 1], idx[k]);
    }
  }
  std::sort(out.gap_links.begin(), out.gap_links.end());
  return out;
}

}  // namespace detail

/// Maps spans back onto boundary states: adjacent-in-span token pairs are
/// BOUND, everything else BROKEN, and non-adjacent pairs become gap links.
/// Rejects span sets the nesting rule cannot express (shared tokens or
/// crossing extents); training uses the permissive form above instead.
inline BoundaryAssignment spans_to_boundary_states(
    const AnnotatedSentence& sent, const std::vector<MweSpan>& spans) {
  const std::size_t n = sent.tokens.size();
  std::vector<int> owner(n, -1);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const auto& idx = spans[s].indices;
    if (idx.empty()) throw Error("empty MweSpan");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= n) throw Error("MweSpan index out of range");
      if (k > 0 && idx[k] <= idx[k - 1])
        throw Error("MweSpan indices must be strictly increasing");
      if (owner[idx[k]] != -1)
        throw Error("sentence '" + sent.id + "': spans share token " +
                    std::to_string(idx[k] + 1));
      owner[idx[k]] = static_cast<int>(s);
    }
  }
  for (std::size_t a = 0; a < spans.size(); ++a) {
    for (std::size_t b = a + 1; b < spans.size(); ++b) {
      const auto& ia = spans[a].indices;
      const auto& ib = spans[b].indices;
      const bool disjoint =
          ia.back() < ib.front() || ib.back() < ia.front();
      if (disjoint) continue;
      const auto nested = [](const std::vector<std::size_t>& outer,
                             const std::vector<std::size_t>& inner) {
        for (std::size_t k = 1; k < outer.size(); ++k)
          if (outer[k - 1] < inner.front() && inner.back() < outer[k])
            return true;
        return false;
      };
      if (!nested(ia, ib) && !nested(ib, ia))
        throw Error("sentence '" + sent.id +
                    "': crossing spans violate the nesting rule");
    }
  }
  return detail::boundary_assignment(sent.id, n, spans);
}

/// The inverse direction for gap-free sentences: maximal bound runs of
/// length >= 2 become contiguous spans.
inline std::vector<MweSpan> spans_from_boundary_states(
    const std::vector<BoundaryState>& states) {
  std::vector<MweSpan> spans;
  const std::size_t n_tokens = states.size() + 1;
  std::size_t start = 0;
  for (std::size_t t = 0; t < n_tokens; ++t) {
    const bool run_ends = t + 1 >= n_tokens || states[t] == BoundaryState::Broken;
    if (!run_ends) continue;
    if (t > start) {
      MweSpan span;
      for (std::size_t k = start; k <= t; ++k) span.indices.push_back(k);
      spans.push_back(std::move(span));
    }
    start = t + 1;
  }
  return spans;
}

struct TrainOptions {
  bool use_pos = false;
  bool lowercase = false;
  std::size_t gap_window = 3;
  Threshold q_tok{0.5};
  std::optional<Threshold> q_pos;  // defaults to 0.5 when use_pos is set
  // bare MWE forms: lexicon only, no counts
  std::vector<std::vector<std::string>> support_forms;
  // support sentences with marked spans: counts and lexicon, no POS and
  // no anomalous tallies (those describe the annotation corpus proper)
  std::vector<AnnotatedSentence> support_context;
};

namespace detail {

inline void observe_channel(BindingStats& stats,
                            const std::vector<std::string>& symbols,
                            const std::vector<std::string>& boundary_surfaces,
                            const BoundaryAssignment& assign,
                            const std::vector<std::string>& gap_symbols) {
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
    stats.add(symbols[i], boundary_surfaces[i], symbols[i + 1],
              assign.states[i]);
  for (const auto& [a, b] : assign.gap_links)
    stats.add(gap_symbols[a], kGapMarker, gap_symbols[b],
              BoundaryState::Bound);
}

inline std::vector<std::string> pos_boundary_surfaces(
    const std::vector<std::string>& boundaries) {
  std::vector<std::string> out = boundaries;
  for (std::string& b : out)
    if (b == " ") b = std::string(kSpacePosTag);
  return out;
}

inline void collect_contiguous_runs(
    const MweSpan& span, const std::vector<std::string>& surfaces,
    std::vector<std::vector<std::string>>& out) {
  std::size_t run_start = 0;
  const auto& idx = span.indices;
  for (std::size_t k = 1; k <= idx.size(); ++k) {
    const bool breaks = k == idx.size() || idx[k] != idx[k - 1] + 1;
    if (!breaks) continue;
    if (k - run_start >= 2) {
      std::vector<std::string> run;
      for (std::size_t j = run_start; j < k; ++j)
        run.push_back(surfaces[idx[j]]);
      out.push_back(std::move(run));
    }
    run_start = k;
  }
}

}  // namespace detail

/// Learns binding statistics, the anomalous table and the LFD lexicon
/// from a gold corpus, optionally folding in support data.
inline SegmenterModel train(const std::vector<AnnotatedSentence>& corpus,
                            const TrainOptions& opts = {}) {
  if (opts.gap_window < 1)
    throw std::invalid_argument("gap_window must be >= 1");
  SegmenterModel model;
  model.q_tok = opts.q_tok;
  model.gap_window = opts.gap_window;
  model.lowercase = opts.lowercase;
  if (opts.use_pos) {
    model.pos_stats.emplace(Channel::Pos);
    model.q_pos = opts.q_pos ? *opts.q_pos : Threshold(0.5);
  }

  std::vector<std::vector<std::string>> gold_forms;
  std::vector<std::vector<std::string>> support_forms;
  for (const auto& form : opts.support_forms) {
    if (!opts.lowercase) {
      support_forms.push_back(form);
      continue;
    }
    std::vector<std::string> lowered;
    for (const std::string& t : form)
      lowered.push_back(detail::ascii_lower(t));
    support_forms.push_back(std::move(lowered));
  }

  const auto ingest = [&](const AnnotatedSentence& sent, bool gold) {
    sent.validate();
    const auto eff = detail::effective_surfaces(sent, opts.lowercase);
    const BoundaryAssignment assign = detail::boundary_assignment(
        sent.id, sent.tokens.size(), sent.mwes);
    detail::observe_channel(model.surface_stats, eff, sent.boundaries,
                            assign, eff);

    if (gold && opts.use_pos) {
      std::vector<std::string> tags;
      for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
        if (sent.tokens[t].pos.empty())
          throw MismatchError("sentence '" + sent.id + "': token " +
                              std::to_string(t + 1) +
                              " has no POS tag but POS training was requested");
        tags.push_back(sent.tokens[t].pos);
      }
      detail::observe_channel(*model.pos_stats, tags,
                              detail::pos_boundary_surfaces(sent.boundaries),
                              assign, tags);
    }

    if (gold) {
      for (const std::string& surface : eff) ++model.anomalous[surface].n_total;
      for (const MweSpan& span : sent.mwes)
        if (span.indices.size() == 1)
          ++model.anomalous[eff[span.indices.front()]].n_anomalous;
    }

    for (const MweSpan& span : sent.mwes)
      detail::collect_contiguous_runs(span, eff,
                                      gold ? gold_forms : support_forms);
  };

  for (const AnnotatedSentence& sent : corpus) ingest(sent, true);
  for (const AnnotatedSentence& sent : opts.support_context)
    ingest(sent, false);

  model.lexicon = build_lexicon(gold_forms, support_forms);
  return model;
}

namespace detail {

// One contiguous token range [begin, end) after partitioning/pruning.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

struct PieceGraph {
  std::vector<TokenRange> pieces;
  std::vector<std::size_t> component;  // union-find parent per piece

  std::size_t root(std::size_t p) {
    while (component[p] != p) p = component[p] = component[component[p]];
    return p;
  }
  void link(std::size_t a, std::size_t b) { component[root(a)] = root(b); }
};

}  // namespace detail

/// Runs the full pipeline on one sentence with explicit thresholds,
/// leaving the model untouched.  The tuner calls this directly so that
/// one trained model serves every grid point.
inline std::vector<MweSpan> segment_with(const SegmenterModel& model,
                                         const AnnotatedSentence& sentence,
                                         bool use_lfd, Threshold q_tok,
                                         std::optional<Threshold> q_pos) {
  model.validate();
  sentence.validate();
  if (model.pos_stats.has_value() != q_pos.has_value())
    throw Error("q_pos must be given exactly when the model has a POS channel");
  const std::size_t n = sentence.tokens.size();
  const auto eff = detail::effective_surfaces(sentence, model.lowercase);

  // Steps 1-3: per-channel partitions, merged by union.
  std::vector<char> bound(n >= 1 ? n - 1 : 0, 0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    bound[i] = binding_probability(model.surface_stats, eff[i],
                                   sentence.boundaries[i], eff[i + 1]) >
               q_tok.value();
  if (model.pos_stats) {
    for (std::size_t t = 0; t < n; ++t)
      if (sentence.tokens[t].pos.empty())
        throw MismatchError("sentence '" + sentence.id + "': token " +
                            std::to_string(t + 1) +
                            " has no POS tag but the model has a POS channel");
    const auto pos_bounds = detail::pos_boundary_surfaces(sentence.boundaries);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (bound[i]) continue;
      bound[i] = binding_probability(*model.pos_stats, sentence.tokens[i].pos,
                                     pos_bounds[i],
                                     sentence.tokens[i + 1].pos) >
                 q_pos->value();
    }
  }

  std::vector<detail::TokenRange> segs;
  {
    std::size_t start = 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (t + 1 < n && bound[t]) continue;
      segs.push_back({start, t + 1});
      start = t + 1;
    }
  }

  // Step 4: greedy left-to-right gap search.  Distances are measured in
  // intervening segments, so a nested MWE inside a gap counts as one
  // unit regardless of its token length.
  const std::size_t m = segs.size();
  std::vector<char> in_gap(m, 0);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < m; ++i) {
    if (in_gap[i]) continue;
    std::vector<std::size_t> chain{i};
    std::size_t tail = i;
    bool extended = true;
    while (extended) {
      extended = false;
      for (std::size_t j = tail + 2;
           j < m && j - tail - 1 <= model.gap_window; ++j) {
        const double q = binding_probability(model.surface_stats,
                                             eff[segs[tail].end - 1],
                                             kGapMarker, eff[segs[j].begin]);
        if (q > q_tok.value()) {
          for (std::size_t k = tail + 1; k < j; ++k) in_gap[k] = 1;
          chain.push_back(j);
          tail = j;
          extended = true;
          break;
        }
      }
    }
    groups.push_back(std::move(chain));
    i = tail;  // segments in between are flagged in_gap already
  }
  for (std::size_t i = 0; i < m; ++i)
    if (in_gap[i]) groups.push_back({i});

  // Steps 5-6: LFD pruning per contiguous run, then span emission.
  std::vector<MweSpan> spans;
  std::vector<char> covered(n, 0);
  const auto emit = [&](std::vector<std::size_t> indices) {
    if (indices.size() < 2) return;
    std::sort(indices.begin(), indices.end());
    for (std::size_t t : indices) covered[t] = 1;
    spans.push_back(MweSpan{std::move(indices), ""});
  };

  for (const auto& group : groups) {
    if (!use_lfd) {
      std::vector<std::size_t> indices;
      for (std::size_t s : group)
        for (std::size_t t = segs[s].begin; t < segs[s].end; ++t)
          indices.push_back(t);
      emit(std::move(indices));
      continue;
    }

    // Prune each run independently; a gap attachment survives only if
    // the pieces at its two ends were not carved off a larger run, i.e.
    // each end piece is multi-token or its run was left unsplit.
    detail::PieceGraph graph;
    std::vector<std::size_t> run_first(group.size()), run_last(group.size());
    std::vector<char> run_unsplit(group.size(), 0);
    for (std::size_t r = 0; r < group.size(); ++r) {
      const detail::TokenRange seg = segs[group[r]];
      std::vector<std::string> slice(eff.begin() + seg.begin,
                                     eff.begin() + seg.end);
      const auto pieces = lfd_prune(slice, model.lexicon);
      run_unsplit[r] = pieces.size() == 1;
      run_first[r] = graph.pieces.size();
      std::size_t offset = seg.begin;
      for (const auto& piece : pieces) {
        graph.pieces.push_back({offset, offset + piece.size()});
        offset += piece.size();
      }
      run_last[r] = graph.pieces.size() - 1;
    }
    graph.component.resize(graph.pieces.size());
    for (std::size_t p = 0; p < graph.pieces.size(); ++p)
      graph.component[p] = p;
    for (std::size_t r = 0; r + 1 < group.size(); ++r) {
      const bool left_ok =
          graph.pieces[run_last[r]].length() >= 2 || run_unsplit[r];
      const bool right_ok =
          graph.pieces[run_first[r + 1]].length() >= 2 || run_unsplit[r + 1];
      if (left_ok && right_ok) graph.link(run_last[r], run_first[r + 1]);
    }
    std::map<std::size_t, std::vector<std::size_t>> by_component;
    for (std::size_t p = 0; p < graph.pieces.size(); ++p) {
      auto& indices = by_component[graph.root(p)];
      for (std::size_t t = graph.pieces[p].begin; t < graph.pieces[p].end;
           ++t)
        indices.push_back(t);
    }
    for (auto& [root, indices] : by_component) emit(std::move(indices));
  }

  // Anomalous singletons on whatever is left uncovered.
  for (std::size_t t = 0; t < n; ++t) {
    if (covered[t]) continue;
    const auto it = model.anomalous.find(eff[t]);
    if (it == model.anomalous.end()) continue;
    const AnomalousCount& c = it->second;
    if (c.n_total > 0 && 2 * c.n_anomalous >= c.n_total)
      spans.push_back(MweSpan{{t}, ""});
  }

  std::sort(spans.begin(), spans.end());
  return spans;
}

/// Runs the full pipeline on one sentence at the model's own thresholds
/// and returns the predicted spans: multi-token MWEs (possibly gappy)
/// plus anomalous singletons.
inline std::vector<MweSpan> segment(const SegmenterModel& model,
                                    const AnnotatedSentence& sentence,
                                    bool use_lfd = false) {
  return segment_with(model, sentence, use_lfd, model.q_tok, model.q_pos);
}

/// Convenience wrapper: segments every sentence and installs the result
/// as its span list, leaving tokens and boundaries untouched.
inline std::vector<AnnotatedSentence> segment_corpus(
    const SegmenterModel& model, std::vector<AnnotatedSentence> sentences,
    bool use_lfd = false) {
  for (AnnotatedSentence& sent : sentences)
    sent.mwes = segment(model, sent, use_lfd);
  return sentences;
}

}  // namespace boundseg
