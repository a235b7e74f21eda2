#pragma once

// Scoring predicted MWE spans against gold annotation.
//
// Two schemes, matching the conventions of the two corpus formats:
//  - link-based: the units are pairs of consecutive tokens within a span,
//    so partial overlap earns partial credit;
//  - token-based: the units are tokens that belong to any span at all.
// Both are micro-averaged, i.e. counts are pooled over the whole corpus
// before the ratios are taken.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "boundseg/annotated.hpp"
#include "boundseg/errors.hpp"

namespace boundseg {

enum class EvalScheme { Link, Token };

inline const char* scheme_name(EvalScheme scheme) {
  return scheme == EvalScheme::Link ? "link" : "token";
}

struct EvalResult {
  EvalScheme scheme = EvalScheme::Link;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t n_correct = 0;
  std::uint64_t n_predicted = 0;
  std::uint64_t n_gold = 0;
};

namespace detail {

// Degenerate convention: predicting nothing when there is nothing to
// predict is a perfect score, but an empty prediction against non-empty
// gold (or the reverse) earns zero.  `opposite` is the other side's unit
// count, consulted only when `den` is zero.
inline double safe_ratio(std::uint64_t num, std::uint64_t den,
                         std::uint64_t opposite) {
  if (den == 0) return opposite == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

inline std::set<std::pair<std::size_t, std::size_t>> links_of(
    const std::vector<MweSpan>& spans) {
  std::set<std::pair<std::size_t, std::size_t>> links;
  for (const MweSpan& span : spans)
    for (const auto& link : consecutive_pairs(span))
      links.insert(link);
  return links;
}

inline std::set<std::size_t> members_of(const std::vector<MweSpan>& spans) {
  std::set<std::size_t> members;
  for (const MweSpan& span : spans)
    members.insert(span.indices.begin(), span.indices.end());
  return members;
}

template <typename Units>
inline void tally(const Units& gold, const Units& pred, EvalResult& result) {
  result.n_gold += gold.size();
  result.n_predicted += pred.size();
  for (const auto& unit : pred) result.n_correct += gold.count(unit);
}

inline EvalResult finish(EvalResult result) {
  result.precision =
      safe_ratio(result.n_correct, result.n_predicted, result.n_gold);
  result.recall =
      safe_ratio(result.n_correct, result.n_gold, result.n_predicted);
  const double pr = result.precision + result.recall;
  result.f1 = pr > 0.0 ? 2.0 * result.precision * result.recall / pr : 0.0;
  return result;
}

inline void check_aligned(const std::vector<AnnotatedSentence>& gold,
                          const std::vector<AnnotatedSentence>& pred) {
  if (gold.size() != pred.size())
    throw MismatchError("gold has " + std::to_string(gold.size()) +
                        " sentences but prediction has " +
                        std::to_string(pred.size()));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].tokens.size() != pred[i].tokens.size())
      throw MismatchError(
          "sentence " + std::to_string(i + 1) + " ('" + gold[i].id +
          "'): gold has " + std::to_string(gold[i].tokens.size()) +
          " tokens but prediction has " +
          std::to_string(pred[i].tokens.size()));
  }
}

}  // namespace detail

/// Link-based score over pre-extracted span lists (one entry per
/// sentence).  The corpus-level overload below validates alignment first.
inline EvalResult eval_links(
    const std::vector<std::vector<MweSpan>>& gold,
    const std::vector<std::vector<MweSpan>>& pred) {
  if (gold.size() != pred.size())
    throw MismatchError("gold and prediction differ in sentence count");
  EvalResult result;
  result.scheme = EvalScheme::Link;
  for (std::size_t i = 0; i < gold.size(); ++i)
    detail::tally(detail::links_of(gold[i]), detail::links_of(pred[i]),
                  result);
  return detail::finish(result);
}

inline EvalResult eval_tokens(
    const std::vector<std::vector<MweSpan>>& gold,
    const std::vector<std::vector<MweSpan>>& pred) {
  if (gold.size() != pred.size())
    throw MismatchError("gold and prediction differ in sentence count");
  EvalResult result;
  result.scheme = EvalScheme::Token;
  for (std::size_t i = 0; i < gold.size(); ++i)
    detail::tally(detail::members_of(gold[i]), detail::members_of(pred[i]),
                  result);
  return detail::finish(result);
}

namespace detail {

inline std::vector<std::vector<MweSpan>> spans_only(
    const std::vector<AnnotatedSentence>& sentences) {
  std::vector<std::vector<MweSpan>> out;
  out.reserve(sentences.size());
  for (const AnnotatedSentence& sent : sentences) out.push_back(sent.mwes);
  return out;
}

}  // namespace detail

inline EvalResult evaluate(const std::vector<AnnotatedSentence>& gold,
                           const std::vector<AnnotatedSentence>& pred,
                           EvalScheme scheme) {
  detail::check_aligned(gold, pred);
  return scheme == EvalScheme::Link
             ? eval_links(detail::spans_only(gold), detail::spans_only(pred))
             : eval_tokens(detail::spans_only(gold),
                           detail::spans_only(pred));
}

/// Tab-separated key/value report, one metric per line.
inline void format_report(std::ostream& out, const EvalResult& result) {
  const auto line = [&out](const char* key, const auto& value) {
    out << key << '\t' << value << '\n';
  };
  line("scheme", scheme_name(result.scheme));
  line("precision", result.precision);
  line("recall", result.recall);
  line("f1", result.f1);
  line("n_correct", result.n_correct);
  line("n_predicted", result.n_predicted);
  line("n_gold", result.n_gold);
}

}  // namespace boundseg
