#pragma once

// Annotated sentence records shared by the corpus readers, the segmenter
// and the evaluation metrics.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "boundseg/errors.hpp"

namespace boundseg {

/// One word token plus whatever the source format attached to it.  The
/// strength/supersense/sent_id fields are carried verbatim so corpus
/// round-trips stay byte-exact.
struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;
  std::string strength;
  std::string supersense;
  std::string sent_id;
};

/// An MWE as an ordered set of token indices (0-based, strictly
/// increasing, possibly non-contiguous).  Ordinary MWEs have two or more
/// tokens; singletons only arise from the anomalous-token rule.
struct MweSpan {
  std::vector<std::size_t> indices;
  std::string category;  // source-format label, empty when unknown

  bool contiguous() const noexcept {
    return indices.empty() ||
           indices.back() - indices.front() + 1 == indices.size();
  }

  friend bool operator==(const MweSpan& a, const MweSpan& b) {
    return a.indices == b.indices;
  }
  friend bool operator<(const MweSpan& a, const MweSpan& b) {
    return a.indices < b.indices;
  }
};

/// Consecutive in-span index pairs: span (i1,...,in) -> (i1,i2)...(in-1,in).
inline std::vector<std::pair<std::size_t, std::size_t>> consecutive_pairs(
    const MweSpan& span) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 1; k < span.indices.size(); ++k)
    out.emplace_back(span.indices[k - 1], span.indices[k]);
  return out;
}

struct AnnotatedSentence {
  std::string id;  // source name / sentence id, used in diagnostics
  std::vector<Token> tokens;
  std::vector<std::string> boundaries;  // size = tokens.size() - 1
  std::vector<MweSpan> mwes;

  void validate() const {
    if (tokens.empty()) throw Error("sentence '" + id + "' has no tokens");
    if (boundaries.size() + 1 != tokens.size())
      throw Error("sentence '" + id + "' has " +
                  std::to_string(boundaries.size()) + " boundaries for " +
                  std::to_string(tokens.size()) + " tokens");
    for (const MweSpan& span : mwes) {
      if (span.indices.empty())
        throw Error("sentence '" + id + "' has an empty MWE span");
      for (std::size_t k = 0; k < span.indices.size(); ++k) {
        if (span.indices[k] >= tokens.size())
          throw Error("sentence '" + id + "' has an MWE index out of range");
        if (k && span.indices[k] <= span.indices[k - 1])
          throw Error("sentence '" + id +
                      "' has a non-increasing MWE index list");
      }
    }
  }

  std::vector<std::string> surfaces() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens) out.push_back(t.surface);
    return out;
  }
};

}  // namespace boundseg
