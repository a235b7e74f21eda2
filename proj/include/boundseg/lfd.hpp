#pragma once

// Longest-first-defined pruning.
//
// A candidate segment produced by the partitioner is not necessarily an
// MWE; this pass clips off the longest lexicon-attested prefix along the
// reading direction, accepting a single token whenever no prefix is known.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "boundseg/errors.hpp"

namespace boundseg {

enum class Provenance { Gold, Support };

inline std::string_view provenance_name(Provenance p) {
  return p == Provenance::Gold ? "GOLD" : "SUPPORT";
}

namespace detail {
struct SvHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};
struct SvEq {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const {
    return a == b;
  }
};
}  // namespace detail

/// Set of known MWE surface forms, each stored as the single-space join of
/// its word tokens.  Single words are never entries.
class Lexicon {
 public:
  using Map = std::unordered_map<std::string, Provenance, detail::SvHash,
                                 detail::SvEq>;

  /// Adds one form; returns false (and counts it) when the entry has
  /// fewer than two tokens.  Gold provenance wins over support.
  bool add(std::span<const std::string> tokens, Provenance provenance) {
    if (tokens.size() < 2) {
      ++skipped_short_;
      return false;
    }
    std::string form = join(tokens);
    auto [it, inserted] = forms_.try_emplace(std::move(form), provenance);
    if (!inserted && provenance == Provenance::Gold)
      it->second = Provenance::Gold;
    return true;
  }

  void add_joined(std::string form, Provenance provenance) {
    auto [it, inserted] = forms_.try_emplace(std::move(form), provenance);
    if (!inserted && provenance == Provenance::Gold)
      it->second = Provenance::Gold;
  }

  bool contains(std::string_view joined_form) const {
    return forms_.find(joined_form) != forms_.end();
  }

  std::size_t size() const noexcept { return forms_.size(); }
  bool empty() const noexcept { return forms_.empty(); }

  /// Entries rejected by the two-token rule since construction.
  std::size_t skipped_short_entries() const noexcept { return skipped_short_; }

  const Map& forms() const noexcept { return forms_; }

  static std::string join(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out += ' ';
      out += tokens[i];
    }
    return out;
  }

 private:
  Map forms_;
  std::size_t skipped_short_ = 0;
};

/// Builds a lexicon from gold MWE token lists and external support forms.
/// Gappy gold MWEs must already be split into their contiguous runs by the
/// caller; sub-two-token entries are skipped, not rejected.
inline Lexicon build_lexicon(
    const std::vector<std::vector<std::string>>& gold_mwes,
    const std::vector<std::vector<std::string>>& support_forms) {
  Lexicon lex;
  for (const auto& entry : support_forms) lex.add(entry, Provenance::Support);
  for (const auto& entry : gold_mwes) lex.add(entry, Provenance::Gold);
  return lex;
}

/// Greedy longest-prefix pruning.  Repeatedly emits the longest prefix of
/// the remaining tokens whose space-join is a lexicon entry, falling back
/// to the first token alone, until the input is consumed.  The emitted
/// segments concatenate to the input.
inline std::vector<std::vector<std::string>> lfd_prune(
    std::span<const std::string> tokens, const Lexicon& lex) {
  std::vector<std::vector<std::string>> lexemes;
  std::size_t start = 0;
  while (start < tokens.size()) {
    const std::size_t remaining = tokens.size() - start;
    std::size_t take = 1;
    std::string form;
    for (std::size_t len = remaining; len >= 2; --len) {
      form.clear();
      for (std::size_t i = 0; i < len; ++i) {
        if (i) form += ' ';
        form += tokens[start + i];
      }
      if (lex.contains(form)) {
        take = len;
        break;
      }
    }
    lexemes.emplace_back(tokens.begin() + start, tokens.begin() + start + take);
    start += take;
  }
  return lexemes;
}

inline std::vector<std::vector<std::string>> lfd_prune(
    const std::vector<std::string>& tokens, const Lexicon& lex) {
  return lfd_prune(std::span<const std::string>(tokens), lex);
}

}  // namespace boundseg
