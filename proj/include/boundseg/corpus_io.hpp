#pragma once

// Corpus wire formats and pre-processing.
//
// Two gold-standard formats are supported: a 9-column BIO-style TSV with
// lowercase tags marking tokens inside the gaps of other expressions, and
// a 4-column indexed-MWE TSV with no-space flags.  Neither format records
// spaces explicitly for the BIO variant, so boundary surfaces are inferred
// with the heuristic rules in infer_spaces.

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "boundseg/annotated.hpp"
#include "boundseg/core.hpp"
#include "boundseg/errors.hpp"

namespace boundseg {

enum class CorpusFormat { Dimsum, Parseme };

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

inline bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  out = v;
  return true;
}

// Minimal UTF-8 decode; invalid bytes fall back to their Latin-1 value.
inline std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0)
      len = 4, cp = c & 0x07u;
    else if (c >= 0xE0)
      len = 3, cp = c & 0x0Fu;
    else if (c >= 0xC0)
      len = 2, cp = c & 0x1Fu;
    if (len > 1) {
      if (i + len > s.size()) {
        out.push_back(c);
        ++i;
        continue;
      }
      bool ok = true;
      for (std::size_t k = 1; k < len; ++k) {
        const unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0u) != 0x80u) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (cc & 0x3Fu);
      }
      if (!ok) {
        out.push_back(c);
        ++i;
        continue;
      }
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

template <std::size_t N>
inline bool in_table(const std::array<char32_t, N>& table, char32_t cp) {
  return std::binary_search(table.begin(), table.end(), cp);
}

// Unicode Ps (group openers), common subset.
inline constexpr std::array<char32_t, 22> kOpeners = {
    U'(',    U'[',    U'{',    0x201A, 0x201E, 0x2045, 0x2329, 0x27E6,
    0x27E8,  0x27EA,  0x27EC,  0x27EE, 0x3008, 0x300A, 0x300C, 0x300E,
    0x3010,  0x3014,  0xFF08,  0xFF3B, 0xFF5B, 0xFF62};

// Unicode Pe (group closers), common subset.
inline constexpr std::array<char32_t, 22> kClosers = {
    U')',    U']',    U'}',    0x2046, 0x232A, 0x27E7, 0x27E9, 0x27EB,
    0x27ED,  0x27EF,  0x3009,  0x300B, 0x300D, 0x300F, 0x3011, 0x3015,
    0x301E,  0x301F,  0xFF09,  0xFF3D, 0xFF5D, 0xFF63};

// Unicode Pi / Pf: pre-paired initial and final quotes.
inline constexpr std::array<char32_t, 6> kInitialQuotes = {
    0xAB, 0x2018, 0x201B, 0x201C, 0x201F, 0x2039};
inline constexpr std::array<char32_t, 4> kFinalQuotes = {0xBB, 0x2019, 0x201D,
                                                         0x203A};

// Straight quotes whose role is decided by per-sentence parity.
inline constexpr std::array<char32_t, 2> kParityQuotes = {U'"', U'\''};

// Remaining punctuation (Po/Pd/Pc), common subset.
inline constexpr std::array<char32_t, 46> kOtherPunct = {
    U'!',   U'#',   U'%',   U'&',   U'*',   U',',   U'-',   U'.',   U'/',
    U':',   U';',   U'?',   U'@',   U'\\',  U'_',   0xA1,   0xA7,   0xB6,
    0xB7,   0xBF,   0x2010, 0x2011, 0x2012, 0x2013, 0x2014, 0x2015, 0x2016,
    0x2020, 0x2021, 0x2022, 0x2026, 0x2030, 0x2032, 0x2033, 0x203C, 0x2047,
    0x2048, 0x2049, 0x3001, 0x3002, 0x30FB, 0xFF01, 0xFF0C, 0xFF0E, 0xFF1A,
    0xFF1F};

inline bool is_punct_cp(char32_t cp) {
  return in_table(kOpeners, cp) || in_table(kClosers, cp) ||
         in_table(kInitialQuotes, cp) || in_table(kFinalQuotes, cp) ||
         in_table(kParityQuotes, cp) || in_table(kOtherPunct, cp);
}

enum class SpaceClass { Word, Open, Close, QuoteOpen, QuoteClose, Punct };

}  // namespace detail

/// Heuristic space inference for formats without explicit boundaries.
/// Default is a space on both sides of every token; group openers and
/// odd-indexed quotes carry space at left only, while punctuation, group
/// closers and even-indexed quotes carry space at right only.  Quote
/// parity is tracked per quote character and resets per sentence.
inline std::vector<std::string> infer_spaces(
    const std::vector<std::string>& tokens) {
  using detail::SpaceClass;
  if (tokens.empty()) return {};

  std::map<char32_t, std::size_t> quote_seen;
  std::vector<SpaceClass> cls(tokens.size(), SpaceClass::Word);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto cps = detail::decode_utf8(tokens[i]);
    bool all_punct = !cps.empty();
    for (char32_t cp : cps) all_punct = all_punct && detail::is_punct_cp(cp);
    if (!all_punct) continue;
    const char32_t head = cps.front();
    if (detail::in_table(detail::kOpeners, head))
      cls[i] = SpaceClass::Open;
    else if (detail::in_table(detail::kClosers, head))
      cls[i] = SpaceClass::Close;
    else if (detail::in_table(detail::kInitialQuotes, head))
      cls[i] = SpaceClass::QuoteOpen;
    else if (detail::in_table(detail::kFinalQuotes, head))
      cls[i] = SpaceClass::QuoteClose;
    else if (detail::in_table(detail::kParityQuotes, head))
      cls[i] = (++quote_seen[head] % 2 == 1) ? SpaceClass::QuoteOpen
                                             : SpaceClass::QuoteClose;
    else
      cls[i] = SpaceClass::Punct;
  }

  std::vector<std::string> boundaries(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const bool left_suppresses = cls[i] == SpaceClass::Open ||
                                 cls[i] == SpaceClass::QuoteOpen;
    const bool right_suppresses = cls[i + 1] == SpaceClass::Punct ||
                                  cls[i + 1] == SpaceClass::Close ||
                                  cls[i + 1] == SpaceClass::QuoteClose;
    boundaries[i] = (left_suppresses || right_suppresses) ? "" : " ";
  }
  return boundaries;
}

namespace detail {

inline void reject_gap_marker(std::string_view token, const std::string& src,
                              std::size_t line) {
  if (token == kGapMarker)
    throw ParseError(src, line,
                     "token collides with the reserved gap marker");
}

struct Block {
  std::vector<std::string> lines;
  std::vector<std::size_t> line_numbers;
};

template <typename Fn>
inline void for_each_block(std::istream& in, Fn&& fn) {
  Block block;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      if (!block.lines.empty()) fn(block);
      block = Block{};
      continue;
    }
    block.lines.push_back(line);
    block.line_numbers.push_back(line_no);
  }
  if (!block.lines.empty()) fn(block);
}

}  // namespace detail

/// Reads the 9-column BIO-variant TSV.  Tags O/o/B/b/I/i; parent offsets
/// chain each I/i token to the previous token of its expression; lowercase
/// tags are only legal inside the gap of an uppercase expression.  Ignored
/// columns (strength, supersense, sentence id) are preserved verbatim.
inline std::vector<AnnotatedSentence> read_dimsum(
    std::istream& in, const std::string& source = "<input>") {
  std::vector<AnnotatedSentence> sentences;
  std::size_t block_index = 0;

  detail::for_each_block(in, [&](const detail::Block& block) {
    ++block_index;
    AnnotatedSentence sent;
    std::vector<char> tags;

    struct Chain {
      std::vector<std::size_t> indices;
      bool upper = false;
    };
    std::vector<Chain> chains;
    // token index -> chain id, for parent lookups
    std::vector<int> chain_of(block.lines.size(), -1);

    for (std::size_t row = 0; row < block.lines.size(); ++row) {
      const std::size_t line_no = block.line_numbers[row];
      const auto cols = detail::split(block.lines[row], '\t');
      if (cols.size() != 9)
        throw ParseError(source, line_no,
                         "expected 9 tab-separated columns, got " +
                             std::to_string(cols.size()));
      std::size_t offset = 0;
      if (!detail::parse_size(cols[0], offset) || offset != row + 1)
        throw ParseError(source, line_no, "non-consecutive token offset");
      detail::reject_gap_marker(cols[1], source, line_no);

      Token tok;
      tok.surface = std::string(cols[1]);
      tok.lemma = std::string(cols[2]);
      tok.pos = std::string(cols[3]);
      tok.strength = std::string(cols[6]);
      tok.supersense = std::string(cols[7]);
      tok.sent_id = std::string(cols[8]);

      const std::string_view tag = cols[4];
      if (tag.size() != 1 || std::string_view("OoBbIi").find(tag[0]) ==
                                 std::string_view::npos)
        throw ParseError(source, line_no,
                         "unknown MWE tag '" + std::string(tag) + "'");
      std::size_t parent = 0;
      if (!detail::parse_size(cols[5], parent))
        throw ParseError(source, line_no, "malformed parent offset");

      const char t = tag[0];
      if (t == 'B' || t == 'b') {
        chains.push_back({{row}, t == 'B'});
        chain_of[row] = static_cast<int>(chains.size()) - 1;
      } else if (t == 'I' || t == 'i') {
        if (parent == 0 || parent > row)
          throw ParseError(source, line_no, "dangling parent offset");
        const int parent_chain = chain_of[parent - 1];
        if (parent_chain < 0)
          throw ParseError(source, line_no,
                           "parent offset does not reference an MWE token");
        if (chains[parent_chain].upper != (t == 'I'))
          throw ParseError(source, line_no,
                           "tag case does not match its parent chain");
        chains[parent_chain].indices.push_back(row);
        chain_of[row] = parent_chain;
      } else if (parent != 0) {
        throw ParseError(source, line_no,
                         "tag '" + std::string(1, t) + "' cannot have a parent");
      }
      tags.push_back(t);
      sent.tokens.push_back(std::move(tok));
    }

    // Lowercase tags must sit strictly inside an uppercase expression.
    for (std::size_t row = 0; row < tags.size(); ++row) {
      if (tags[row] != 'o' && tags[row] != 'b' && tags[row] != 'i') continue;
      bool in_gap = false;
      for (const auto& chain : chains) {
        if (!chain.upper) continue;
        if (chain.indices.front() < row && row < chain.indices.back()) {
          in_gap = true;
          break;
        }
      }
      if (!in_gap)
        throw ParseError(source, block.line_numbers[row],
                         "lowercase tag outside a gap");
    }

    for (const auto& chain : chains) sent.mwes.push_back({chain.indices, ""});
    std::sort(sent.mwes.begin(), sent.mwes.end());
    sent.boundaries = infer_spaces(sent.surfaces());
    sent.id = !sent.tokens.front().sent_id.empty()
                  ? sent.tokens.front().sent_id
                  : source + "#" + std::to_string(block_index);
    sent.validate();
    sentences.push_back(std::move(sent));
  });
  return sentences;
}

namespace detail {

// Nesting layout of one sentence's spans for BIO encoding: which spans
// are top-level, which are nested inside a gap, and the resulting tags.
struct BioLayout {
  std::vector<char> tags;           // 'O','o','B','b','I','i'
  std::vector<std::size_t> parents; // 1-based, 0 = none
};

inline bool inside_gap_of(const MweSpan& outer, const MweSpan& inner) {
  // All inner indices strictly between two consecutive members of outer.
  for (std::size_t k = 1; k < outer.indices.size(); ++k) {
    if (outer.indices[k - 1] < inner.indices.front() &&
        inner.indices.back() < outer.indices[k])
      return true;
  }
  return false;
}

inline BioLayout bio_layout(const AnnotatedSentence& sent) {
  const auto& spans = sent.mwes;
  std::vector<int> owner(sent.tokens.size(), -1);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    for (std::size_t idx : spans[s].indices) {
      if (owner[idx] != -1)
        throw Error("sentence '" + sent.id +
                    "': overlapping MWE spans are not expressible");
      owner[idx] = static_cast<int>(s);
    }
  }

  std::vector<int> nested_in(spans.size(), -1);
  for (std::size_t a = 0; a < spans.size(); ++a) {
    for (std::size_t b = 0; b < spans.size(); ++b) {
      if (a == b) continue;
      const bool disjoint = spans[a].indices.back() < spans[b].indices.front() ||
                            spans[b].indices.back() < spans[a].indices.front();
      if (disjoint) continue;
      if (inside_gap_of(spans[b], spans[a])) {
        nested_in[a] = static_cast<int>(b);
      } else if (!inside_gap_of(spans[a], spans[b])) {
        throw Error("sentence '" + sent.id +
                    "': crossing MWE spans are not expressible");
      }
    }
  }
  for (std::size_t s = 0; s < spans.size(); ++s) {
    if (nested_in[s] >= 0 && nested_in[nested_in[s]] >= 0)
      throw Error("sentence '" + sent.id +
                  "': more than one nesting level is not expressible");
  }

  BioLayout layout;
  layout.tags.assign(sent.tokens.size(), 'O');
  layout.parents.assign(sent.tokens.size(), 0);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const bool nested = nested_in[s] >= 0;
    const auto& idx = spans[s].indices;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k == 0) {
        layout.tags[idx[k]] = nested ? 'b' : 'B';
      } else {
        layout.tags[idx[k]] = nested ? 'i' : 'I';
        layout.parents[idx[k]] = idx[k - 1] + 1;
      }
    }
  }
  for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
    if (layout.tags[t] != 'O') continue;
    for (std::size_t s = 0; s < spans.size(); ++s) {
      if (nested_in[s] >= 0) continue;
      if (spans[s].indices.front() < t && t < spans[s].indices.back()) {
        layout.tags[t] = 'o';
        break;
      }
    }
  }
  return layout;
}

}  // namespace detail

inline void write_dimsum(std::ostream& out,
                         const std::vector<AnnotatedSentence>& sentences) {
  for (const AnnotatedSentence& sent : sentences) {
    sent.validate();
    const detail::BioLayout layout = detail::bio_layout(sent);
    for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
      const Token& tok = sent.tokens[t];
      std::string strength = tok.strength;
      if (strength.empty() && layout.parents[t] > 0) strength = "_";
      out << (t + 1) << '\t' << tok.surface << '\t' << tok.lemma << '\t'
          << tok.pos << '\t' << layout.tags[t] << '\t' << layout.parents[t]
          << '\t' << strength << '\t' << tok.supersense << '\t' << tok.sent_id
          << '\n';
    }
    out << '\n';
  }
}

/// Reads the 4-column indexed-MWE TSV (rank, surface, no-space flag, MWE
/// field).  A fifth column, when present, is taken as the token's POS tag.
/// Every MWE index must be introduced as `k:CAT` before bare references.
inline std::vector<AnnotatedSentence> read_parseme(
    std::istream& in, const std::string& source = "<input>") {
  std::vector<AnnotatedSentence> sentences;

  detail::for_each_block(in, [&](const detail::Block& block) {
    AnnotatedSentence sent;
    sent.id = source + ":" + std::to_string(block.line_numbers.front());
    std::vector<bool> nsp;

    std::map<std::size_t, MweSpan> spans;  // ordered by index k
    for (std::size_t row = 0; row < block.lines.size(); ++row) {
      const std::size_t line_no = block.line_numbers[row];
      const auto cols = detail::split(block.lines[row], '\t');
      if (cols.size() != 4 && cols.size() != 5)
        throw ParseError(source, line_no,
                         "expected 4 or 5 tab-separated columns, got " +
                             std::to_string(cols.size()));
      std::size_t rank = 0;
      if (!detail::parse_size(cols[0], rank) || rank != row + 1)
        throw ParseError(source, line_no, "non-consecutive token rank");
      detail::reject_gap_marker(cols[1], source, line_no);
      if (cols[2] != "nsp" && cols[2] != "_")
        throw ParseError(source, line_no,
                         "no-space flag must be 'nsp' or '_'");

      Token tok;
      tok.surface = std::string(cols[1]);
      if (cols.size() == 5) tok.pos = std::string(cols[4]);
      sent.tokens.push_back(std::move(tok));
      nsp.push_back(cols[2] == "nsp");

      if (cols[3] != "_" && !cols[3].empty()) {
        for (std::string_view part : detail::split(cols[3], ';')) {
          const std::size_t colon = part.find(':');
          std::size_t k = 0;
          if (!detail::parse_size(part.substr(0, colon), k) || k == 0)
            throw ParseError(source, line_no,
                             "malformed MWE code '" + std::string(part) + "'");
          if (colon != std::string_view::npos) {
            auto [it, inserted] = spans.try_emplace(k);
            if (!inserted || !it->second.indices.empty())
              throw ParseError(source, line_no,
                               "MWE index " + std::to_string(k) +
                                   " introduced twice");
            it->second.category = std::string(part.substr(colon + 1));
            it->second.indices.push_back(row);
          } else {
            auto it = spans.find(k);
            if (it == spans.end())
              throw ParseError(source, line_no,
                               "bare MWE index " + std::to_string(k) +
                                   " never introduced");
            it->second.indices.push_back(row);
          }
        }
      }
    }

    for (auto& [k, span] : spans) sent.mwes.push_back(std::move(span));
    std::sort(sent.mwes.begin(), sent.mwes.end());
    sent.boundaries.resize(sent.tokens.empty() ? 0 : sent.tokens.size() - 1);
    for (std::size_t t = 0; t + 1 < sent.tokens.size(); ++t)
      sent.boundaries[t] = nsp[t] ? "" : " ";
    sent.validate();
    sentences.push_back(std::move(sent));
  });
  return sentences;
}

inline void write_parseme(std::ostream& out,
                          const std::vector<AnnotatedSentence>& sentences) {
  for (const AnnotatedSentence& sent : sentences) {
    sent.validate();
    std::vector<const MweSpan*> ordered;
    for (const MweSpan& span : sent.mwes) ordered.push_back(&span);
    std::sort(ordered.begin(), ordered.end(),
              [](const MweSpan* a, const MweSpan* b) {
                return a->indices < b->indices;
              });

    // token -> sorted list of (span number, introduces?)
    std::vector<std::vector<std::pair<std::size_t, bool>>> fields(
        sent.tokens.size());
    for (std::size_t s = 0; s < ordered.size(); ++s) {
      const auto& idx = ordered[s]->indices;
      for (std::size_t k = 0; k < idx.size(); ++k)
        fields[idx[k]].emplace_back(s + 1, k == 0);
    }

    bool any_pos = false;
    for (const Token& tok : sent.tokens) any_pos = any_pos || !tok.pos.empty();

    for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
      const bool no_space =
          t + 1 < sent.tokens.size() && sent.boundaries[t].empty();
      std::string mwe_field;
      for (const auto& [number, introduces] : fields[t]) {
        if (!mwe_field.empty()) mwe_field += ';';
        mwe_field += std::to_string(number);
        if (introduces) {
          const std::string& cat = ordered[number - 1]->category;
          mwe_field += ':';
          mwe_field += cat.empty() ? "MWE" : cat;
        }
      }
      if (mwe_field.empty()) mwe_field = "_";
      out << (t + 1) << '\t' << sent.tokens[t].surface << '\t'
          << (no_space ? "nsp" : "_") << '\t' << mwe_field;
      if (any_pos) out << '\t' << sent.tokens[t].pos;
      out << '\n';
    }
    out << '\n';
  }
}

inline std::vector<AnnotatedSentence> read_corpus(
    std::istream& in, CorpusFormat format,
    const std::string& source = "<input>") {
  return format == CorpusFormat::Dimsum ? read_dimsum(in, source)
                                        : read_parseme(in, source);
}

inline void write_corpus(std::ostream& out, CorpusFormat format,
                         const std::vector<AnnotatedSentence>& sentences) {
  if (format == CorpusFormat::Dimsum)
    write_dimsum(out, sentences);
  else
    write_parseme(out, sentences);
}

/// Attaches POS tags from a companion stream: blank-line-separated blocks
/// aligned with the sentences, one `rank<TAB>pos` line per token (CoNLL-U
/// style rows are accepted, taking column 4; `#` comments and range ranks
/// are skipped).
inline void attach_pos(std::vector<AnnotatedSentence>& sentences,
                       std::istream& in,
                       const std::string& source = "<pos>") {
  std::size_t sentence_index = 0;
  detail::for_each_block(in, [&](const detail::Block& block) {
    if (sentence_index >= sentences.size())
      throw MismatchError("companion POS data has more blocks than corpus");
    AnnotatedSentence& sent = sentences[sentence_index++];
    std::size_t token_index = 0;
    for (std::size_t row = 0; row < block.lines.size(); ++row) {
      const std::string& line = block.lines[row];
      if (!line.empty() && line[0] == '#') continue;
      const auto cols = detail::split(line, '\t');
      if (cols.size() < 2)
        throw ParseError(source, block.line_numbers[row],
                         "expected at least 2 tab-separated columns");
      std::size_t rank = 0;
      if (!detail::parse_size(cols[0], rank)) continue;  // ranges, decimals
      if (token_index >= sent.tokens.size())
        throw ParseError(source, block.line_numbers[row],
                         "more POS rows than tokens in sentence '" + sent.id +
                             "'");
      sent.tokens[token_index++].pos =
          std::string(cols.size() >= 4 ? cols[3] : cols[1]);
    }
    if (token_index != sent.tokens.size())
      throw MismatchError("companion POS block for sentence '" + sent.id +
                          "' covers " + std::to_string(token_index) + " of " +
                          std::to_string(sent.tokens.size()) + " tokens");
  });
  if (sentence_index != sentences.size())
    throw MismatchError("companion POS data has fewer blocks than corpus");
}

enum class SupportKind { Lexicon, Context };

/// Bare MWE forms, one per line, tokens space-separated.  These feed the
/// lexicon only: boundary states cannot be learned from a list of forms.
inline std::vector<std::vector<std::string>> read_support_lexicon(
    std::istream& in, const std::string& source = "<support>") {
  std::vector<std::vector<std::string>> forms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    for (const auto& t : tokens) detail::reject_gap_marker(t, source, line_no);
    forms.push_back(std::move(tokens));
  }
  return forms;
}

/// Usage-exemplified support sentences, one per line, with `[[...]]`
/// marking each MWE occurrence.  Boundaries are inferred; the resulting
/// sentences may feed training counts as well as the lexicon.
inline std::vector<AnnotatedSentence> read_support_context(
    std::istream& in, const std::string& source = "<support>") {
  std::vector<AnnotatedSentence> sentences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto raw = detail::split_ws(line);
    if (raw.empty()) continue;

    AnnotatedSentence sent;
    sent.id = source + ":" + std::to_string(line_no);
    bool open = false;
    std::size_t span_start = 0;
    for (std::string word : raw) {
      bool close_after = false;
      if (word.rfind("[[", 0) == 0) {
        if (open)
          throw ParseError(source, line_no, "nested '[[' markup");
        open = true;
        span_start = sent.tokens.size();
        word.erase(0, 2);
      }
      if (word.size() >= 2 && word.compare(word.size() - 2, 2, "]]") == 0) {
        if (!open)
          throw ParseError(source, line_no, "unbalanced ']]' markup");
        close_after = true;
        word.erase(word.size() - 2);
      }
      if (word.find("[[") != std::string::npos ||
          word.find("]]") != std::string::npos)
        throw ParseError(source, line_no, "nested or stray markup in token");
      if (!word.empty()) {
        detail::reject_gap_marker(word, source, line_no);
        sent.tokens.push_back(Token{word, "", "", "", "", ""});
      }
      if (close_after) {
        if (sent.tokens.size() <= span_start)
          throw ParseError(source, line_no, "empty '[[...]]' markup");
        MweSpan span;
        for (std::size_t i = span_start; i < sent.tokens.size(); ++i)
          span.indices.push_back(i);
        sent.mwes.push_back(std::move(span));
        open = false;
      }
    }
    if (open) throw ParseError(source, line_no, "unbalanced '[[' markup");
    if (sent.tokens.empty()) continue;
    sent.boundaries = infer_spaces(sent.surfaces());
    sent.validate();
    sentences.push_back(std::move(sent));
  }
  return sentences;
}

/// Whitespace-tokenized plain text, one sentence per line; every boundary
/// is a single space.
inline std::vector<AnnotatedSentence> read_raw(
    std::istream& in, const std::string& source = "<input>") {
  std::vector<AnnotatedSentence> sentences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    AnnotatedSentence sent;
    sent.id = source + ":" + std::to_string(line_no);
    for (auto& t : tokens) {
      detail::reject_gap_marker(t, source, line_no);
      sent.tokens.push_back(Token{std::move(t), "", "", "", "", ""});
    }
    sent.boundaries.assign(sent.tokens.size() - 1, " ");
    sentences.push_back(std::move(sent));
  }
  return sentences;
}

}  // namespace boundseg
