#pragma once

// Model persistence: canonical TSV dumps of the count tables, lexicon
// and anomalous table, plus a directory bundle tying them together.
//
// Writers emit entries in byte-lexicographic order so that save/load
// round-trips are bit-exact; readers accept any order.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "boundseg/corpus_io.hpp"
#include "boundseg/core.hpp"
#include "boundseg/errors.hpp"
#include "boundseg/lfd.hpp"
#include "boundseg/segmenter.hpp"

namespace boundseg {

inline constexpr std::string_view kStatsHeader = "#boundary-seg-model v1";
inline constexpr std::string_view kLexiconHeader = "#boundary-seg-lexicon v1";

namespace detail {

inline void check_tsv_safe(std::string_view field, const char* what) {
  if (field.find_first_of("\t\n\r") != std::string_view::npos)
    throw Error(std::string(what) +
                " contains a tab or line break and cannot be serialized");
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  for (int precision = 1; precision <= 17; ++precision) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    if (std::stod(os.str()) == v) return os.str();
  }
  return std::to_string(v);  // unreachable; 17 digits always round-trip
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  out = v;
  return true;
}

inline bool parse_double(std::string_view s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(std::string(s), &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

inline void expect_header(std::istream& in, std::string_view header,
                          const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw ParseError(source, 1,
                     "missing header line '" + std::string(header) + "'");
}

}  // namespace detail

inline void write_stats(std::ostream& out, const BindingStats& stats) {
  out << kStatsHeader << '\n';
  const std::string_view channel = channel_name(stats.channel());
  std::vector<const BindingStats::Map::value_type*> rows;
  rows.reserve(stats.entry_count());
  for (const auto& entry : stats.entries()) rows.push_back(&entry);
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return std::tie(a->first.left, a->first.boundary, a->first.right) <
           std::tie(b->first.left, b->first.boundary, b->first.right);
  });
  for (const auto* row : rows) {
    detail::check_tsv_safe(row->first.left, "symbol");
    detail::check_tsv_safe(row->first.boundary, "boundary surface");
    detail::check_tsv_safe(row->first.right, "symbol");
    out << channel << '\t' << row->first.left << '\t' << row->first.boundary
        << '\t' << row->first.right << '\t' << row->second.bound << '\t'
        << row->second.broken << '\n';
  }
}

inline BindingStats read_stats(std::istream& in, Channel expected,
                               const std::string& source = "<stats>") {
  detail::expect_header(in, kStatsHeader, source);
  BindingStats stats(expected);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 6)
      throw ParseError(source, line_no,
                       "expected 6 tab-separated columns, got " +
                           std::to_string(cols.size()));
    if (cols[0] != channel_name(expected))
      throw ParseError(source, line_no,
                       "channel '" + std::string(cols[0]) +
                           "' does not match expected '" +
                           std::string(channel_name(expected)) + "'");
    std::uint64_t n_bound = 0, n_broken = 0;
    if (!detail::parse_u64(cols[4], n_bound) ||
        !detail::parse_u64(cols[5], n_broken))
      throw ParseError(source, line_no, "malformed count");
    // n = 0 still creates the entry, preserving explicit zero rows
    stats.add(cols[1], cols[2], cols[3], BoundaryState::Bound, n_bound);
    stats.add(cols[1], cols[2], cols[3], BoundaryState::Broken, n_broken);
  }
  return stats;
}

inline void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
  out << kLexiconHeader << '\n';
  std::vector<std::pair<std::string_view, Provenance>> rows;
  rows.reserve(lexicon.size());
  for (const auto& [form, provenance] : lexicon.forms())
    rows.emplace_back(form, provenance);
  std::sort(rows.begin(), rows.end());
  for (const auto& [form, provenance] : rows) {
    detail::check_tsv_safe(form, "lexicon form");
    out << provenance_name(provenance) << '\t' << form << '\n';
  }
}

inline Lexicon read_lexicon(std::istream& in,
                            const std::string& source = "<lexicon>") {
  detail::expect_header(in, kLexiconHeader, source);
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2)
      throw ParseError(source, line_no,
                       "expected 2 tab-separated columns, got " +
                           std::to_string(cols.size()));
    Provenance provenance;
    if (cols[0] == "GOLD")
      provenance = Provenance::Gold;
    else if (cols[0] == "SUPPORT")
      provenance = Provenance::Support;
    else
      throw ParseError(source, line_no,
                       "unknown provenance '" + std::string(cols[0]) + "'");
    if (cols[1].empty())
      throw ParseError(source, line_no, "empty lexicon form");
    lexicon.add_joined(std::string(cols[1]), provenance);
  }
  return lexicon;
}

inline void write_anomalous(std::ostream& out,
                            const std::map<std::string, AnomalousCount>& table) {
  for (const auto& [token, counts] : table) {
    detail::check_tsv_safe(token, "token");
    out << token << '\t' << counts.n_anomalous << '\t' << counts.n_total
        << '\n';
  }
}

inline std::map<std::string, AnomalousCount> read_anomalous(
    std::istream& in, const std::string& source = "<anomalous>") {
  std::map<std::string, AnomalousCount> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 3)
      throw ParseError(source, line_no,
                       "expected 3 tab-separated columns, got " +
                           std::to_string(cols.size()));
    AnomalousCount counts;
    if (!detail::parse_u64(cols[1], counts.n_anomalous) ||
        !detail::parse_u64(cols[2], counts.n_total))
      throw ParseError(source, line_no, "malformed count");
    if (counts.n_anomalous > counts.n_total)
      throw ParseError(source, line_no,
                       "anomalous count exceeds total count");
    if (!table.emplace(std::string(cols[0]), counts).second)
      throw ParseError(source, line_no,
                       "duplicate token '" + std::string(cols[0]) + "'");
  }
  return table;
}

namespace bundle {

inline constexpr std::string_view kSurfaceFile = "surface.stats";
inline constexpr std::string_view kPosFile = "pos.stats";
inline constexpr std::string_view kLexiconFile = "lexicon.tsv";
inline constexpr std::string_view kAnomalousFile = "anomalous.tsv";
inline constexpr std::string_view kMetaFile = "meta.tsv";

}  // namespace bundle

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace detail

/// Writes the model as a directory of canonical TSV files.
inline void save_bundle(const std::filesystem::path& dir,
                        const SegmenterModel& model) {
  model.validate();
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_out(dir / bundle::kSurfaceFile);
    write_stats(out, model.surface_stats);
  }
  if (model.pos_stats) {
    auto out = detail::open_out(dir / bundle::kPosFile);
    write_stats(out, *model.pos_stats);
  } else {
    std::filesystem::remove(dir / bundle::kPosFile);
  }
  {
    auto out = detail::open_out(dir / bundle::kLexiconFile);
    write_lexicon(out, model.lexicon);
  }
  {
    auto out = detail::open_out(dir / bundle::kAnomalousFile);
    write_anomalous(out, model.anomalous);
  }
  {
    auto out = detail::open_out(dir / bundle::kMetaFile);
    out << "gap_window\t" << model.gap_window << '\n';
    out << "lowercase\t" << (model.lowercase ? 1 : 0) << '\n';
    if (model.q_pos)
      out << "q_pos\t" << detail::format_double(model.q_pos->value()) << '\n';
    out << "q_tok\t" << detail::format_double(model.q_tok.value()) << '\n';
  }
}

inline SegmenterModel load_bundle(const std::filesystem::path& dir) {
  SegmenterModel model;
  {
    auto in = detail::open_in(dir / bundle::kSurfaceFile);
    model.surface_stats =
        read_stats(in, Channel::Surface, (dir / bundle::kSurfaceFile).string());
  }
  {
    auto in = detail::open_in(dir / bundle::kLexiconFile);
    model.lexicon = read_lexicon(in, (dir / bundle::kLexiconFile).string());
  }
  {
    auto in = detail::open_in(dir / bundle::kAnomalousFile);
    model.anomalous = read_anomalous(in, (dir / bundle::kAnomalousFile).string());
  }

  const std::string meta_path = (dir / bundle::kMetaFile).string();
  std::map<std::string, std::string> meta;
  {
    auto in = detail::open_in(dir / bundle::kMetaFile);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto cols = detail::split(line, '\t');
      if (cols.size() != 2)
        throw ParseError(meta_path, line_no,
                         "expected key<TAB>value, got " +
                             std::to_string(cols.size()) + " columns");
      if (!meta.emplace(std::string(cols[0]), std::string(cols[1])).second)
        throw ParseError(meta_path, line_no,
                         "duplicate key '" + std::string(cols[0]) + "'");
    }
  }
  const auto require = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end())
      throw Error("bundle metadata is missing key '" + std::string(key) +
                  "' in " + meta_path);
    return it->second;
  };
  double q_tok = 0.0;
  if (!detail::parse_double(require("q_tok"), q_tok))
    throw Error("bundle metadata has a malformed q_tok in " + meta_path);
  model.q_tok = Threshold(q_tok);
  std::uint64_t gap_window = 0;
  if (!detail::parse_u64(require("gap_window"), gap_window) || gap_window < 1)
    throw Error("bundle metadata has a malformed gap_window in " + meta_path);
  model.gap_window = static_cast<std::size_t>(gap_window);
  const std::string& lower = require("lowercase");
  if (lower != "0" && lower != "1")
    throw Error("bundle metadata has a malformed lowercase flag in " +
                meta_path);
  model.lowercase = lower == "1";

  const auto q_pos_it = meta.find("q_pos");
  const bool has_pos_file =
      std::filesystem::exists(dir / bundle::kPosFile);
  if ((q_pos_it != meta.end()) != has_pos_file)
    throw Error("bundle must carry q_pos metadata exactly when " +
                std::string(bundle::kPosFile) + " is present: " +
                dir.string());
  if (q_pos_it != meta.end()) {
    double q_pos = 0.0;
    if (!detail::parse_double(q_pos_it->second, q_pos))
      throw Error("bundle metadata has a malformed q_pos in " + meta_path);
    model.q_pos = Threshold(q_pos);
    auto in = detail::open_in(dir / bundle::kPosFile);
    model.pos_stats =
        read_stats(in, Channel::Pos, (dir / bundle::kPosFile).string());
  }
  model.validate();
  return model;
}

}  // namespace boundseg
