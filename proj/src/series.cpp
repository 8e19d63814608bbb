#include "wordmf/series.hpp"

#include <unordered_map>

#include "wordmf/error.hpp"
#include "wordmf/unicode.hpp"

namespace wordmf {

const char* series_kind_name(SeriesKind k) {
  return k == SeriesKind::fts ? "fts" : "lts";
}

WordSeries build_fts(const TokenSequence& seq, const std::string& source_id) {
  if (seq.tokens.size() < 2) throw Error("document too short: need at least 2 tokens");
  std::unordered_map<std::string_view, std::uint32_t> counts;
  counts.reserve(seq.tokens.size());
  for (const auto& t : seq.tokens) ++counts[std::string_view(t)];
  WordSeries out;
  out.kind = SeriesKind::fts;
  out.source_id = source_id;
  out.values.reserve(seq.tokens.size());
  for (const auto& t : seq.tokens) out.values.push_back(counts[std::string_view(t)]);
  return out;
}

WordSeries build_lts(const TokenSequence& seq, const std::string& source_id) {
  if (seq.tokens.size() < 2) throw Error("document too short: need at least 2 tokens");
  WordSeries out;
  out.kind = SeriesKind::lts;
  out.source_id = source_id;
  out.values.reserve(seq.tokens.size());
  for (const auto& t : seq.tokens) {
    out.values.push_back(static_cast<std::uint32_t>(uni::codepoint_count(t)));
  }
  return out;
}

IncrementSeries increment_encode(const WordSeries& series) {
  if (series.values.size() < 2) throw Error("series too short: need at least 2 values");
  IncrementSeries out;
  out.values.reserve(series.values.size() - 1);
  for (std::size_t i = 0; i + 1 < series.values.size(); ++i) {
    std::uint8_t m = 0;
    if (series.values[i] < series.values[i + 1]) {
      m = 2;
    } else if (series.values[i] > series.values[i + 1]) {
      m = 1;
    }
    out.values.push_back(m);
    out.total_mass += m;
  }
  return out;
}

void write_series_csv(std::ostream& os, const WordSeries& series) {
  os << "value\n";
  for (auto v : series.values) os << v << '\n';
}

void write_series_csv(std::ostream& os, const IncrementSeries& series) {
  os << "value\n";
  for (auto v : series.values) os << static_cast<unsigned>(v) << '\n';
}

}  // namespace wordmf
