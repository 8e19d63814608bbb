#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "wordmf/corpus.hpp"

namespace wordmf {

enum class SeriesKind { fts, lts };

const char* series_kind_name(SeriesKind k);

// One value per token position t = 1..N: the word's whole-document frequency
// (fts) or its letter count in code points (lts).
struct WordSeries {
  SeriesKind kind;
  std::vector<std::uint32_t> values;
  std::string source_id;
};

// Ternary up/down/flat encoding of consecutive differences: 2 when the next
// value is larger, 1 when smaller, 0 when equal. Length is N-1.
struct IncrementSeries {
  std::vector<std::uint8_t> values;
  std::uint64_t total_mass = 0;
};

WordSeries build_fts(const TokenSequence& seq, const std::string& source_id);
WordSeries build_lts(const TokenSequence& seq, const std::string& source_id);
IncrementSeries increment_encode(const WordSeries& series);

// Single-column CSV, header "value".
void write_series_csv(std::ostream& os, const WordSeries& series);
void write_series_csv(std::ostream& os, const IncrementSeries& series);

}  // namespace wordmf
