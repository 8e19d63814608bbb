#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wordmf/report.hpp"

namespace wordmf {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::vector<std::string> inputs;
  bool fetch_allowed = false;
  bool run_fts = true;
  bool run_lts = true;
  std::vector<std::uint64_t> shuffle_seeds;
  TokenizerConfig tokenizer;
  AnalysisGrid grid;
  std::filesystem::path out_dir;
  std::filesystem::path cache_dir;
  unsigned threads = 1;
};

std::filesystem::path default_cache_dir();

// Spectrum plus the diagnostics recorded alongside it. The grid is clamped
// to the series length before analysis; warnings note any clamping.
struct AnalyzedSpectrum {
  SpectrumResult spectrum;
  IdentityDiagnostics identities;
  std::size_t zero_boxes_total = 0;
  std::size_t zero_boxes_max_per_s = 0;
  std::size_t s_max_used = 0;
  std::vector<std::string> warnings;
};

AnalyzedSpectrum analyze_mass(std::span<const double> mass, const AnalysisGrid& grid,
                              unsigned threads);
AnalyzedSpectrum analyze_increments(const IncrementSeries& m, const AnalysisGrid& grid,
                                    unsigned threads);

struct RunOutcome {
  Report report;
  std::filesystem::path report_path;
  bool any_error = false;
};

// The end-to-end pipeline: load, strip, tokenize, build series (original
// plus one shuffle per seed), analyze, fit the binomial cascade, and write
// one spectrum CSV per combination plus a consolidated report.json.
RunOutcome run(const RunConfig& config);

}  // namespace wordmf
