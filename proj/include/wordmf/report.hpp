#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wordmf/cascade.hpp"
#include "wordmf/mfanalysis.hpp"

namespace wordmf {

// One analyzed (document, series kind, original-or-shuffled) combination.
struct ReportEntry {
  std::string document;
  std::string series;   // "fts" | "lts"
  std::string variant;  // "original" | "shuffled<seed>"
  std::optional<std::uint64_t> seed;
  std::size_t n_tokens = 0;
  std::size_t n_increments = 0;
  std::vector<std::string> warnings;

  // Empty error means the combination succeeded and the fields below hold.
  std::string error;
  SpectrumResult spectrum;
  IdentityDiagnostics identities;
  std::size_t zero_boxes_total = 0;
  std::size_t zero_boxes_max_per_s = 0;

  std::optional<CascadeFit> cascade;
  std::string cascade_null_reason;

  std::string spectrum_csv;  // file name relative to the output directory
};

struct Report {
  std::string tool_version;
  std::string generated_at;  // RFC 3339 UTC; the only non-deterministic field
  AnalysisGrid grid;
  TokenizerConfig tokenizer;
  std::vector<std::string> inputs;
  std::vector<std::uint64_t> shuffle_seeds;
  // Failures before any series could be built (load/tokenize stage):
  // (input, error) pairs. Per-combination failures live in the entries.
  std::vector<std::pair<std::string, std::string>> input_errors;
  std::vector<ReportEntry> entries;
};

// Deterministic except for the generated_at value; field order is fixed.
std::string report_to_json(const Report& report);

// Max-absolute and RMS distances between two spectra on the same q grid:
// D(q) pointwise, f(alpha) after resampling both curves onto the shared
// alpha interval, plus distances between the derived endpoint scalars.
struct CompareRecord {
  double d_max = 0.0;
  double d_rms = 0.0;
  double f_max = 0.0;
  double f_rms = 0.0;
  std::size_t f_samples = 0;
  std::optional<double> delta_tsallis_q;  // absent when either side is monofractal
  double delta_alpha_minus = 0.0;
  double delta_alpha_plus = 0.0;
};

CompareRecord compare_spectra(const SpectrumResult& a, const SpectrumResult& b);

std::string compare_to_json(const CompareRecord& rec, const std::string& label_a,
                            const std::string& label_b);

// Single-column CSV (header "value") for cascade mass vectors.
void write_mass_csv(std::ostream& os, std::span<const double> mass);

}  // namespace wordmf
