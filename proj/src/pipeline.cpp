#include "wordmf/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>

#include "wordmf/cascade.hpp"

namespace wordmf {

std::filesystem::path default_cache_dir() {
  if (const char* p = std::getenv("WORDMF_CACHE_DIR"); p && *p) return p;
  if (const char* p = std::getenv("XDG_CACHE_HOME"); p && *p) {
    return std::filesystem::path(p) / "wordmf";
  }
  if (const char* p = std::getenv("HOME"); p && *p) {
    return std::filesystem::path(p) / ".cache" / "wordmf";
  }
  return std::filesystem::path(".wordmf-cache");
}

namespace {

std::string timestamp_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sanitize_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty()) out = "doc";
  return out;
}

void attach_cascade(ReportEntry& e) {
  try {
    e.cascade = invert_binomial(e.spectrum.alpha_minus, e.spectrum.alpha_plus);
    e.cascade_null_reason.clear();
  } catch (const Error& err) {
    e.cascade.reset();
    e.cascade_null_reason = err.what();
  }
}

}  // namespace

AnalyzedSpectrum analyze_mass(std::span<const double> mass, const AnalysisGrid& grid,
                              unsigned threads) {
  AnalyzedSpectrum out;
  const AnalysisGrid used = grid.clamped_to(mass.size(), &out.warnings);
  const PartitionTable table = partition_function(mass, used, threads);
  const TauEstimate est = estimate_tau(table);
  out.spectrum = derive_spectrum(est, used.eps_q0, used.eps_q1);
  out.identities = check_identities(table, out.spectrum);
  for (std::size_t z : table.zero_box_counts) {
    out.zero_boxes_total += z;
    out.zero_boxes_max_per_s = std::max(out.zero_boxes_max_per_s, z);
  }
  out.s_max_used = used.s_values.back();
  return out;
}

AnalyzedSpectrum analyze_increments(const IncrementSeries& m, const AnalysisGrid& grid,
                                    unsigned threads) {
  std::vector<double> mass(m.values.begin(), m.values.end());
  return analyze_mass(std::span<const double>(mass), grid, threads);
}

RunOutcome run(const RunConfig& config) {
  if (config.inputs.empty()) throw Error("no inputs given");
  if (!config.run_fts && !config.run_lts) throw Error("no series kinds selected");
  if (config.out_dir.empty()) throw Error("no output directory given");
  config.grid.validate(config.grid.s_values.empty() ? 0 : config.grid.s_values.back());

  std::filesystem::create_directories(config.out_dir);

  RunOutcome outcome;
  Report& rep = outcome.report;
  rep.tool_version = kToolVersion;
  rep.generated_at = timestamp_utc();
  rep.grid = config.grid;
  rep.tokenizer = config.tokenizer;
  rep.inputs = config.inputs;
  rep.shuffle_seeds = config.shuffle_seeds;
  const unsigned threads = config.threads == 0 ? 1 : config.threads;

  std::set<std::string> used_names;
  auto unique_name = [&](const std::string& base) {
    std::string name = base;
    for (int k = 2; used_names.count(name); ++k) name = base + "_" + std::to_string(k);
    used_names.insert(name);
    return name;
  };

  std::vector<SeriesKind> kinds;
  if (config.run_fts) kinds.push_back(SeriesKind::fts);
  if (config.run_lts) kinds.push_back(SeriesKind::lts);

  for (const auto& input : config.inputs) {
    RawDocument doc;
    StripOutcome stripped;
    TokenSequence tokens;
    try {
      doc = load_document(input, config.fetch_allowed, config.cache_dir);
      stripped = strip_boilerplate(doc, config.tokenizer);
      tokens = tokenize(stripped.doc, config.tokenizer);
    } catch (const Error& e) {
      rep.input_errors.emplace_back(input, e.what());
      outcome.any_error = true;
      continue;
    }

    std::vector<std::string> doc_warnings;
    if (config.tokenizer.strip_gutenberg_boilerplate && !stripped.gutenberg_markers_found) {
      doc_warnings.push_back("project boilerplate markers not found; text used as is");
    }

    // One permutation per seed, shared by both series kinds.
    std::vector<TokenSequence> shuffled;
    shuffled.reserve(config.shuffle_seeds.size());
    for (std::uint64_t seed : config.shuffle_seeds) {
      shuffled.push_back(shuffle_tokens(tokens, seed));
    }

    const std::string doc_name = unique_name(sanitize_name(doc.source_id));

    for (SeriesKind kind : kinds) {
      const std::size_t n_variants = 1 + config.shuffle_seeds.size();
      for (std::size_t v = 0; v < n_variants; ++v) {
        ReportEntry entry;
        entry.document = doc_name;
        entry.series = series_kind_name(kind);
        if (v == 0) {
          entry.variant = "original";
        } else {
          entry.seed = config.shuffle_seeds[v - 1];
          entry.variant = "shuffled" + std::to_string(*entry.seed);
        }
        entry.warnings = doc_warnings;
        try {
          const TokenSequence& seq = v == 0 ? tokens : shuffled[v - 1];
          const WordSeries series = kind == SeriesKind::fts
                                        ? build_fts(seq, doc.source_id)
                                        : build_lts(seq, doc.source_id);
          entry.n_tokens = series.values.size();
          entry.n_increments = series.values.size() - 1;
          const IncrementSeries inc = increment_encode(series);
          AnalyzedSpectrum an = analyze_increments(inc, config.grid, threads);
          entry.spectrum = std::move(an.spectrum);
          entry.identities = an.identities;
          entry.zero_boxes_total = an.zero_boxes_total;
          entry.zero_boxes_max_per_s = an.zero_boxes_max_per_s;
          for (auto& w : an.warnings) entry.warnings.push_back(std::move(w));
          attach_cascade(entry);

          entry.spectrum_csv = entry.document + "_" + entry.series + "_" + entry.variant + ".csv";
          std::ofstream csv(config.out_dir / entry.spectrum_csv,
                            std::ios::binary | std::ios::trunc);
          if (!csv) throw Error("cannot write " + entry.spectrum_csv);
          write_spectrum_csv(csv, entry.spectrum);
          if (!csv.good()) throw Error("write failure on " + entry.spectrum_csv);
        } catch (const Error& e) {
          entry.error = std::string(e.what()) + " [" + doc_name + "/" + entry.series + "/" +
                        entry.variant + "]";
          outcome.any_error = true;
        }
        rep.entries.push_back(std::move(entry));
      }
    }
  }

  outcome.report_path = config.out_dir / "report.json";
  std::ofstream js(outcome.report_path, std::ios::binary | std::ios::trunc);
  if (!js) throw Error("cannot write " + outcome.report_path.string());
  js << report_to_json(rep);
  if (!js.good()) throw Error("write failure on " + outcome.report_path.string());
  return outcome;
}

}  // namespace wordmf
