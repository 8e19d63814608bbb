#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wordmf/cascade.hpp"
#include "wordmf/pipeline.hpp"

namespace {

struct TokenizerFlags {
  bool no_lowercase = false;
  bool keep_punctuation = false;
  bool drop_apostrophes = false;
  bool keep_chapter_heads = false;
  bool keep_boilerplate = false;
  std::string chapter_pattern;
};

void add_tokenizer_flags(CLI::App* cmd, TokenizerFlags& f) {
  cmd->add_flag("--no-lowercase", f.no_lowercase, "Keep original letter case");
  cmd->add_flag("--keep-punctuation", f.keep_punctuation,
                "Do not trim non-letter characters from token edges");
  cmd->add_flag("--drop-apostrophes", f.drop_apostrophes, "Remove apostrophes inside tokens");
  cmd->add_flag("--keep-chapter-heads", f.keep_chapter_heads,
                "Do not remove chapter heading lines");
  cmd->add_flag("--keep-boilerplate", f.keep_boilerplate,
                "Do not cut the text at project start/end marker lines");
  cmd->add_option("--chapter-pattern", f.chapter_pattern,
                  "Case-insensitive regex selecting chapter heading lines; a matched line "
                  "is removed together with the line that follows it");
}

wordmf::TokenizerConfig make_tokenizer(const TokenizerFlags& f) {
  wordmf::TokenizerConfig cfg = wordmf::default_tokenizer_config();
  if (f.no_lowercase) cfg.lowercase = false;
  if (f.keep_punctuation) cfg.strip_punctuation = false;
  if (f.drop_apostrophes) cfg.keep_internal_apostrophes = false;
  if (f.keep_chapter_heads) cfg.strip_chapter_heads = false;
  if (f.keep_boilerplate) cfg.strip_gutenberg_boilerplate = false;
  if (!f.chapter_pattern.empty()) cfg.chapter_pattern = f.chapter_pattern;
  return cfg;
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw wordmf::Error("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifractal analysis of word-level text series"};
  app.set_version_flag("--version", wordmf::kToolVersion);
  app.require_subcommand(1);

  auto* analyze =
      app.add_subcommand("analyze", "Run the full pipeline: spectra CSVs plus a JSON report");
  std::vector<std::string> inputs;
  bool fetch = false;
  std::string series_sel = "both";
  std::vector<std::uint64_t> seeds;
  std::size_t s_min = 2;
  std::size_t s_max = 200;
  double q_min = -25.0;
  double q_max = 25.0;
  double q_step = 0.25;
  double eps_q0 = 0.05;
  double eps_q1 = 0.05;
  std::string out_dir = "wordmf-out";
  std::string cache_dir;
  unsigned threads = 1;
  TokenizerFlags an_tf;
  analyze->add_option("--input", inputs, "Text file path or http(s) URL (repeatable)")
      ->required();
  analyze->add_flag("--fetch", fetch, "Allow fetching URLs that are not cached yet");
  analyze->add_option("--series", series_sel, "Which series to analyze: fts|lts|both")
      ->check(CLI::IsMember({"fts", "lts", "both"}));
  analyze->add_option("--shuffle-seed", seeds,
                      "Also analyze a word shuffle with this seed (repeatable)");
  analyze->add_option("--s-min", s_min, "Smallest box size (>= 2)");
  analyze->add_option("--s-max", s_max, "Largest box size (clamped to N-1)");
  analyze->add_option("--q-min", q_min, "Lowest moment order");
  analyze->add_option("--q-max", q_max, "Highest moment order");
  analyze->add_option("--q-step", q_step, "Moment grid step");
  analyze->add_option("--eps-q0", eps_q0, "Guard band half-width around q=0 for h(q)");
  analyze->add_option("--eps-q1", eps_q1, "Guard band half-width around q=1 for D(q)");
  analyze->add_option("--out", out_dir, "Output directory");
  analyze->add_option("--cache-dir", cache_dir, "Cache directory for fetched documents");
  analyze->add_option("--threads", threads, "Worker threads for the partition table");
  add_tokenizer_flags(analyze, an_tf);

  auto* shuffle = app.add_subcommand("shuffle", "Write a seeded word shuffle of a document");
  std::string sh_input;
  std::uint64_t sh_seed = 0;
  std::string sh_out;
  bool sh_fetch = false;
  std::string sh_cache;
  TokenizerFlags sh_tf;
  shuffle->add_option("--input", sh_input, "Text file path or http(s) URL")->required();
  shuffle->add_option("--seed", sh_seed, "Shuffle seed")->required();
  shuffle->add_option("--out", sh_out, "Output file (default: stdout)");
  shuffle->add_flag("--fetch", sh_fetch, "Allow fetching URLs that are not cached yet");
  shuffle->add_option("--cache-dir", sh_cache, "Cache directory for fetched documents");
  add_tokenizer_flags(shuffle, sh_tf);

  auto* synth = app.add_subcommand("synth", "Generate a deterministic binomial cascade measure");
  double sy_w1 = 0.7;
  std::size_t sy_depth = 14;
  std::string sy_out;
  synth->add_option("--w1", sy_w1, "Left mass fraction, in (0,1)")->required();
  synth->add_option("--depth", sy_depth, "Number of splitting levels, 1..24")->required();
  synth->add_option("--out", sy_out, "Output CSV (default: stdout)");

  auto* invert = app.add_subcommand(
      "invert", "Recover binomial cascade parameters from spectrum endpoints");
  double iv_am = 0.0;
  double iv_ap = 0.0;
  std::string iv_in;
  std::string iv_out;
  auto* iv_am_opt = invert->add_option("--alpha-minus", iv_am, "Left f=0 intercept");
  auto* iv_ap_opt = invert->add_option("--alpha-plus", iv_ap, "Right f=0 intercept");
  iv_am_opt->needs(iv_ap_opt);
  iv_ap_opt->needs(iv_am_opt);
  invert->add_option("--in", iv_in,
                     "CSV of pairs to invert (header: alpha_minus,alpha_plus)");
  invert->add_option("--out", iv_out, "Output CSV (default: stdout)");

  auto* compare = app.add_subcommand("compare", "Distances between two spectrum CSVs");
  std::string cp_a;
  std::string cp_b;
  std::string cp_out;
  compare->add_option("--a", cp_a, "First spectrum CSV")->required();
  compare->add_option("--b", cp_b, "Second spectrum CSV")->required();
  compare->add_option("--out", cp_out, "Output JSON (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      wordmf::RunConfig cfg;
      cfg.inputs = inputs;
      cfg.fetch_allowed = fetch;
      cfg.run_fts = series_sel != "lts";
      cfg.run_lts = series_sel != "fts";
      cfg.shuffle_seeds = seeds;
      cfg.tokenizer = make_tokenizer(an_tf);
      cfg.grid = wordmf::AnalysisGrid::make(s_min, s_max, q_min, q_max, q_step);
      cfg.grid.eps_q0 = eps_q0;
      cfg.grid.eps_q1 = eps_q1;
      cfg.out_dir = out_dir;
      cfg.cache_dir = cache_dir.empty() ? wordmf::default_cache_dir()
                                        : std::filesystem::path(cache_dir);
      cfg.threads = threads;

      const wordmf::RunOutcome outcome = wordmf::run(cfg);
      for (const auto& [input, error] : outcome.report.input_errors) {
        std::cerr << "fail  " << input << ": " << error << "\n";
      }
      for (const auto& e : outcome.report.entries) {
        const std::string label = e.document + "/" + e.series + "/" + e.variant;
        if (!e.error.empty()) {
          std::cerr << "fail  " << label << ": " << e.error << "\n";
          continue;
        }
        char line[256];
        std::snprintf(line, sizeof line,
                      "ok    %-40s C1=%.4f alpha-=%.4f alpha+=%.4f D0=%.4f",
                      label.c_str(), e.spectrum.C1, e.spectrum.alpha_minus,
                      e.spectrum.alpha_plus, e.spectrum.d_at(0.0));
        std::cout << line << "\n";
      }
      std::cout << "report: " << outcome.report_path.string() << "\n";
      return outcome.any_error ? 1 : 0;
    }

    if (*shuffle) {
      const wordmf::TokenizerConfig cfg = make_tokenizer(sh_tf);
      const std::filesystem::path cache =
          sh_cache.empty() ? wordmf::default_cache_dir() : std::filesystem::path(sh_cache);
      const wordmf::RawDocument doc = wordmf::load_document(sh_input, sh_fetch, cache);
      const wordmf::StripOutcome stripped = wordmf::strip_boilerplate(doc, cfg);
      const wordmf::TokenSequence tokens = wordmf::tokenize(stripped.doc, cfg);
      const wordmf::TokenSequence shuffled = wordmf::shuffle_tokens(tokens, sh_seed);
      std::ofstream file;
      std::ostream& os = open_or_stdout(sh_out, file);
      for (std::size_t i = 0; i < shuffled.tokens.size(); ++i) {
        if (i) os << ' ';
        os << shuffled.tokens[i];
      }
      os << '\n';
      return 0;
    }

    if (*synth) {
      const wordmf::CascadeParams params = wordmf::CascadeParams::binomial(sy_w1, 0.5);
      const std::vector<double> mass = wordmf::generate_cascade_measure(params, sy_depth);
      std::ofstream file;
      std::ostream& os = open_or_stdout(sy_out, file);
      wordmf::write_mass_csv(os, mass);
      return 0;
    }

    if (*invert) {
      std::vector<std::pair<double, double>> pairs;
      if (iv_am_opt->count() > 0) pairs.emplace_back(iv_am, iv_ap);
      if (!iv_in.empty()) {
        std::ifstream in(iv_in, std::ios::binary);
        if (!in) throw wordmf::Error("missing file: " + iv_in);
        std::string line;
        if (!std::getline(in, line)) throw wordmf::Error("empty input CSV: " + iv_in);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != "alpha_minus,alpha_plus") {
          throw wordmf::Error("unexpected header in " + iv_in + ": " + line);
        }
        std::size_t row = 1;
        while (std::getline(in, line)) {
          ++row;
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (line.empty()) continue;
          double am = 0.0;
          double ap = 0.0;
          if (std::sscanf(line.c_str(), "%lf,%lf", &am, &ap) != 2) {
            throw wordmf::Error("bad pair in " + iv_in + " row " + std::to_string(row));
          }
          pairs.emplace_back(am, ap);
        }
      }
      if (pairs.empty()) {
        throw wordmf::Error("nothing to invert: give --alpha-minus/--alpha-plus or --in");
      }
      std::ofstream file;
      std::ostream& os = open_or_stdout(iv_out, file);
      os << "alpha_minus,alpha_plus,w1,w2,r1,r2,residual,tsallis_q\n";
      char line[512];
      for (const auto& [am, ap] : pairs) {
        const wordmf::CascadeFit fit = wordmf::invert_binomial(am, ap);
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      am, ap, fit.params.weights[0], fit.params.weights[1],
                      fit.params.ratios[0], fit.params.ratios[1], fit.residual,
                      fit.tsallis_q);
        os << line;
      }
      return 0;
    }

    if (*compare) {
      std::ifstream fa(cp_a, std::ios::binary);
      if (!fa) throw wordmf::Error("missing file: " + cp_a);
      std::ifstream fb(cp_b, std::ios::binary);
      if (!fb) throw wordmf::Error("missing file: " + cp_b);
      const wordmf::SpectrumResult a = wordmf::read_spectrum_csv(fa);
      const wordmf::SpectrumResult b = wordmf::read_spectrum_csv(fb);
      const wordmf::CompareRecord rec = wordmf::compare_spectra(a, b);
      std::ofstream file;
      std::ostream& os = open_or_stdout(cp_out, file);
      os << wordmf::compare_to_json(rec, cp_a, cp_b);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
