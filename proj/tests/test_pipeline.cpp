#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "wordmf/cascade.hpp"
#include "wordmf/error.hpp"
#include "wordmf/pipeline.hpp"

using namespace wordmf;
namespace fs = std::filesystem;

namespace {

// 150 words over a small alphabet with varied lengths: enough structure for
// both series kinds, short enough to force box-size clamping.
std::string sample_text() {
  std::string text;
  for (int i = 0; i < 150; ++i) {
    const int len = 1 + (i * i + 3) % 8;
    text.append(std::string(static_cast<std::size_t>(len),
                            static_cast<char>('a' + i % 6)));
    text.push_back(i % 17 == 16 ? '\n' : ' ');
  }
  return text;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

bool any_contains(const std::vector<std::string>& haystack, const std::string& needle) {
  for (const auto& h : haystack) {
    if (h.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string without_generated_at(std::string text) {
  const auto pos = text.find("\"generated_at\"");
  if (pos == std::string::npos) return text;
  const auto eol = text.find('\n', pos);
  text.erase(pos, eol - pos + 1);
  return text;
}

}  // namespace

TEST_CASE("pipeline produces csvs and a report for a small document") {
  const auto tmp = make_temp_dir("runbasic");
  write_file(tmp / "sample_doc.txt", sample_text());

  RunConfig config;
  config.inputs = {(tmp / "sample_doc.txt").string()};
  config.shuffle_seeds = {5};
  config.tokenizer = default_tokenizer_config();
  config.grid = AnalysisGrid::defaults();
  config.out_dir = tmp / "out";
  config.threads = 2;

  const auto outcome = run(config);
  CHECK_FALSE(outcome.any_error);
  CHECK(outcome.report.input_errors.empty());
  REQUIRE(outcome.report.entries.size() == 4);

  const std::vector<std::pair<std::string, std::string>> expected = {
      {"fts", "original"}, {"fts", "shuffled5"}, {"lts", "original"}, {"lts", "shuffled5"}};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& e = outcome.report.entries[i];
    CHECK(e.document == "sample_doc");
    CHECK(e.series == expected[i].first);
    CHECK(e.variant == expected[i].second);
    CHECK(e.error.empty());
    CHECK(e.n_tokens == 150);
    CHECK(e.n_increments == 149);
    CHECK(any_contains(e.warnings, "clamped"));
    CHECK(any_contains(e.warnings, "boilerplate markers not found"));
    CHECK(std::isfinite(e.spectrum.C1));

    const auto csv_path = config.out_dir / e.spectrum_csv;
    REQUIRE(fs::exists(csv_path));
    const auto csv = read_file(csv_path);
    CHECK(line_count(csv) == config.grid.q_values.size() + 1);
  }
  CHECK(outcome.report.entries[1].seed == 5);
  CHECK_FALSE(outcome.report.entries[0].seed.has_value());

  REQUIRE(fs::exists(outcome.report_path));
  const auto j = nlohmann::json::parse(read_file(outcome.report_path));
  CHECK(j["tool"] == "wordmf");
  CHECK(j["entries"].size() == 4);
  CHECK(j["entries"][0]["document"] == "sample_doc");
  fs::remove_all(tmp);
}

TEST_CASE("pipeline output is identical for any thread count") {
  const auto tmp = make_temp_dir("runthreads");
  write_file(tmp / "doc.txt", sample_text());

  RunConfig config;
  config.inputs = {(tmp / "doc.txt").string()};
  config.shuffle_seeds = {11};
  config.tokenizer = default_tokenizer_config();
  config.grid = AnalysisGrid::defaults();

  config.out_dir = tmp / "out1";
  config.threads = 1;
  const auto one = run(config);
  config.out_dir = tmp / "out3";
  config.threads = 3;
  const auto three = run(config);

  REQUIRE(one.report.entries.size() == three.report.entries.size());
  for (std::size_t i = 0; i < one.report.entries.size(); ++i) {
    const auto& name = one.report.entries[i].spectrum_csv;
    CHECK(name == three.report.entries[i].spectrum_csv);
    CHECK(read_file(tmp / "out1" / name) == read_file(tmp / "out3" / name));
  }
  CHECK(without_generated_at(read_file(one.report_path)) ==
        without_generated_at(read_file(three.report_path)));
  fs::remove_all(tmp);
}

TEST_CASE("missing inputs are recorded without aborting the run") {
  const auto tmp = make_temp_dir("runmissing");
  write_file(tmp / "good.txt", sample_text());

  RunConfig config;
  config.inputs = {(tmp / "good.txt").string(), (tmp / "absent.txt").string()};
  config.tokenizer = default_tokenizer_config();
  config.grid = AnalysisGrid::defaults();
  config.out_dir = tmp / "out";

  const auto outcome = run(config);
  CHECK(outcome.any_error);
  REQUIRE(outcome.report.input_errors.size() == 1);
  CHECK(outcome.report.input_errors[0].first == (tmp / "absent.txt").string());
  CHECK(outcome.report.entries.size() == 2);  // both kinds of the good document
  REQUIRE(fs::exists(outcome.report_path));
  const auto j = nlohmann::json::parse(read_file(outcome.report_path));
  CHECK(j["input_errors"].size() == 1);
  fs::remove_all(tmp);
}

TEST_CASE("a run with nothing but bad inputs still writes its report") {
  const auto tmp = make_temp_dir("runbadonly");
  RunConfig config;
  config.inputs = {(tmp / "nope.txt").string()};
  config.tokenizer = default_tokenizer_config();
  config.grid = AnalysisGrid::defaults();
  config.out_dir = tmp / "out";
  const auto outcome = run(config);
  CHECK(outcome.any_error);
  CHECK(outcome.report.entries.empty());
  CHECK(fs::exists(outcome.report_path));
  fs::remove_all(tmp);
}

TEST_CASE("single kind runs produce one entry per variant") {
  const auto tmp = make_temp_dir("runsingle");
  write_file(tmp / "doc.txt", sample_text());
  RunConfig config;
  config.inputs = {(tmp / "doc.txt").string()};
  config.run_lts = false;
  config.tokenizer = default_tokenizer_config();
  config.grid = AnalysisGrid::defaults();
  config.out_dir = tmp / "out";
  const auto outcome = run(config);
  CHECK_FALSE(outcome.any_error);
  REQUIRE(outcome.report.entries.size() == 1);
  CHECK(outcome.report.entries[0].series == "fts");
  fs::remove_all(tmp);
}

TEST_CASE("run configuration is validated up front") {
  RunConfig config;
  config.tokenizer = default_tokenizer_config();
  config.grid = AnalysisGrid::defaults();
  config.out_dir = "somewhere";
  CHECK_THROWS_WITH_AS((void)run(config), doctest::Contains("no inputs"), Error);

  config.inputs = {"x.txt"};
  config.run_fts = false;
  config.run_lts = false;
  CHECK_THROWS_WITH_AS((void)run(config), doctest::Contains("kinds"), Error);

  config.run_fts = true;
  config.out_dir.clear();
  CHECK_THROWS_WITH_AS((void)run(config), doctest::Contains("output directory"), Error);
}

TEST_CASE("cache directory fallback is never empty") {
  CHECK_FALSE(default_cache_dir().empty());
}

TEST_CASE("mass analysis reports the box sizes actually used") {
  const auto mass = generate_cascade_measure(CascadeParams::binomial(0.7, 0.5), 10);
  const auto full = analyze_mass(std::span<const double>(mass), AnalysisGrid::defaults(), 2);
  CHECK(full.s_max_used == 200);
  CHECK(full.warnings.empty());
  CHECK(full.identities.max_prob_sum_error <= 1e-12);

  std::vector<double> short_mass(mass.begin(), mass.begin() + 150);
  const auto clamped =
      analyze_mass(std::span<const double>(short_mass), AnalysisGrid::defaults(), 1);
  CHECK(clamped.s_max_used == 150);
  CHECK(any_contains(clamped.warnings, "clamped"));
}

TEST_CASE("all tie increments cannot be analyzed") {
  IncrementSeries m;
  m.values.assign(300, 0);
  CHECK_THROWS_WITH_AS((void)analyze_increments(m, AnalysisGrid::defaults(), 1),
                       doctest::Contains("degenerate"), Error);
}
