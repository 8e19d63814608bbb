#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "wordmf/corpus.hpp"
#include "wordmf/error.hpp"
#include "wordmf/series.hpp"

using namespace wordmf;

namespace {

TokenSequence seq_of(std::vector<std::string> tokens) {
  TokenSequence s;
  s.tokens = std::move(tokens);
  return s;
}

}  // namespace

TEST_CASE("fts carries whole document frequencies at every position") {
  const auto s = build_fts(seq_of({"a", "b", "a"}), "t");
  CHECK(s.kind == SeriesKind::fts);
  CHECK(s.values == std::vector<std::uint32_t>{2, 1, 2});
}

TEST_CASE("fts with all distinct words is flat one") {
  const auto s = build_fts(seq_of({"u", "v", "w", "x"}), "t");
  CHECK(s.values == std::vector<std::uint32_t>{1, 1, 1, 1});
}

TEST_CASE("fts counts match an independent counter") {
  const std::vector<std::string> tokens = {"the", "cat", "sat", "on", "the", "mat",
                                           "and", "the", "cat", "slept"};
  const auto s = build_fts(seq_of(std::vector<std::string>(tokens)), "t");
  REQUIRE(s.values.size() == tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto expected = static_cast<std::uint32_t>(
        std::count(tokens.begin(), tokens.end(), tokens[i]));
    CHECK(s.values[i] == expected);
  }
  CHECK(s.values[0] == 3);  // "the"
  CHECK(s.values[1] == 2);  // "cat"
  CHECK(s.values[9] == 1);  // "slept"
}

TEST_CASE("lts counts letters as code points") {
  CHECK(build_lts(seq_of({"alice", "was", "beginning"}), "t").values ==
        std::vector<std::uint32_t>{5, 3, 9});
  CHECK(build_lts(seq_of({"ĉapelo", "kaj"}), "t").values == std::vector<std::uint32_t>{6, 3});
  CHECK(build_lts(seq_of({"a", "i"}), "t").values == std::vector<std::uint32_t>{1, 1});
}

TEST_CASE("series construction needs two tokens") {
  CHECK_THROWS_AS((void)build_fts(seq_of({"solo"}), "t"), Error);
  CHECK_THROWS_AS((void)build_lts(seq_of({"solo"}), "t"), Error);
}

TEST_CASE("increment encoding follows the rise fall tie rule") {
  WordSeries s;
  s.kind = SeriesKind::lts;
  s.values = {3, 5, 5, 2};
  const auto m = increment_encode(s);
  CHECK(m.values == std::vector<std::uint8_t>{2, 0, 1});
  CHECK(m.total_mass == 3);

  s.values = {4, 4, 4};
  CHECK(increment_encode(s).values == std::vector<std::uint8_t>{0, 0});

  s.values = {1, 2, 3, 4};
  CHECK(increment_encode(s).values == std::vector<std::uint8_t>{2, 2, 2});
}

TEST_CASE("increment encoding output is one shorter than its input") {
  std::mt19937 rng(7);
  for (int round = 0; round < 20; ++round) {
    WordSeries s;
    s.kind = SeriesKind::fts;
    const std::size_t n = 2 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(1 + rng() % 9);
    const auto m = increment_encode(s);
    CHECK(m.values.size() == s.values.size() - 1);
    std::uint64_t sum = 0;
    for (auto v : m.values) {
      CHECK(v <= 2);
      sum += v;
    }
    CHECK(sum == m.total_mass);
  }
}

TEST_CASE("reversing a series swaps rises and falls") {
  std::mt19937 rng(11);
  for (int round = 0; round < 20; ++round) {
    WordSeries s;
    s.kind = SeriesKind::fts;
    const std::size_t n = 2 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(1 + rng() % 5);
    WordSeries rev = s;
    std::reverse(rev.values.begin(), rev.values.end());

    const auto m = increment_encode(s);
    auto mr = increment_encode(rev).values;
    std::reverse(mr.begin(), mr.end());
    REQUIRE(mr.size() == m.values.size());
    for (std::size_t i = 0; i < mr.size(); ++i) {
      const std::uint8_t swapped = m.values[i] == 2 ? 1 : (m.values[i] == 1 ? 2 : 0);
      CHECK(mr[i] == swapped);
    }
  }
}

TEST_CASE("series value multisets are shuffle invariant") {
  TokenSequence seq;
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    seq.tokens.push_back(std::string(1 + rng() % 8, static_cast<char>('a' + rng() % 4)));
  }
  const auto shuffled = shuffle_tokens(seq, 99);

  auto f1 = build_fts(seq, "t").values;
  auto f2 = build_fts(shuffled, "t").values;
  std::sort(f1.begin(), f1.end());
  std::sort(f2.begin(), f2.end());
  CHECK(f1 == f2);

  auto l1 = build_lts(seq, "t").values;
  auto l2 = build_lts(shuffled, "t").values;
  std::sort(l1.begin(), l1.end());
  std::sort(l2.begin(), l2.end());
  CHECK(l1 == l2);
}

TEST_CASE("series export as single column csv") {
  WordSeries s;
  s.kind = SeriesKind::lts;
  s.values = {5, 3, 9};
  std::ostringstream os;
  write_series_csv(os, s);
  CHECK(os.str() == "value\n5\n3\n9\n");

  const auto m = increment_encode(s);
  std::ostringstream os2;
  write_series_csv(os2, m);
  CHECK(os2.str() == "value\n1\n2\n");
}
