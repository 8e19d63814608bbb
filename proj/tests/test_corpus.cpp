#include <algorithm>
#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "test_util.hpp"
#include "wordmf/corpus.hpp"
#include "wordmf/unicode.hpp"

using namespace wordmf;

namespace {

TokenSequence tok(const std::string& text, const TokenizerConfig& cfg) {
  return tokenize(RawDocument{"test", text}, cfg);
}

TokenSequence tok(const std::string& text) { return tok(text, default_tokenizer_config()); }

}  // namespace

TEST_CASE("default tokenizer config") {
  const TokenizerConfig cfg = default_tokenizer_config();
  CHECK(cfg.lowercase);
  CHECK(cfg.strip_punctuation);
  CHECK(cfg.keep_internal_apostrophes);
  CHECK(cfg.strip_chapter_heads);
  CHECK(cfg.strip_gutenberg_boilerplate);
  CHECK(!cfg.chapter_pattern.empty());
}

TEST_CASE("whitespace split") {
  const auto seq = tok("Alice was beginning to get very tired");
  CHECK(seq.size() == 7);
  CHECK(seq.tokens[0] == "alice");
  CHECK(seq.tokens[6] == "tired");
}

TEST_CASE("edge punctuation is trimmed and case folded") {
  const auto seq = tok("'Well!' thought Alice");
  REQUIRE(seq.size() == 3);
  CHECK(seq.tokens[0] == "well");
  CHECK(seq.tokens[1] == "thought");
  CHECK(seq.tokens[2] == "alice");
}

TEST_CASE("diacritic letters survive trimming") {
  const auto seq = tok("ĉapelo kaj ŝuoj");
  REQUIRE(seq.size() == 3);
  CHECK(seq.tokens[0] == "ĉapelo");
  CHECK(seq.tokens[1] == "kaj");
  CHECK(seq.tokens[2] == "ŝuoj");
  CHECK(uni::codepoint_count(seq.tokens[0]) == 6);
  CHECK(uni::codepoint_count(seq.tokens[1]) == 3);
  CHECK(uni::codepoint_count(seq.tokens[2]) == 4);
}

TEST_CASE("hyphenated words stay one token") {
  const auto seq = tok("down the Rabbit-Hole again");
  REQUIRE(seq.size() == 4);
  CHECK(seq.tokens[2] == "rabbit-hole");
}

TEST_CASE("internal apostrophes follow the config") {
  auto cfg = default_tokenizer_config();
  CHECK(tok("don't stop", cfg).tokens[0] == "don't");
  CHECK(tok("don’t stop", cfg).tokens[0] == "don’t");
  cfg.keep_internal_apostrophes = false;
  CHECK(tok("don't stop", cfg).tokens[0] == "dont");
  CHECK(tok("don’t stop", cfg).tokens[0] == "dont");
}

TEST_CASE("punctuation kept when stripping is off") {
  auto cfg = default_tokenizer_config();
  cfg.strip_punctuation = false;
  const auto seq = tok("'Well!' thought", cfg);
  REQUIRE(seq.size() == 2);
  CHECK(seq.tokens[0] == "'well!'");
}

TEST_CASE("case kept when lowercasing is off") {
  auto cfg = default_tokenizer_config();
  cfg.lowercase = false;
  CHECK(tok("Alice was", cfg).tokens[0] == "Alice");
}

TEST_CASE("digits trim from edges but stay inside") {
  const auto seq = tok("abc123 2x4 ab12cd 99 ok");
  REQUIRE(seq.size() == 4);  // "99" has no letters and is dropped
  CHECK(seq.tokens[0] == "abc");
  CHECK(seq.tokens[1] == "x");
  CHECK(seq.tokens[2] == "ab12cd");
  CHECK(seq.tokens[3] == "ok");
}

TEST_CASE("pure punctuation tokens are dropped") {
  const auto seq = tok("foo -- bar ... baz");
  REQUIRE(seq.size() == 3);
  CHECK(seq.tokens[1] == "bar");
}

TEST_CASE("unicode spaces separate tokens") {
  const auto seq = tok("a b c d");
  CHECK(seq.size() == 4);
}

TEST_CASE("too short documents are rejected") {
  CHECK_THROWS_WITH_AS((void)tok("hello"), doctest::Contains("document too short"), Error);
  CHECK_THROWS_WITH_AS((void)tok("!!! ???"), doctest::Contains("document too short"), Error);
}

TEST_CASE("tokens never contain whitespace and always start and end with a letter") {
  const auto seq = tok("It's a long-tailed, 'curious' tale!  ĉu ne? x2 3x 12 --");
  CHECK(seq.size() >= 8);
  for (const auto& t : seq.tokens) {
    CHECK(!t.empty());
    for (char c : t) CHECK(!std::isspace(static_cast<unsigned char>(c)));
    std::size_t i = 0;
    const char32_t first = uni::next_codepoint(t, i);
    CHECK(uni::is_letter(first));
    char32_t last = first;
    i = 0;
    while (i < t.size()) last = uni::next_codepoint(t, i);
    CHECK(uni::is_letter(last));
  }
}

TEST_CASE("tokenize is deterministic") {
  const std::string text = "One fish, two fish; red fish -- blue fish.";
  const auto a = tok(text);
  const auto b = tok(text);
  CHECK(a.tokens == b.tokens);
}

TEST_CASE("project marker lines cut head and tail") {
  const std::string text =
      "front matter junk\n"
      "*** START OF THIS PROJECT GUTENBERG EBOOK EXAMPLE ***\n"
      "body line one\n"
      "body line two\n"
      "*** END OF THIS PROJECT GUTENBERG EBOOK EXAMPLE ***\n"
      "license junk\n";
  auto cfg = default_tokenizer_config();
  cfg.strip_chapter_heads = false;
  const auto out = strip_boilerplate(RawDocument{"x", text}, cfg);
  CHECK(out.gutenberg_markers_found);
  CHECK(out.doc.text == "body line one\nbody line two");
}

TEST_CASE("absent markers leave the text unchanged") {
  auto cfg = default_tokenizer_config();
  cfg.strip_chapter_heads = false;
  const std::string text = "no markers here\njust text";
  const auto out = strip_boilerplate(RawDocument{"x", text}, cfg);
  CHECK_FALSE(out.gutenberg_markers_found);
  CHECK(out.doc.text == text);
}

TEST_CASE("chapter heading and its title line are removed") {
  const std::string text = "CHAPTER I.\nDown the Rabbit-Hole\nAlice was beginning";
  const auto out = strip_boilerplate(RawDocument{"x", text}, default_tokenizer_config());
  CHECK(out.doc.text == "Alice was beginning");
  CHECK(out.chapter_lines_removed == 2);
}

TEST_CASE("chapter pattern matches case insensitively") {
  const std::string text = "Chapter II.\nA Pool of Tears\nmore text";
  const auto out = strip_boilerplate(RawDocument{"x", text}, default_tokenizer_config());
  CHECK(out.doc.text == "more text");
}

TEST_CASE("custom roman numeral chapter pattern") {
  auto cfg = default_tokenizer_config();
  cfg.chapter_pattern = "^[IVXLC]+$";
  const std::string text = "I\n_An Early Fright_\n\nIn Styria, we live simply";
  const auto out = strip_boilerplate(RawDocument{"x", text}, cfg);
  CHECK(out.doc.text == "\nIn Styria, we live simply");
  CHECK(out.chapter_lines_removed == 2);
}

TEST_CASE("strip_boilerplate is idempotent") {
  const std::string text =
      "junk\n*** START OF THE PROJECT ***\nCHAPTER I.\nTitle\nreal text here\n"
      "*** END OF THE PROJECT ***\ntail\n";
  const auto cfg = default_tokenizer_config();
  const auto once = strip_boilerplate(RawDocument{"x", text}, cfg);
  const auto twice = strip_boilerplate(once.doc, cfg);
  CHECK(once.doc.text == twice.doc.text);
  CHECK(twice.chapter_lines_removed == 0);
}

TEST_CASE("disabled stripping keeps everything") {
  auto cfg = default_tokenizer_config();
  cfg.strip_chapter_heads = false;
  cfg.strip_gutenberg_boilerplate = false;
  const std::string text = "CHAPTER I.\nTitle\nbody";
  const auto out = strip_boilerplate(RawDocument{"x", text}, cfg);
  CHECK(out.doc.text == text);
}

TEST_CASE("invalid chapter pattern is reported") {
  auto cfg = default_tokenizer_config();
  cfg.chapter_pattern = "([unclosed";
  CHECK_THROWS_WITH_AS((void)strip_boilerplate(RawDocument{"x", "a\nb"}, cfg),
                       doctest::Contains("chapter-heading pattern"), Error);
}

TEST_CASE("load_document reads local files") {
  const auto dir = make_temp_dir("load");
  write_file(dir / "alice.txt", "Alice was beginning");
  const auto doc = load_document((dir / "alice.txt").string(), false, dir / "cache");
  CHECK(doc.source_id == "alice");
  CHECK(doc.text == "Alice was beginning");
}

TEST_CASE("load_document strips a byte order mark") {
  const auto dir = make_temp_dir("bom");
  write_file(dir / "b.txt", "\xEF\xBB\xBFhello there");
  CHECK(load_document((dir / "b.txt").string(), false, dir).text == "hello there");
}

TEST_CASE("load_document failure modes are reported distinctly") {
  const auto dir = make_temp_dir("loaderr");
  CHECK_THROWS_WITH_AS((void)load_document((dir / "nope.txt").string(), false, dir),
                       doctest::Contains("missing file"), Error);
  write_file(dir / "empty.txt", "");
  CHECK_THROWS_WITH_AS((void)load_document((dir / "empty.txt").string(), false, dir),
                       doctest::Contains("empty document"), Error);
  write_file(dir / "bad.txt", "ok\xC3so");
  CHECK_THROWS_WITH_AS((void)load_document((dir / "bad.txt").string(), false, dir),
                       doctest::Contains("undecodable"), Error);
}

TEST_CASE("url cache key is the sha256 hex of the input") {
  CHECK(url_cache_key("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(looks_like_url("http://example.org/x.txt"));
  CHECK(looks_like_url("https://example.org/x.txt"));
  CHECK_FALSE(looks_like_url("example.org/x.txt"));
  CHECK_FALSE(looks_like_url("/tmp/x.txt"));
}

TEST_CASE("uncached url with fetching disabled") {
  const auto dir = make_temp_dir("nofetch");
  CHECK_THROWS_WITH_AS(
      (void)load_document("http://127.0.0.1:9/none.txt", false, dir),
      doctest::Contains("fetch disabled"), Error);
}

TEST_CASE("fetch, cache and offline reuse against a loopback server") {
  const std::string body = "Alice was beginning to get very tired of sitting by her sister";
  httplib::Server server;
  server.Get("/book.txt", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(body, "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&]() { server.listen_after_bind(); });
  server.wait_until_ready();

  const auto cache = make_temp_dir("cache");
  const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/book.txt";

  const auto doc = load_document(url, true, cache);
  CHECK(doc.text == body);
  CHECK(doc.source_id == "book");
  CHECK(std::filesystem::exists(cache / (url_cache_key(url) + ".txt")));

  const std::string missing = "http://127.0.0.1:" + std::to_string(port) + "/404.txt";
  CHECK_THROWS_WITH_AS((void)load_document(missing, true, cache),
                       doctest::Contains("network failure"), Error);

  server.stop();
  listener.join();

  // Server gone: the cached copy still answers, even with fetching off.
  const auto cached = load_document(url, false, cache);
  CHECK(cached.text == body);
}

TEST_CASE("shuffle determinism and multiset invariance") {
  TokenSequence seq;
  for (int i = 0; i < 100; ++i) seq.tokens.push_back("w" + std::to_string(i % 17));

  const auto a = shuffle_tokens(seq, 42);
  const auto b = shuffle_tokens(seq, 42);
  CHECK(a.tokens == b.tokens);
  CHECK(a.tokens.size() == seq.tokens.size());

  auto sa = a.tokens;
  auto so = seq.tokens;
  std::sort(sa.begin(), sa.end());
  std::sort(so.begin(), so.end());
  CHECK(sa == so);

  const auto c = shuffle_tokens(seq, 43);
  CHECK(c.tokens != a.tokens);
  auto sc = c.tokens;
  std::sort(sc.begin(), sc.end());
  CHECK(sc == so);
}

TEST_CASE("two element shuffles are always permutations") {
  TokenSequence seq;
  seq.tokens = {"a", "b"};
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    const auto out = shuffle_tokens(seq, seed);
    const bool keep = out.tokens[0] == "a" && out.tokens[1] == "b";
    const bool swap = out.tokens[0] == "b" && out.tokens[1] == "a";
    CHECK((keep || swap));
  }
}
