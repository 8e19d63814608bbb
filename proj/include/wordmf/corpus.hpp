#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wordmf/error.hpp"

namespace wordmf {

// A loaded text. `text` is valid UTF-8; `source_id` is a short label derived
// from the file name or URL, used to name report entries and output files.
struct RawDocument {
  std::string source_id;
  std::string text;
};

// All switches are explicit so that a config struct read from a test or the
// CLI always states the full tokenization policy.
struct TokenizerConfig {
  bool lowercase;
  bool strip_punctuation;
  bool keep_internal_apostrophes;
  bool strip_chapter_heads;
  bool strip_gutenberg_boilerplate;
  // Per-line regex (ECMAScript, case-insensitive) selecting chapter heading
  // lines. A matched line is removed together with the line that follows it,
  // which in the usual two-line layout carries the chapter title.
  std::string chapter_pattern;
};

TokenizerConfig default_tokenizer_config();

struct TokenSequence {
  std::vector<std::string> tokens;
  std::size_t size() const { return tokens.size(); }
};

struct StripOutcome {
  RawDocument doc;
  bool gutenberg_markers_found = false;
  std::size_t chapter_lines_removed = 0;
};

bool looks_like_url(const std::string& input);

// SHA-256 of the URL, hex encoded; the cache file is <cache_dir>/<key>.txt.
std::string url_cache_key(const std::string& url);

// Reads a local file, or resolves a URL against the cache and (when
// fetch_allowed) the network. Throws wordmf::Error with a message naming the
// failure: missing file, empty document, undecodable bytes, fetch disabled,
// network failure.
RawDocument load_document(const std::string& path_or_url, bool fetch_allowed,
                          const std::filesystem::path& cache_dir);

// Applies the project-boilerplate and chapter-heading removal selected by
// cfg. Idempotent: applying it to its own output changes nothing.
StripOutcome strip_boilerplate(const RawDocument& doc, const TokenizerConfig& cfg);

// Whitespace tokenization with edge trimming of non-letter characters and
// optional lowercasing. Throws "document too short" when fewer than two
// tokens survive.
TokenSequence tokenize(const RawDocument& doc, const TokenizerConfig& cfg);

// Seeded Fisher-Yates permutation. Same seed, same platform-independent
// result; the token multiset is unchanged.
TokenSequence shuffle_tokens(const TokenSequence& seq, std::uint64_t seed);

}  // namespace wordmf
